#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "optbench/kernels.hpp"
#include "optbench/rng.hpp"

using namespace optbench;

namespace {

struct Fixture {
  int n = 1000, dim = 7, h = 5, k = 4;
  std::vector<double> X, W, b, W1, b1, W2, b2;
  std::vector<int> y, idx;

  Fixture() {
    Rng rng(7);
    X.resize(static_cast<std::size_t>(n) * dim);
    for (auto& x : X) x = rng.normal();
    y.resize(n);
    for (int i = 0; i < n; ++i) y[i] = i % k;
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0);
    auto fill = [&](std::vector<double>& v, int sz) {
      v.resize(sz);
      for (auto& x : v) x = 0.2 * rng.normal();
    };
    fill(W, k * dim);
    fill(b, k);
    fill(W1, h * dim);
    fill(b1, h);
    fill(W2, k * h);
    fill(b2, k);
  }
};

}  // namespace

TEST_CASE("blocked serial and parallel logreg kernels agree bitwise") {
  Fixture f;
  std::vector<double> gW_s(f.k * f.dim, 0.0), gb_s(f.k, 0.0);
  std::vector<double> gW_p(f.k * f.dim, 0.0), gb_p(f.k, 0.0);
  kernels::set_parallel(false);
  double ls = kernels::logreg_loss_grad(f.X.data(), f.y.data(), f.idx.data(),
                                        f.n, f.dim, f.k, f.W.data(), f.b.data(),
                                        gW_s.data(), gb_s.data());
  kernels::set_parallel(true);
  double lp = kernels::logreg_loss_grad(f.X.data(), f.y.data(), f.idx.data(),
                                        f.n, f.dim, f.k, f.W.data(), f.b.data(),
                                        gW_p.data(), gb_p.data());
  CHECK(ls == lp);
  CHECK(gW_s == gW_p);
  CHECK(gb_s == gb_p);
}

TEST_CASE("blocked serial and parallel mlp kernels agree bitwise") {
  Fixture f;
  auto run = [&](bool par) {
    kernels::set_parallel(par);
    std::vector<double> gW1(f.h * f.dim, 0.0), gb1(f.h, 0.0),
        gW2(f.k * f.h, 0.0), gb2(f.k, 0.0);
    double l = kernels::mlp_loss_grad(
        f.X.data(), f.y.data(), f.idx.data(), f.n, f.dim, f.h, f.k, f.W1.data(),
        f.b1.data(), f.W2.data(), f.b2.data(), gW1.data(), gb1.data(),
        gW2.data(), gb2.data());
    return std::make_tuple(l, gW1, gb1, gW2, gb2);
  };
  CHECK(run(false) == run(true));
}

TEST_CASE("blocked kernels match the plain serial reference") {
  Fixture f;
  kernels::set_parallel(true);
  std::vector<double> gW(f.k * f.dim, 0.0), gb(f.k, 0.0);
  std::vector<double> rW(f.k * f.dim, 0.0), rb(f.k, 0.0);
  double l = kernels::logreg_loss_grad(f.X.data(), f.y.data(), f.idx.data(),
                                       f.n, f.dim, f.k, f.W.data(), f.b.data(),
                                       gW.data(), gb.data());
  double lr = kernels_ref::logreg_loss_grad(f.X.data(), f.y.data(),
                                            f.idx.data(), f.n, f.dim, f.k,
                                            f.W.data(), f.b.data(), rW.data(),
                                            rb.data());
  CHECK(l == doctest::Approx(lr).epsilon(1e-12));
  for (std::size_t i = 0; i < gW.size(); ++i)
    CHECK(gW[i] == doctest::Approx(rW[i]).epsilon(1e-10));

  std::vector<double> gW1(f.h * f.dim, 0.0), gb1(f.h, 0.0), gW2(f.k * f.h, 0.0),
      gb2(f.k, 0.0);
  std::vector<double> hW1(f.h * f.dim, 0.0), hb1(f.h, 0.0), hW2(f.k * f.h, 0.0),
      hb2(f.k, 0.0);
  double m = kernels::mlp_loss_grad(f.X.data(), f.y.data(), f.idx.data(), f.n,
                                    f.dim, f.h, f.k, f.W1.data(), f.b1.data(),
                                    f.W2.data(), f.b2.data(), gW1.data(),
                                    gb1.data(), gW2.data(), gb2.data());
  double mr = kernels_ref::mlp_loss_grad(
      f.X.data(), f.y.data(), f.idx.data(), f.n, f.dim, f.h, f.k, f.W1.data(),
      f.b1.data(), f.W2.data(), f.b2.data(), hW1.data(), hb1.data(),
      hW2.data(), hb2.data());
  CHECK(m == doctest::Approx(mr).epsilon(1e-12));
  for (std::size_t i = 0; i < gW1.size(); ++i)
    CHECK(gW1[i] == doctest::Approx(hW1[i]).epsilon(1e-10));
}

TEST_CASE("uniform logits give loss log(k) per row") {
  Fixture f;
  std::vector<double> W0(f.k * f.dim, 0.0), b0(f.k, 0.0);
  double l = kernels::logreg_loss_grad(f.X.data(), f.y.data(), f.idx.data(),
                                       f.n, f.dim, f.k, W0.data(), b0.data(),
                                       nullptr, nullptr);
  CHECK(l / f.n == doctest::Approx(std::log(double(f.k))).epsilon(1e-12));
}
