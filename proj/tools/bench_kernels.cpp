// Compares the blocked batch kernels (serial and OpenMP) against the plain
// serial reference on a large synthetic classification batch.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "optbench/kernels.hpp"
#include "optbench/rng.hpp"

using namespace optbench;

namespace {

struct Problem {
  int n, dim, h, k;
  std::vector<double> X, W, b, W1, b1, W2, b2;
  std::vector<int> y, idx;
};

Problem make_problem(int n, int dim, int h, int k) {
  Problem p{n, dim, h, k, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  Rng rng(42);
  p.X.resize(static_cast<std::size_t>(n) * dim);
  p.y.resize(n);
  for (auto& x : p.X) x = rng.normal();
  for (int i = 0; i < n; ++i) p.y[i] = i % k;
  p.idx.resize(n);
  std::iota(p.idx.begin(), p.idx.end(), 0);
  auto fill = [&](std::vector<double>& v, int sz) {
    v.resize(sz);
    for (auto& x : v) x = 0.1 * rng.normal();
  };
  fill(p.W, k * dim);
  fill(p.b, k);
  fill(p.W1, h * dim);
  fill(p.b1, h);
  fill(p.W2, k * h);
  fill(p.b2, k);
  return p;
}

template <typename F>
double time_ms(F&& f, int iters) {
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < iters; ++i) f();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / iters;
}

}  // namespace

int main() {
  const int n = 200000, dim = 32, h = 24, k = 8, iters = 5;
  Problem p = make_problem(n, dim, h, k);
  std::vector<double> gW(k * dim), gb(k), gW1(h * dim), gb1(h), gW2(k * h),
      gb2(k);
  auto zero_all = [&] {
    for (auto* v : {&gW, &gb, &gW1, &gb1, &gW2, &gb2})
      std::fill(v->begin(), v->end(), 0.0);
  };

  double loss_ref = 0, loss_ser = 0, loss_par = 0;
  auto run_logreg = [&](auto&& fn, double& loss) {
    zero_all();
    loss = fn(p.X.data(), p.y.data(), p.idx.data(), n, dim, k, p.W.data(),
              p.b.data(), gW.data(), gb.data());
  };

  double t_ref = time_ms(
      [&] { run_logreg(kernels_ref::logreg_loss_grad, loss_ref); }, iters);
  kernels::set_parallel(false);
  double t_ser = time_ms(
      [&] { run_logreg(kernels::logreg_loss_grad, loss_ser); }, iters);
  kernels::set_parallel(true);
  double t_par = time_ms(
      [&] { run_logreg(kernels::logreg_loss_grad, loss_par); }, iters);

  std::printf("logreg loss+grad, n=%d dim=%d k=%d\n", n, dim, k);
  std::printf("  reference serial : %8.2f ms  (loss %.10f)\n", t_ref, loss_ref);
  std::printf("  blocked serial   : %8.2f ms  (loss %.10f)\n", t_ser, loss_ser);
  std::printf("  blocked parallel : %8.2f ms  (loss %.10f)  speedup x%.2f\n",
              t_par, loss_par, t_ser / t_par);
  std::printf("  serial==parallel bitwise: %s\n",
              loss_ser == loss_par ? "yes" : "NO");

  auto run_mlp = [&](auto&& fn, double& loss) {
    zero_all();
    loss = fn(p.X.data(), p.y.data(), p.idx.data(), n, dim, h, k, p.W1.data(),
              p.b1.data(), p.W2.data(), p.b2.data(), gW1.data(), gb1.data(),
              gW2.data(), gb2.data());
  };
  t_ref = time_ms([&] { run_mlp(kernels_ref::mlp_loss_grad, loss_ref); }, iters);
  kernels::set_parallel(false);
  t_ser = time_ms([&] { run_mlp(kernels::mlp_loss_grad, loss_ser); }, iters);
  kernels::set_parallel(true);
  t_par = time_ms([&] { run_mlp(kernels::mlp_loss_grad, loss_par); }, iters);

  std::printf("mlp loss+grad, n=%d dim=%d h=%d k=%d\n", n, dim, h, k);
  std::printf("  reference serial : %8.2f ms  (loss %.10f)\n", t_ref, loss_ref);
  std::printf("  blocked serial   : %8.2f ms  (loss %.10f)\n", t_ser, loss_ser);
  std::printf("  blocked parallel : %8.2f ms  (loss %.10f)  speedup x%.2f\n",
              t_par, loss_par, t_ser / t_par);
  std::printf("  serial==parallel bitwise: %s\n",
              loss_ser == loss_par ? "yes" : "NO");
  return 0;
}
