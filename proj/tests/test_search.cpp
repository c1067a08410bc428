#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "optbench/search.hpp"

using namespace optbench;

TEST_CASE("dist realization") {
  Dist lin{false, 0.25, 0.75};
  CHECK(lin.realize(0.0) == 0.25);
  CHECK(lin.realize(1.0) == 0.75);
  CHECK(lin.realize(0.5) == 0.5);

  Dist log{true, -8.0, 1.0};
  CHECK(log.realize(1.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(log.realize(0.0) == doctest::Approx(1e-8).epsilon(1e-12));
}

TEST_CASE("lr_only leaves defaults in place") {
  SearchSpace space = default_space();
  Rng rng(7);

  Hyperparams sgd = sample_config(space, TuningMode::lr_only, Rule::sgdm,
                                  false, rng);
  CHECK(sgd.mu == 0.0);
  CHECK(sgd.schedule == Schedule::constant);
  CHECK(sgd.alpha0 >= 1e-8);
  CHECK(sgd.alpha0 <= 10.0);

  Hyperparams lars = sample_config(space, TuningMode::lr_only, Rule::lars,
                                   false, rng);
  CHECK(lars.mu == 0.9);

  Hyperparams adam = sample_config(space, TuningMode::lr_only, Rule::adam,
                                   false, rng);
  CHECK(adam.beta1 == 0.9);
  CHECK(adam.beta2 == 0.999);
  CHECK(adam.eps == 1e-8);
}

TEST_CASE("full mode varies every tunable field") {
  SearchSpace space = default_space();
  Rng rng(11);
  std::set<double> a0, b1, b2, ep;
  for (int i = 0; i < 100; ++i) {
    Hyperparams w =
        sample_config(space, TuningMode::full, Rule::adam, false, rng);
    a0.insert(w.alpha0);
    b1.insert(w.beta1);
    b2.insert(w.beta2);
    ep.insert(w.eps);
    CHECK(w.alpha0 >= 1e-8);
    CHECK(w.alpha0 <= 10.0);
    CHECK(w.beta1 >= 0.0);
    CHECK(w.beta1 < 1.0);
    CHECK(1.0 - w.beta2 >= 1e-6);
    CHECK(1.0 - w.beta2 <= 1.0);
    CHECK(w.schedule == Schedule::constant);
  }
  CHECK(a0.size() == 100);
  CHECK(b1.size() == 100);
  CHECK(b2.size() == 100);
  CHECK(ep.size() == 100);
}

TEST_CASE("full mode samples mu for non-adaptive rules") {
  SearchSpace space = default_space();
  Rng rng(13);
  std::set<double> mus;
  for (int i = 0; i < 50; ++i) {
    Hyperparams w =
        sample_config(space, TuningMode::full, Rule::sgdm, false, rng);
    mus.insert(w.mu);
    CHECK(w.mu >= 0.0);
    CHECK(w.mu <= 1.0);
    CHECK(w.beta1 == 0.9);  // adaptive fields stay at defaults
  }
  CHECK(mus.size() == 50);
}

TEST_CASE("gamma sampled only in full mode with the flag set") {
  SearchSpace space = default_space();
  Rng rng(17);
  Hyperparams w =
      sample_config(space, TuningMode::full, Rule::adam, true, rng);
  CHECK(w.schedule == Schedule::linear_decay);
  CHECK(w.gamma >= 1e-4);
  CHECK(w.gamma <= 1.0);

  Hyperparams v =
      sample_config(space, TuningMode::lr_only, Rule::adam, true, rng);
  CHECK(v.schedule == Schedule::constant);
  CHECK(v.gamma == 1.0);
}

TEST_CASE("same seed, same draws") {
  SearchSpace space = default_space();
  Rng a(123), b(123);
  for (int i = 0; i < 20; ++i) {
    Hyperparams x = sample_config(space, TuningMode::full, Rule::lamb, true, a);
    Hyperparams y = sample_config(space, TuningMode::full, Rule::lamb, true, b);
    CHECK(x.alpha0 == y.alpha0);
    CHECK(x.beta1 == y.beta1);
    CHECK(x.beta2 == y.beta2);
    CHECK(x.eps == y.eps);
    CHECK(x.gamma == y.gamma);
  }
}

TEST_CASE("log10(alpha0) is uniform on [-8, 1]") {
  // One-sample Kolmogorov-Smirnov against the uniform CDF. With n = 10^4 the
  // 99% critical value is 1.63 / sqrt(n).
  SearchSpace space = default_space();
  Rng rng(2026);
  const int n = 10000;
  std::vector<double> xs;
  xs.reserve(n);
  for (int i = 0; i < n; ++i) {
    Hyperparams w =
        sample_config(space, TuningMode::lr_only, Rule::adam, false, rng);
    xs.push_back((std::log10(w.alpha0) + 8.0) / 9.0);
  }
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    d = std::max(d, std::abs(xs[i] - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - xs[i]));
  }
  CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("mode names round-trip") {
  CHECK(tuning_mode_from_name("lr_only") == TuningMode::lr_only);
  CHECK(tuning_mode_from_name("full") == TuningMode::full);
  CHECK_THROWS(tuning_mode_from_name("grid"));
}
