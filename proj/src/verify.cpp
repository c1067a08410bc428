#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <vector>

#include "optbench/hyperband.hpp"
#include "optbench/io.hpp"
#include "optbench/metrics.hpp"
#include "optbench/rng.hpp"
#include "optbench/table_oracle.hpp"
#include "optbench/tasks.hpp"

// `verify` subcommand: self-contained property suites over a fresh build.

namespace optbench {

namespace {

double rel_err(const ParamVector& a, const ParamVector& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t l = 0; l < a.layers.size(); ++l)
    for (std::size_t i = 0; i < a.layers[l].size(); ++i) {
      double d = a.layers[l][i] - b.layers[l][i];
      num += d * d;
      den += a.layers[l][i] * a.layers[l][i] + b.layers[l][i] * b.layers[l][i];
    }
  return den > 0 ? std::sqrt(num / den) : 0.0;
}

ParamVector perturbed(const Task& task, std::uint64_t seed) {
  ParamVector p = task.initial_params();
  Rng rng(seed);
  for (auto& l : p.layers)
    for (auto& x : l) x += 0.3 * rng.normal();
  return p;
}

bool suite_gradients() {
  struct Case {
    TaskPtr task;
    double tol;
  };
  std::vector<Case> cases = {
      {make_quadratic(6, 25.0, 11), 1e-6},
      {make_logreg(200, 5, 3, 12), 1e-5},
      {make_mlp(150, 4, 6, 3, 13), 1e-4},
      {make_synthetic_landscape(14), 1e-6},
  };
  for (const auto& c : cases) {
    for (int p = 0; p < 20; ++p) {
      ParamVector theta = perturbed(*c.task, 1000 + p);
      Batch batch = c.task->full_train_batch();
      ParamVector g = c.task->grad(theta, batch);
      ParamVector fd = finite_diff_grad(*c.task, theta, batch, 1e-5);
      if (rel_err(g, fd) >= c.tol) return false;
    }
  }
  return true;
}

bool suite_brackets() {
  for (int eta : {2, 3, 4}) {
    for (int R = 1; R <= 243; ++R) {
      auto plans = plan_brackets(R, eta);
      // Literal floating-point rederivation of the bracket arithmetic.
      int s_max = static_cast<int>(
          std::floor(std::log(static_cast<double>(R)) / std::log(double(eta)) +
                     1e-9));
      double B = (s_max + 1.0) * R;
      if (static_cast<int>(plans.size()) != s_max + 1) return false;
      for (int s = s_max; s >= 0; --s) {
        const auto& p = plans[s_max - s];
        int n = static_cast<int>(
            std::ceil(B / R * std::pow(double(eta), s) / (s + 1) - 1e-9));
        double r = R * std::pow(double(eta), -s);
        if (p.s != s || p.n != n) return false;
        if (p.r != static_cast<int>(std::ceil(r - 1e-9))) return false;
        if (static_cast<int>(p.rungs.size()) != s + 1) return false;
        for (int i = 0; i <= s; ++i) {
          int ni = static_cast<int>(
              std::floor(n * std::pow(double(eta), -i) + 1e-9));
          int ri = static_cast<int>(
              std::ceil(r * std::pow(double(eta), i) - 1e-9));
          if (p.rungs[i].n != ni || p.rungs[i].r != ri) return false;
        }
      }
    }
  }
  return true;
}

bool suite_conformance() {
  Rng rng(99);
  for (Rule rule : all_rules()) {
    Hyperparams w;
    w.alpha0 = 0.05;
    w.mu = 0.8;
    w.beta1 = 0.9;
    w.beta2 = 0.999;
    w.eps = 1e-8;
    ParamVector theta;
    theta.layers = {{0.5, -1.2, 2.0}, {0.7, 0.1}};
    std::vector<ParamVector> grads;
    for (int t = 0; t < 10; ++t) {
      ParamVector g = ParamVector::zeros_like(theta);
      for (auto& l : g.layers)
        for (auto& x : l) x = rng.normal();
      grads.push_back(std::move(g));
    }
    auto expected = oracle::run_reference(rule, w, theta, grads, 10);

    OptimizerSpec spec{rule, w};
    OptState state = OptState::init(spec, theta);
    ParamVector cur = theta;
    for (int t = 1; t <= 10; ++t) {
      if (!step(spec, state, cur, grads[t - 1], t, 10)) return false;
      for (std::size_t l = 0; l < cur.layers.size(); ++l)
        for (std::size_t i = 0; i < cur.layers[l].size(); ++i)
          if (std::abs(cur.layers[l][i] - expected[t - 1].layers[l][i]) >
              1e-12)
            return false;
    }
  }
  return true;
}

bool suite_cpe() {
  for (int T : {1, 2, 5, 40, 173}) {
    auto w = cpe_weights(T);
    double sum = 0.0;
    for (double x : w) sum += x;
    if (std::abs(sum - 1.0) > 1e-12) return false;
    for (int t = 0; t + 1 < T; ++t)
      if (!(w[t] > w[t + 1] && w[t + 1] > 0.0)) return false;
  }
  Trajectory c{{0.4, 0.4, 0.4}, MetricDirection::higher_better};
  if (std::abs(cpe(c) - 0.4) > 1e-12) return false;
  Trajectory p{{1.0, 2.0, 3.0}, MetricDirection::higher_better};
  if (std::abs(cpe(p) - 10.0 / 6.0) > 1e-12) return false;
  return true;
}

}  // namespace

int cmd_verify() {
  struct Suite {
    const char* name;
    std::function<bool()> run;
  };
  std::vector<Suite> suites = {
      {"gradient_checks", suite_gradients},
      {"bracket_arithmetic", suite_brackets},
      {"optimizer_conformance", suite_conformance},
      {"cpe_weights", suite_cpe},
  };
  bool all_ok = true;
  for (const auto& s : suites) {
    bool ok = false;
    try {
      ok = s.run();
    } catch (const std::exception& e) {
      std::cerr << s.name << ": exception: " << e.what() << "\n";
    }
    std::printf("%-24s %s\n", s.name, ok ? "PASS" : "FAIL");
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 2;
}

}  // namespace optbench
