#pragma once

#include <cmath>

#include "optbench/optimizers.hpp"
#include "optbench/rng.hpp"

namespace optbench {

enum class TuningMode { lr_only, full };

const char* tuning_mode_name(TuningMode m);
TuningMode tuning_mode_from_name(const std::string& name);

// One hyperparameter's sampling distribution. log10_scale draws the exponent
// uniformly and maps through 10^x.
struct Dist {
  bool log10_scale = false;
  double lo = 0.0;
  double hi = 1.0;

  double realize(double u) const {
    double x = lo + (hi - lo) * u;
    return log10_scale ? std::pow(10.0, x) : x;
  }
  double sample(Rng& rng) const { return realize(rng.uniform()); }
};

// Unified search space plus per-rule defaults. Distributions over 1-beta1 and
// 1-beta2 keep the interesting region near 1 on a log scale.
struct SearchSpace {
  Dist alpha0{true, -8.0, 1.0};
  Dist mu{false, 0.0, 1.0};
  Dist one_minus_beta1{true, -4.0, 0.0};
  Dist one_minus_beta2{true, -6.0, 0.0};
  Dist eps{true, -8.0, 1.0};
  Dist gamma{true, -4.0, 0.0};

  double default_mu_sgd = 0.0;
  double default_mu_lars = 0.9;
  double default_one_minus_beta1 = 0.1;
  double default_one_minus_beta2 = 0.001;
  double default_eps = 1e-8;
};

SearchSpace default_space();

// Draws one configuration. lr_only samples alpha0 and leaves everything else
// at defaults; full samples every tunable field of the rule. gamma is sampled
// (with a linear-decay schedule) only in full mode on tasks that tune it.
Hyperparams sample_config(const SearchSpace& space, TuningMode mode, Rule rule,
                          bool tune_gamma, Rng& rng);

}  // namespace optbench
