#include "optbench/search.hpp"

#include <stdexcept>

namespace optbench {

const char* tuning_mode_name(TuningMode m) {
  return m == TuningMode::lr_only ? "lr_only" : "full";
}

TuningMode tuning_mode_from_name(const std::string& name) {
  if (name == "lr_only") return TuningMode::lr_only;
  if (name == "full") return TuningMode::full;
  throw std::invalid_argument("unknown tuning mode: '" + name + "'");
}

SearchSpace default_space() { return {}; }

Hyperparams sample_config(const SearchSpace& space, TuningMode mode, Rule rule,
                          bool tune_gamma, Rng& rng) {
  Hyperparams w;
  // Defaults first; mode/rule decide which fields get sampled over them.
  w.mu = rule == Rule::lars ? space.default_mu_lars : space.default_mu_sgd;
  w.beta1 = 1.0 - space.default_one_minus_beta1;
  w.beta2 = 1.0 - space.default_one_minus_beta2;
  w.eps = space.default_eps;
  w.gamma = 1.0;
  w.schedule = Schedule::constant;

  // Fixed draw order keeps configurations a pure function of the rng state.
  w.alpha0 = space.alpha0.sample(rng);
  if (mode == TuningMode::full) {
    if (rule_is_adaptive(rule)) {
      w.beta1 = 1.0 - space.one_minus_beta1.sample(rng);
      w.beta2 = 1.0 - space.one_minus_beta2.sample(rng);
      w.eps = space.eps.sample(rng);
    } else {
      w.mu = space.mu.sample(rng);
    }
    if (tune_gamma) {
      w.gamma = space.gamma.sample(rng);
      w.schedule = Schedule::linear_decay;
    }
  }
  return w;
}

}  // namespace optbench
