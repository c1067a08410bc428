#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optbench/param.hpp"

namespace optbench {

enum class Rule { sgdm, adam, radam, yogi, lars, lamb, lookahead };
enum class Schedule { constant, linear_decay };

const char* rule_name(Rule r);
Rule rule_from_name(const std::string& name);  // throws on unknown rule
std::vector<Rule> all_rules();
bool rule_is_adaptive(Rule r);

// The full hyperparameter vector. Every rule reads only its own fields.
struct Hyperparams {
  double alpha0 = 0.001;    // initial learning rate
  double mu = 0.0;          // momentum decay, non-adaptive rules
  double beta1 = 0.9;       // first-moment coefficient, adaptive rules
  double beta2 = 0.999;     // second-moment coefficient
  double eps = 1e-8;        // division guard
  double gamma = 1.0;       // schedule decay factor
  Schedule schedule = Schedule::constant;
  int lookahead_k = 5;      // slow-weight sync period
  double lookahead_alpha_s = 0.5;  // slow step size

  bool operator==(const Hyperparams&) const = default;
};

struct OptimizerSpec {
  Rule rule = Rule::sgdm;
  Hyperparams omega;
};

// Mutable per-trial optimizer state. v stays identically 1 for the
// non-adaptive rules.
struct OptState {
  ParamVector m;
  ParamVector v;
  long t = 0;
  ParamVector slow_weights;  // lookahead only
  int inner_counter = 0;     // lookahead only

  static OptState init(const OptimizerSpec& spec, const ParamVector& theta);

  bool operator==(const OptState&) const = default;
};

struct UpdateTerms {
  ParamVector m;
  ParamVector v;
  std::vector<double> r;  // per-layer trust ratio
  bool use_adaptive_denominator = true;
};

// alpha_t for step t of a horizon of T steps.
double schedule_lr(const Hyperparams& omega, long t, long T);

// One row of the update table: new moments plus the adaptive term, without
// touching theta or state. theta feeds the LARS/LAMB trust ratios.
UpdateTerms compute_update_terms(const OptimizerSpec& spec,
                                 const OptState& state,
                                 const ParamVector& theta, const ParamVector& g,
                                 long t);

// One optimizer step in place. Returns false (leaving theta and state
// untouched) when the gradient is non-finite.
bool step(const OptimizerSpec& spec, OptState& state, ParamVector& theta,
          const ParamVector& g, long t, long T);

// RAdam rectification; exposed for tests.
double radam_rho_inf(double beta2);
double radam_rho_t(double beta2, long t);

}  // namespace optbench
