#include "optbench/optimizers.hpp"

#include <cmath>
#include <stdexcept>

namespace optbench {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::sgdm: return "sgdm";
    case Rule::adam: return "adam";
    case Rule::radam: return "radam";
    case Rule::yogi: return "yogi";
    case Rule::lars: return "lars";
    case Rule::lamb: return "lamb";
    case Rule::lookahead: return "lookahead";
  }
  return "?";
}

Rule rule_from_name(const std::string& name) {
  for (Rule r : all_rules())
    if (name == rule_name(r)) return r;
  throw std::invalid_argument("unknown optimizer rule: '" + name + "'");
}

std::vector<Rule> all_rules() {
  return {Rule::sgdm, Rule::adam,  Rule::radam,    Rule::yogi,
          Rule::lars, Rule::lamb, Rule::lookahead};
}

bool rule_is_adaptive(Rule r) { return r != Rule::sgdm && r != Rule::lars; }

OptState OptState::init(const OptimizerSpec& spec, const ParamVector& theta) {
  OptState s;
  s.m = ParamVector::zeros_like(theta);
  s.v = ParamVector::zeros_like(theta);
  if (!rule_is_adaptive(spec.rule))
    for (auto& l : s.v.layers)
      for (auto& x : l) x = 1.0;
  if (spec.rule == Rule::lookahead) s.slow_weights = theta;
  return s;
}

double schedule_lr(const Hyperparams& omega, long t, long T) {
  if (T <= 0) throw std::invalid_argument("schedule_lr: horizon T must be > 0");
  if (omega.schedule == Schedule::constant) return omega.alpha0;
  return omega.alpha0 -
         (1.0 - omega.gamma) * omega.alpha0 *
             (static_cast<double>(t) / static_cast<double>(T));
}

double radam_rho_inf(double beta2) { return 2.0 / (1.0 - beta2) - 1.0; }

double radam_rho_t(double beta2, long t) {
  double b2t = std::pow(beta2, static_cast<double>(t));
  return radam_rho_inf(beta2) -
         2.0 * static_cast<double>(t) * b2t / (1.0 - b2t);
}

UpdateTerms compute_update_terms(const OptimizerSpec& spec,
                                 const OptState& state,
                                 const ParamVector& theta, const ParamVector& g,
                                 long t) {
  const Hyperparams& w = spec.omega;
  const std::size_t L = g.layers.size();
  UpdateTerms out;
  out.m = ParamVector::zeros_like(g);
  out.v = ParamVector::zeros_like(g);
  out.r.assign(L, 1.0);

  const bool adaptive = rule_is_adaptive(spec.rule);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t i = 0; i < g.layers[l].size(); ++i) {
      double gi = g.layers[l][i];
      double mp = state.m.layers[l][i];
      double vp = state.v.layers[l][i];
      if (adaptive) {
        out.m.layers[l][i] = w.beta1 * mp + (1.0 - w.beta1) * gi;
        if (spec.rule == Rule::yogi) {
          double g2 = gi * gi;
          double sgn = vp > g2 ? 1.0 : (vp < g2 ? -1.0 : 0.0);
          out.v.layers[l][i] = vp - (1.0 - w.beta2) * sgn * g2;
        } else {
          out.v.layers[l][i] = w.beta2 * vp + (1.0 - w.beta2) * gi * gi;
        }
      } else {
        out.m.layers[l][i] = w.mu * mp + gi;
        out.v.layers[l][i] = 1.0;
      }
    }
  }

  switch (spec.rule) {
    case Rule::sgdm:
      out.use_adaptive_denominator = false;
      break;
    case Rule::lars: {
      out.use_adaptive_denominator = false;
      for (std::size_t l = 0; l < L; ++l) {
        double tn = layer_norm(theta.layers[l]);
        double mn = layer_norm(out.m.layers[l]);
        out.r[l] = (tn > 0.0 && mn > 0.0) ? tn / mn : 1.0;
      }
      break;
    }
    case Rule::lamb: {
      for (std::size_t l = 0; l < L; ++l) {
        double tn = layer_norm(theta.layers[l]);
        double un = 0.0;
        for (std::size_t i = 0; i < out.m.layers[l].size(); ++i) {
          double u = out.m.layers[l][i] /
                     (std::sqrt(out.v.layers[l][i]) + w.eps);
          un += u * u;
        }
        un = std::sqrt(un);
        out.r[l] = (tn > 0.0 && un > 0.0) ? tn / un : 1.0;
      }
      break;
    }
    case Rule::radam: {
      double rho_t = radam_rho_t(w.beta2, t);
      double rho_inf = radam_rho_inf(w.beta2);
      if (rho_t > 4.0) {
        double num = (rho_t - 4.0) * (rho_t - 2.0) * rho_inf;
        double den = (rho_inf - 4.0) * (rho_inf - 2.0) * rho_t;
        double r = std::sqrt(num / den);
        for (auto& ri : out.r) ri = r;
      } else {
        // Not enough variance history: fall back to the plain momentum step.
        out.use_adaptive_denominator = false;
      }
      break;
    }
    default:
      break;
  }
  return out;
}

namespace {

void apply_update(ParamVector& theta, const UpdateTerms& terms, double alpha,
                  double eps) {
  for (std::size_t l = 0; l < theta.layers.size(); ++l) {
    for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
      double denom = terms.use_adaptive_denominator
                         ? std::sqrt(terms.v.layers[l][i]) + eps
                         : 1.0;
      theta.layers[l][i] -=
          alpha * terms.r[l] * terms.m.layers[l][i] / denom;
    }
  }
}

}  // namespace

bool step(const OptimizerSpec& spec, OptState& state, ParamVector& theta,
          const ParamVector& g, long t, long T) {
  if (!g.finite()) return false;
  double alpha = schedule_lr(spec.omega, t, T);
  if (spec.rule == Rule::lookahead) {
    // Inner Adam step on the fast weights.
    OptimizerSpec inner{Rule::adam, spec.omega};
    UpdateTerms terms = compute_update_terms(inner, state, theta, g, t);
    apply_update(theta, terms, alpha, spec.omega.eps);
    state.m = std::move(terms.m);
    state.v = std::move(terms.v);
    state.t = t;
    if (++state.inner_counter >= spec.omega.lookahead_k) {
      state.inner_counter = 0;
      for (std::size_t l = 0; l < theta.layers.size(); ++l)
        for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
          double slow = state.slow_weights.layers[l][i];
          slow += spec.omega.lookahead_alpha_s *
                  (theta.layers[l][i] - slow);
          state.slow_weights.layers[l][i] = slow;
          theta.layers[l][i] = slow;
        }
    }
    return true;
  }
  UpdateTerms terms = compute_update_terms(spec, state, theta, g, t);
  apply_update(theta, terms, alpha, spec.omega.eps);
  state.m = std::move(terms.m);
  state.v = std::move(terms.v);
  state.t = t;
  return true;
}

}  // namespace optbench
