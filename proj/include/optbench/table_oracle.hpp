#pragma once

#include <cmath>
#include <vector>

#include "optbench/optimizers.hpp"

// Straight-line reference transcriptions of each update rule, written
// independently of the production engine. The verification suite and the
// conformance tests compare optimizer trajectories against these.
namespace optbench::oracle {

inline double ref_lr(const Hyperparams& w, long t, long T) {
  if (w.schedule == Schedule::constant) return w.alpha0;
  return w.alpha0 - (1.0 - w.gamma) * w.alpha0 * (double(t) / double(T));
}

// Applies `grads` one step each from theta and returns the iterate after
// every step.
inline std::vector<ParamVector> run_reference(
    Rule rule, const Hyperparams& w, ParamVector theta,
    const std::vector<ParamVector>& grads, long T) {
  std::vector<ParamVector> out;
  const std::size_t L = theta.layers.size();
  ParamVector m = ParamVector::zeros_like(theta);
  ParamVector v = ParamVector::zeros_like(theta);
  ParamVector slow = theta;
  int inner = 0;

  for (long t = 1; t <= static_cast<long>(grads.size()); ++t) {
    const ParamVector& g = grads[t - 1];
    const double a = ref_lr(w, t, T);
    switch (rule) {
      case Rule::sgdm:
        for (std::size_t l = 0; l < L; ++l)
          for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
            m.layers[l][i] = w.mu * m.layers[l][i] + g.layers[l][i];
            theta.layers[l][i] -= a * m.layers[l][i];
          }
        break;
      case Rule::adam:
        for (std::size_t l = 0; l < L; ++l)
          for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
            m.layers[l][i] =
                w.beta1 * m.layers[l][i] + (1 - w.beta1) * g.layers[l][i];
            v.layers[l][i] = w.beta2 * v.layers[l][i] +
                             (1 - w.beta2) * g.layers[l][i] * g.layers[l][i];
            theta.layers[l][i] -=
                a * m.layers[l][i] / (std::sqrt(v.layers[l][i]) + w.eps);
          }
        break;
      case Rule::radam: {
        double rho_inf = 2.0 / (1.0 - w.beta2) - 1.0;
        double b2t = std::pow(w.beta2, double(t));
        double rho_t = rho_inf - 2.0 * double(t) * b2t / (1.0 - b2t);
        for (std::size_t l = 0; l < L; ++l)
          for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
            m.layers[l][i] =
                w.beta1 * m.layers[l][i] + (1 - w.beta1) * g.layers[l][i];
            v.layers[l][i] = w.beta2 * v.layers[l][i] +
                             (1 - w.beta2) * g.layers[l][i] * g.layers[l][i];
          }
        if (rho_t > 4.0) {
          double r = std::sqrt((rho_t - 4) * (rho_t - 2) * rho_inf /
                               ((rho_inf - 4) * (rho_inf - 2) * rho_t));
          for (std::size_t l = 0; l < L; ++l)
            for (std::size_t i = 0; i < theta.layers[l].size(); ++i)
              theta.layers[l][i] -= a * r * m.layers[l][i] /
                                    (std::sqrt(v.layers[l][i]) + w.eps);
        } else {
          for (std::size_t l = 0; l < L; ++l)
            for (std::size_t i = 0; i < theta.layers[l].size(); ++i)
              theta.layers[l][i] -= a * m.layers[l][i];
        }
        break;
      }
      case Rule::yogi:
        for (std::size_t l = 0; l < L; ++l)
          for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
            double gi = g.layers[l][i];
            m.layers[l][i] = w.beta1 * m.layers[l][i] + (1 - w.beta1) * gi;
            double g2 = gi * gi;
            double diff = v.layers[l][i] - g2;
            double sgn = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
            v.layers[l][i] = v.layers[l][i] - (1 - w.beta2) * sgn * g2;
            theta.layers[l][i] -=
                a * m.layers[l][i] / (std::sqrt(v.layers[l][i]) + w.eps);
          }
        break;
      case Rule::lars:
        for (std::size_t l = 0; l < L; ++l) {
          double tn = 0, mn = 0;
          for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
            m.layers[l][i] = w.mu * m.layers[l][i] + g.layers[l][i];
            tn += theta.layers[l][i] * theta.layers[l][i];
            mn += m.layers[l][i] * m.layers[l][i];
          }
          tn = std::sqrt(tn);
          mn = std::sqrt(mn);
          double r = (tn > 0 && mn > 0) ? tn / mn : 1.0;
          for (std::size_t i = 0; i < theta.layers[l].size(); ++i)
            theta.layers[l][i] -= a * r * m.layers[l][i];
        }
        break;
      case Rule::lamb:
        for (std::size_t l = 0; l < L; ++l) {
          double tn = 0, un = 0;
          std::vector<double> u(theta.layers[l].size());
          for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
            double gi = g.layers[l][i];
            m.layers[l][i] = w.beta1 * m.layers[l][i] + (1 - w.beta1) * gi;
            v.layers[l][i] =
                w.beta2 * v.layers[l][i] + (1 - w.beta2) * gi * gi;
            u[i] = m.layers[l][i] / (std::sqrt(v.layers[l][i]) + w.eps);
            tn += theta.layers[l][i] * theta.layers[l][i];
            un += u[i] * u[i];
          }
          tn = std::sqrt(tn);
          un = std::sqrt(un);
          double r = (tn > 0 && un > 0) ? tn / un : 1.0;
          for (std::size_t i = 0; i < theta.layers[l].size(); ++i)
            theta.layers[l][i] -= a * r * u[i];
        }
        break;
      case Rule::lookahead:
        for (std::size_t l = 0; l < L; ++l)
          for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
            m.layers[l][i] =
                w.beta1 * m.layers[l][i] + (1 - w.beta1) * g.layers[l][i];
            v.layers[l][i] = w.beta2 * v.layers[l][i] +
                             (1 - w.beta2) * g.layers[l][i] * g.layers[l][i];
            theta.layers[l][i] -=
                a * m.layers[l][i] / (std::sqrt(v.layers[l][i]) + w.eps);
          }
        if (++inner >= w.lookahead_k) {
          inner = 0;
          for (std::size_t l = 0; l < L; ++l)
            for (std::size_t i = 0; i < theta.layers[l].size(); ++i) {
              slow.layers[l][i] +=
                  w.lookahead_alpha_s * (theta.layers[l][i] - slow.layers[l][i]);
              theta.layers[l][i] = slow.layers[l][i];
            }
        }
        break;
    }
    out.push_back(theta);
  }
  return out;
}

}  // namespace optbench::oracle
