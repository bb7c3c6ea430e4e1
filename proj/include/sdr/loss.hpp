#pragma once

#include <algorithm>
#include <cmath>

#include "sdr/errors.hpp"

namespace sdr {

/// Parameters shared by every loss evaluation: the rejection cost d and the
/// ramp slope mu.
struct LossConfig {
  double d = 0.2;   ///< cost of rejection, must lie in (0, 0.5)
  double mu = 1.0;  ///< slope of the ramps, must lie in (0, 1]

  void validate() const {
    if (!(d > 0.0 && d < 0.5)) {
      throw ConfigError("rejection cost d must lie in (0, 0.5), got " + std::to_string(d));
    }
    if (!(mu > 0.0 && mu <= 1.0)) {
      throw ConfigError("ramp slope mu must lie in (0, 1], got " + std::to_string(mu));
    }
  }
};

/// Smallest rejection half-width for which the double ramp loss describes a
/// valid reject region: rho >= mu(1+mu)/2.
inline double minFeasibleRho(const LossConfig& cfg) { return 0.5 * cfg.mu * (1.0 + cfg.mu); }

inline void requireRho(double rho, const LossConfig& cfg) {
  if (!(rho >= minFeasibleRho(cfg))) {
    throw ConfigError("rho = " + std::to_string(rho) + " is below the feasible bound mu(1+mu)/2 = " +
                      std::to_string(minFeasibleRho(cfg)));
  }
}

inline void requireEta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError("eta must lie in [0, 1], got " + std::to_string(eta));
  }
}

/// Reject-option zero/d/one loss on the margin t = y f(x).
///
/// Returns 1 on a misclassification (t < -rho), d inside the rejection band
/// (|t| <= rho, boundary rejects), and 0 otherwise.
inline double rejectLoss(double t, double rho, const LossConfig& cfg) {
  if (t < -rho) return 1.0;
  if (std::abs(t) <= rho) return cfg.d;
  return 0.0;
}

/// Double ramp loss, the bounded piecewise-linear surrogate of rejectLoss.
///
/// Two ramps of slope d/mu and (1-d)/mu flank a plateau of height d(1+mu)
/// over the rejection band; the loss is 0 for t >= rho+mu and 1+mu for
/// t <= -rho-mu. Requires rho >= mu(1+mu)/2.
inline double doubleRampLoss(double t, double rho, const LossConfig& cfg) {
  requireRho(rho, cfg);
  const double d = cfg.d, mu = cfg.mu;
  const auto pos = [](double a) { return a > 0.0 ? a : 0.0; };
  return (d / mu) * (pos(mu - t + rho) - pos(-mu * mu - t + rho)) +
         ((1.0 - d) / mu) * (pos(mu - t - rho) - pos(-mu * mu - t - rho));
}

/// Pointwise-optimal three-way rule as a function of eta = P(y=1|x):
/// +1 when eta > 1-d, -1 when eta < d, 0 (reject) in between.
inline int bayesDiscriminant(double eta, const LossConfig& cfg) {
  requireEta(eta);
  if (eta > 1.0 - cfg.d) return 1;
  if (eta < cfg.d) return -1;
  return 0;
}

/// Conditional double-ramp risk at score z when P(y=1|x) = eta:
/// eta * L_dr(z, rho) + (1-eta) * L_dr(-z, rho).
inline double conditionalRisk(double eta, double z, double rho, const LossConfig& cfg) {
  requireEta(eta);
  return eta * doubleRampLoss(z, rho, cfg) + (1.0 - eta) * doubleRampLoss(-z, rho, cfg);
}

/// Value of the minimum of conditionalRisk over scores, and the score region
/// attaining it (-1: z <= -rho-mu, 0: |z| <= rho-mu, +1: z >= rho+mu).
struct OptimalRisk {
  double value = 0.0;
  int region = 0;
};

/// Closed-form minimum of the conditional double-ramp risk over z.
///
/// Equals eta(1+mu) / d(1+mu) / (1-eta)(1+mu) on the three eta ranges; ties
/// at eta in {d, 1-d} resolve to the reject region, matching
/// bayesDiscriminant.
inline OptimalRisk optimalConditionalRisk(double eta, const LossConfig& cfg) {
  requireEta(eta);
  const double scale = 1.0 + cfg.mu;
  if (eta < cfg.d) return {eta * scale, -1};
  if (eta > 1.0 - cfg.d) return {(1.0 - eta) * scale, 1};
  return {cfg.d * scale, 0};
}

}  // namespace sdr
