#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdr/loss.hpp"

namespace sdr::theory {

/// Parameter grid for the numerical verification of the loss's statistical
/// properties.
struct TheoryGrid {
  std::vector<double> etaValues;
  std::vector<double> dValues;
  std::vector<double> muValues;
  double zStep = 1e-3;
  std::vector<double> rhoSweep;  ///< extra half-widths on top of the per-mu default
};

/// eta step 0.01, d in {0.05..0.45}, mu in {0.25, 0.5, 1}, z step 1e-3,
/// rho sweep {1, 2, 5}.
TheoryGrid defaultGrid();

/// Default half-width used by the checks: max(mu, mu(1+mu)/2). The reject
/// plateau of the conditional risk is empty below mu, so this is the
/// smallest width for which the closed-form minimum is attainable.
double defaultRho(const LossConfig& cfg);

struct CheckReport {
  std::string name;
  long cases = 0;
  long violations = 0;
  double worstGap = 0.0;             ///< most negative slack seen (0 when clean)
  std::vector<std::string> samples;  ///< up to ten offending grid points
  bool pass() const { return violations == 0; }
};

/// Closed-form conditional double-ramp risk, written as the nine-piece
/// case table in z. Valid for rho >= mu; used as the cross-check oracle for
/// loss::conditionalRisk.
double conditionalRiskPiecewise(double eta, double z, double rho, const LossConfig& cfg);

/// Conditional reject-loss risk of the pointwise-optimal rule and its
/// region-restricted counterparts.
double xiRisk(double eta, const LossConfig& cfg);                 ///< xi(eta)
double xiRegion(double eta, int region, const LossConfig& cfg);   ///< xi_{-1} / xi_r / xi_{+1}
double hRisk(double eta, const LossConfig& cfg);                  ///< H(eta) = (1+mu) xi(eta)
/// inf of the conditional double-ramp risk over z restricted to the region
/// (-1: z < -rho, 0: |z| <= rho, +1: z > rho); closed form via the corner
/// values of the piecewise-linear risk, independent of rho for rho >= mu.
double hRegion(double eta, int region, const LossConfig& cfg);

/// Brute-force minimum of conditionalRisk over the z grid matches the
/// closed-form optimum within 1e-6, and every argmin lies in the predicted
/// region (ties at eta in {d, 1-d} excluded from the region check).
CheckReport verifyFisherConsistency(const TheoryGrid& grid);

/// The three region inequalities xi_r(eta) <= H_r(eta) - H(eta) etc. hold
/// within 1e-9, and the closed forms agree with constrained grid search
/// within 1e-6.
CheckReport verifyProposition2(const TheoryGrid& grid);

/// Monte Carlo check that the reject-loss excess risk never exceeds the
/// double-ramp excess risk beyond 3 combined standard errors, over random
/// linear scorers on the default mixtures.
CheckReport verifyTheorem3(int trialsPerDistribution, int samplesPerTrial, std::uint64_t seed);

/// rejectLoss <= doubleRampLoss pointwise, exact comparison on random draws.
CheckReport verifySurrogateBound(long numPoints, std::uint64_t seed);

/// The nine-piece table and the definition of the conditional risk agree to
/// within 1e-12 on random draws.
CheckReport verifyPiecewiseAgreement(long numPoints, std::uint64_t seed);

/// Runs all checks on default settings.
std::vector<CheckReport> runAllChecks(const TheoryGrid& grid, int theorem3Trials, int theorem3Samples,
                                      long surrogatePoints, std::uint64_t seed);

void printReports(const std::vector<CheckReport>& reports, std::ostream& os);
void writeReportsJson(const std::vector<CheckReport>& reports, const std::string& path);
bool allPass(const std::vector<CheckReport>& reports);

}  // namespace sdr::theory
