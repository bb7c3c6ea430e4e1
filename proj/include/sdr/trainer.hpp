#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "sdr/kernel.hpp"
#include "sdr/loss.hpp"
#include "sdr/lp.hpp"

namespace sdr {

/// Classifier parameters: per-point dual coefficients, offset and rejection
/// half-width. The decision value is f(x) = sum_j alpha_j y_j K(x_j, x) + b,
/// so evaluating f needs the training inputs and labels alongside.
struct ModelParams {
  Eigen::VectorXd alpha;  ///< nonnegative, one per training point
  double b = 0.0;
  double rho = 0.0;       ///< >= mu(1+mu)/2
};

struct TrainConfig {
  double lambda = 0.1;        ///< l1 regularization weight, > 0
  LossConfig loss;
  double epsilon = 1e-5;      ///< stop when the objective drop falls to this
  int maxDcIters = 50;
  int lpIterCap = 0;          ///< per-subproblem simplex cap; 0 = solver default
  std::string dumpLpPrefix;   ///< when nonempty, write each subproblem to <prefix><iter>.lp

  void validate() const {
    loss.validate();
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (maxDcIters < 1) throw ConfigError("maxDcIters must be at least 1");
  }
};

enum class Termination { converged, iterCap, lpUnbounded };

std::string toString(Termination t);

struct TrainReport {
  std::vector<double> objectiveTrace;  ///< J at the start plus after each accepted step
  int iterations = 0;                  ///< number of LP solves
  Termination termination = Termination::converged;
  double wallTimeSec = 0.0;
  long lpIterationsTotal = 0;
};

/// Raised when a subproblem comes back unbounded or a subproblem solve gives
/// up; carries the failing iteration and the progress made so far.
struct TrainingError : Error {
  TrainingError(const std::string& msg, int iteration, TrainReport report)
      : Error(msg), iteration(iteration), report(std::move(report)) {}
  int iteration;
  TrainReport report;
};

/// Margins t_i = y_i f(x_i) computed from the Gram matrix (training-time
/// evaluation never re-applies the kernel).
Eigen::VectorXd trainingMargins(const ModelParams& theta, const Eigen::Ref<const Eigen::MatrixXd>& gram,
                                const Eigen::Ref<const Eigen::VectorXi>& labels);

/// Regularized empirical objective
///   J = lambda * sum_i alpha_i + (1/N) sum_i L_dr(y_i f(x_i), rho).
double objectiveJ(const ModelParams& theta, const Eigen::Ref<const Eigen::MatrixXd>& gram,
                  const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg);

/// Convex parts of the objective, J = q1 - q2. Exposed so the descent and
/// majorization guarantees can be checked directly.
double objectiveQ1(const ModelParams& theta, const Eigen::Ref<const Eigen::MatrixXd>& gram,
                   const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg);
double objectiveQ2(const ModelParams& theta, const Eigen::Ref<const Eigen::MatrixXd>& gram,
                   const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg);

/// The convex upper bound minimized at each step: q1(theta) - q2(anchor)
/// - (theta - anchor) . grad q2(anchor). Tight at theta = anchor.
double majorizer(const ModelParams& theta, const ModelParams& anchor,
                 const Eigen::Ref<const Eigen::MatrixXd>& gram,
                 const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg);

/// Active-ramp indicators at the current iterate:
///   beta1_i = [y_i f(x_i) <= rho - mu^2],  beta2_i = [y_i f(x_i) <= -rho - mu^2].
/// beta2_i = 1 implies beta1_i = 1.
std::pair<Eigen::VectorXi, Eigen::VectorXi> computeIndicators(const ModelParams& theta,
                                                              const Eigen::Ref<const Eigen::MatrixXd>& gram,
                                                              const Eigen::Ref<const Eigen::VectorXi>& labels,
                                                              const TrainConfig& cfg);

/// Column layout of the subproblem variables (alpha block, offset, rho, then
/// the two slack blocks).
struct SubproblemLayout {
  Eigen::Index n = 0;
  Eigen::Index alphaStart = 0;
  Eigen::Index bCol = 0;
  Eigen::Index rhoCol = 0;
  Eigen::Index slack1Start = 0;
  Eigen::Index slack2Start = 0;
};

struct Subproblem {
  lp::RawLp raw;
  SubproblemLayout layout;
};

/// Linearized convex subproblem over (alpha >= 0, b free, rho >= mu(1+mu)/2,
/// slacks >= 0) with 2N margin constraints.
Subproblem buildSubproblem(const Eigen::Ref<const Eigen::VectorXi>& beta1,
                           const Eigen::Ref<const Eigen::VectorXi>& beta2,
                           const Eigen::Ref<const Eigen::MatrixXd>& gram,
                           const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg);

struct TrainOutcome {
  ModelParams params;
  TrainReport report;
};

/// Minimizes J by solving successive linear programs until the objective
/// drop falls to epsilon or the iteration cap is reached. The objective
/// trace is non-increasing.
TrainOutcome train(const Eigen::Ref<const Eigen::MatrixXd>& features,
                   const Eigen::Ref<const Eigen::VectorXi>& labels, const KernelSpec& kernel,
                   const TrainConfig& cfg);

/// Same, but with a precomputed Gram matrix.
TrainOutcome trainWithGram(const Eigen::Ref<const Eigen::MatrixXd>& gram,
                           const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg);

}  // namespace sdr
