#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sdr/dataset.hpp"
#include "sdr/kernel.hpp"
#include "sdr/loss.hpp"
#include "sdr/model.hpp"
#include "sdr/trainer.hpp"

namespace sdr {

/// Test-set summary. The fields satisfy
///   empirical_risk_d = (1 - rejection_rate)(1 - accuracy_unrejected) + d * rejection_rate;
/// accuracy on the unrejected part is 1 by convention when everything is
/// rejected (allRejected flags that case).
struct EvalMetrics {
  double empiricalRiskD = 0.0;
  double rejectionRate = 0.0;
  double accuracyUnrejected = 1.0;
  bool allRejected = false;
  int supportCount = 0;
  int nTest = 0;
};

EvalMetrics evaluate(const SavedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& rawX,
                     const Eigen::Ref<const Eigen::VectorXi>& labels);

/// Stratified fold assignment; a pure function of (seed, labels, folds).
/// Entry i gives the fold of point i, in [0, folds).
std::vector<int> stratifiedFolds(const Eigen::Ref<const Eigen::VectorXi>& labels, int folds, std::uint64_t seed);

struct CvPlan {
  int folds = 10;
  int repeats = 1;
  std::uint64_t seed = 0;
  std::vector<double> dGrid;
  std::vector<double> lambdaGrid;
  std::vector<double> gammaGrid;   ///< ignored for the linear kernel
  KernelFamily family = KernelFamily::gaussian;
  double mu = 1.0;
  double epsilon = 1e-5;
  int maxDcIters = 50;
  double noiseRate = 0.0;          ///< label noise applied to training folds only
  int threads = 1;

  void validate(Eigen::Index n) const;
};

struct CvRecord {
  double d = 0.0, lambda = 0.0, gamma = 0.0;
  int fold = 0, repeat = 0;
  EvalMetrics metrics;
};

/// Best hyperparameters for one rejection cost plus fold statistics of the
/// winning pair.
struct CvSelection {
  double d = 0.0;
  double lambda = 0.0, gamma = 0.0;
  double riskMean = 0.0, riskStd = 0.0;
  double rejectionMean = 0.0, rejectionStd = 0.0;
  double accuracyMean = 0.0, accuracyStd = 0.0;
  double supportMean = 0.0, supportStd = 0.0;
  int evaluations = 0;
};

struct CvResult {
  std::vector<CvRecord> records;       ///< one per d x lambda x gamma x fold x repeat
  std::vector<CvSelection> selections; ///< one per d
  std::vector<std::string> warnings;   ///< skipped degenerate folds etc.
};

/// Grid-search cross-validation over (lambda, gamma) for every rejection
/// cost in the plan. Metrics come from clean test folds; when
/// plan.noiseRate > 0 the training folds see flipped labels.
CvResult crossValidate(const Eigen::Ref<const Eigen::MatrixXd>& features,
                       const Eigen::Ref<const Eigen::VectorXi>& labels, const CvPlan& plan);

/// Flips each label independently with the given probability; features are
/// untouched. rate must lie in [0, 0.5).
Eigen::VectorXi injectLabelNoise(const Eigen::Ref<const Eigen::VectorXi>& labels, double rate, std::uint64_t seed);

/// One-dimensional two-Gaussian mixture with closed-form eta(x).
struct MixtureSpec {
  std::string name;
  double pPos = 0.5;
  double meanPos = 1.0, sdPos = 1.0;
  double meanNeg = -1.0, sdNeg = 1.0;

  double eta(double x) const;
  double sampleX(std::mt19937_64& gen) const;
  int sampleLabel(std::mt19937_64& gen, double x) const;
};

/// The three mixtures used by the excess-risk checks.
std::vector<MixtureSpec> defaultMixtures();

struct ExcessRisk {
  double excessD = 0.0;        ///< estimated reject-loss risk gap to the optimal rule
  double excessDr = 0.0;       ///< estimated double-ramp risk gap to the optimal rule
  double seCombined = 0.0;     ///< standard error of (excessDr - excessD)
};

/// Monte Carlo estimate of both excess risks for the scorer f with
/// half-width rho, against the analytically optimal rule of the mixture.
/// Common samples are used for all four risk terms.
ExcessRisk excessRiskCheck(const MixtureSpec& dist, const std::function<double(double)>& f, double rho,
                           const LossConfig& cfg, int nSamples, std::uint64_t seed);

/// CSV emission with a fixed header and %.17g number formatting, so equal
/// results give byte-identical files.
void writeRecordsCsv(const std::string& path, const std::vector<CvRecord>& records);
void writeSummaryCsv(const std::string& path, const std::vector<CvSelection>& selections);

}  // namespace sdr
