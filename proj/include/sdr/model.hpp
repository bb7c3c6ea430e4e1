#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "sdr/kernel.hpp"
#include "sdr/loss.hpp"
#include "sdr/trainer.hpp"

namespace sdr {

/// Dual coefficients at or above this threshold count as support vectors;
/// smaller ones are pruned when a model is saved.
inline constexpr double kSupportThreshold = 1e-6;

inline constexpr const char* kModelFormatVersion = "sdr-svm/1";

/// Self-contained trained classifier: retained support vectors, offset,
/// rejection half-width and the feature standardization captured at data
/// load time (empty mean/scale = identity).
struct SavedModel {
  KernelSpec kernel;
  LossConfig loss;
  Eigen::MatrixXd supportX;     ///< one retained training input per row (standardized space)
  Eigen::VectorXd supportAlpha; ///< all >= kSupportThreshold
  Eigen::VectorXi supportY;     ///< labels of the retained inputs
  double b = 0.0;
  double rho = 0.0;
  Eigen::VectorXd mean;         ///< per-feature shift applied before the kernel
  Eigen::VectorXd scale;        ///< per-feature factor; 0 marks a dropped (constant) column
  std::string configDigest;     ///< free-form training configuration summary

  Eigen::Index featureDim() const { return supportX.cols() > 0 ? supportX.cols() : mean.size(); }
};

/// Number of entries of alpha at or above kSupportThreshold.
int supportCount(const Eigen::Ref<const Eigen::VectorXd>& alpha);

/// Assembles a saved model from trained parameters, pruning coefficients
/// below kSupportThreshold. `features` must be the matrix the model was
/// trained on (already standardized when mean/scale are supplied).
SavedModel buildSavedModel(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& features,
                           const Eigen::Ref<const Eigen::VectorXi>& labels, const KernelSpec& kernel,
                           const LossConfig& loss, const Eigen::VectorXd& mean = {},
                           const Eigen::VectorXd& scale = {}, std::string configDigest = {});

/// f(x) = sum_j alpha_j y_j K(x_j, x') + b over the retained support vectors,
/// where x' is x standardized by the stored mean/scale.
double decisionValue(const SavedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Three-way prediction: +1 if f(x) > rho, 0 if |f(x)| <= rho, -1 otherwise.
int predict(const SavedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

void save(const SavedModel& model, std::ostream& os);
void saveFile(const SavedModel& model, const std::string& path);
SavedModel load(std::istream& is);
SavedModel loadFile(const std::string& path);

}  // namespace sdr
