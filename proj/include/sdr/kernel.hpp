#pragma once

#include <Eigen/Dense>
#include <string>

#include "sdr/errors.hpp"

namespace sdr {

enum class KernelFamily { gaussian, linear };

/// Kernel family plus hyperparameters. gamma is the Gaussian width and is
/// ignored for the linear kernel.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double gamma = 1.0;

  void validate() const {
    if (family == KernelFamily::gaussian && !(gamma > 0.0)) {
      throw ConfigError("gaussian kernel requires gamma > 0, got " + std::to_string(gamma));
    }
  }
};

std::string toString(KernelFamily family);
KernelFamily kernelFamilyFromString(const std::string& name);

/// K(x, y): exp(-gamma ||x-y||^2) for the Gaussian family, x.y for linear.
double evalKernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& y);

/// Dense Gram matrix of the rows of `data`. The upper triangle is computed
/// once and mirrored, so the result is exactly symmetric.
Eigen::MatrixXd gramMatrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& data);

}  // namespace sdr
