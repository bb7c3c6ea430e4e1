#include "sdr/kernel.hpp"

namespace sdr {

std::string toString(KernelFamily family) {
  return family == KernelFamily::gaussian ? "gaussian" : "linear";
}

KernelFamily kernelFamilyFromString(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "linear") return KernelFamily::linear;
  throw ConfigError("unknown kernel family '" + name + "' (expected gaussian or linear)");
}

double evalKernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& y) {
  spec.validate();
  if (x.size() != y.size()) {
    throw ShapeError("kernel arguments have dimensions " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()));
  }
  if (spec.family == KernelFamily::linear) return x.dot(y);
  return std::exp(-spec.gamma * (x - y).squaredNorm());
}

Eigen::MatrixXd gramMatrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& data) {
  spec.validate();
  const Eigen::Index n = data.rows();
  if (n == 0) throw ShapeError("gramMatrix requires a nonempty data matrix");
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = evalKernel(spec, data.row(i).transpose(), data.row(j).transpose());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace sdr
