#include "sdr/model.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sdr {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parseDouble(const std::string& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw CorruptModelError("model file: cannot parse number '" + tok + "'");
  }
  if (used != tok.size()) throw CorruptModelError("model file: trailing characters in number '" + tok + "'");
  return v;
}

std::istringstream lineStream(std::istream& is, const std::string& expectKey) {
  std::string line;
  if (!std::getline(is, line)) throw CorruptModelError("model file truncated before '" + expectKey + "'");
  std::istringstream ls(line);
  std::string key;
  ls >> key;
  if (key != expectKey) {
    throw CorruptModelError("model file: expected '" + expectKey + "', found '" + key + "'");
  }
  return ls;
}

}  // namespace

int supportCount(const Eigen::Ref<const Eigen::VectorXd>& alpha) {
  int count = 0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha(i) >= kSupportThreshold) ++count;
  }
  return count;
}

SavedModel buildSavedModel(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& features,
                           const Eigen::Ref<const Eigen::VectorXi>& labels, const KernelSpec& kernel,
                           const LossConfig& loss, const Eigen::VectorXd& mean, const Eigen::VectorXd& scale,
                           std::string configDigest) {
  if (features.rows() != labels.size() || features.rows() != params.alpha.size()) {
    throw ShapeError("buildSavedModel: features, labels and alpha disagree in count");
  }
  SavedModel m;
  m.kernel = kernel;
  m.loss = loss;
  m.b = params.b;
  m.rho = params.rho;
  m.mean = mean;
  m.scale = scale;
  m.configDigest = std::move(configDigest);

  const int kept = supportCount(params.alpha);
  m.supportX.resize(kept, features.cols());
  m.supportAlpha.resize(kept);
  m.supportY.resize(kept);
  Eigen::Index out = 0;
  for (Eigen::Index i = 0; i < params.alpha.size(); ++i) {
    if (params.alpha(i) >= kSupportThreshold) {
      m.supportX.row(out) = features.row(i);
      m.supportAlpha(out) = params.alpha(i);
      m.supportY(out) = labels(i);
      ++out;
    }
  }
  return m;
}

double decisionValue(const SavedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd z = x;
  if (model.mean.size() > 0) {
    if (model.mean.size() != x.size() || model.scale.size() != x.size()) {
      throw ShapeError("input dimension " + std::to_string(x.size()) + " does not match model dimension " +
                       std::to_string(model.mean.size()));
    }
    z = (x - model.mean).cwiseProduct(model.scale);
  }
  if (model.supportX.rows() > 0 && model.supportX.cols() != z.size()) {
    throw ShapeError("input dimension " + std::to_string(z.size()) + " does not match support vectors of width " +
                     std::to_string(model.supportX.cols()));
  }
  double f = model.b;
  for (Eigen::Index j = 0; j < model.supportX.rows(); ++j) {
    f += model.supportAlpha(j) * static_cast<double>(model.supportY(j)) *
         evalKernel(model.kernel, model.supportX.row(j).transpose(), z);
  }
  return f;
}

int predict(const SavedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double f = decisionValue(model, x);
  if (f > model.rho) return 1;
  if (f < -model.rho) return -1;
  return 0;
}

void save(const SavedModel& model, std::ostream& os) {
  os << kModelFormatVersion << "\n";
  os << "kernel " << toString(model.kernel.family) << " " << fmt(model.kernel.gamma) << "\n";
  os << "loss " << fmt(model.loss.d) << " " << fmt(model.loss.mu) << "\n";
  os << "b " << fmt(model.b) << "\n";
  os << "rho " << fmt(model.rho) << "\n";
  os << "dim " << model.supportX.cols() << "\n";
  os << "standardize " << (model.mean.size() > 0 ? 1 : 0) << "\n";
  if (model.mean.size() > 0) {
    os << "mean";
    for (Eigen::Index j = 0; j < model.mean.size(); ++j) os << " " << fmt(model.mean(j));
    os << "\nscale";
    for (Eigen::Index j = 0; j < model.scale.size(); ++j) os << " " << fmt(model.scale(j));
    os << "\n";
  }
  os << "config " << model.configDigest << "\n";
  os << "nsv " << model.supportX.rows() << "\n";
  for (Eigen::Index i = 0; i < model.supportX.rows(); ++i) {
    os << "sv " << model.supportY(i) << " " << fmt(model.supportAlpha(i));
    for (Eigen::Index j = 0; j < model.supportX.cols(); ++j) os << " " << fmt(model.supportX(i, j));
    os << "\n";
  }
  os << "end\n";
}

void saveFile(const SavedModel& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  save(model, os);
  if (!os) throw DataError("failed while writing '" + path + "'");
}

SavedModel load(std::istream& is) {
  std::string version;
  if (!std::getline(is, version)) throw CorruptModelError("empty model payload");
  if (version != kModelFormatVersion) {
    throw VersionMismatchError("unsupported model format '" + version + "' (expected " + kModelFormatVersion + ")");
  }

  SavedModel m;
  {
    auto ls = lineStream(is, "kernel");
    std::string family, gamma;
    ls >> family >> gamma;
    if (family.empty() || gamma.empty()) throw CorruptModelError("model file: malformed kernel line");
    m.kernel.family = kernelFamilyFromString(family);
    m.kernel.gamma = parseDouble(gamma);
  }
  {
    auto ls = lineStream(is, "loss");
    std::string d, mu;
    ls >> d >> mu;
    if (d.empty() || mu.empty()) throw CorruptModelError("model file: malformed loss line");
    m.loss.d = parseDouble(d);
    m.loss.mu = parseDouble(mu);
  }
  {
    std::string tok;
    auto ls = lineStream(is, "b");
    ls >> tok;
    m.b = parseDouble(tok);
  }
  {
    std::string tok;
    auto ls = lineStream(is, "rho");
    ls >> tok;
    m.rho = parseDouble(tok);
  }
  Eigen::Index dim = 0;
  {
    auto ls = lineStream(is, "dim");
    if (!(ls >> dim) || dim < 0) throw CorruptModelError("model file: malformed dim line");
  }
  {
    int flag = -1;
    auto ls = lineStream(is, "standardize");
    if (!(ls >> flag) || (flag != 0 && flag != 1)) throw CorruptModelError("model file: malformed standardize line");
    if (flag == 1) {
      m.mean.resize(dim);
      m.scale.resize(dim);
      auto meanLs = lineStream(is, "mean");
      for (Eigen::Index j = 0; j < dim; ++j) {
        std::string tok;
        if (!(meanLs >> tok)) throw CorruptModelError("model file: mean line too short");
        m.mean(j) = parseDouble(tok);
      }
      auto scaleLs = lineStream(is, "scale");
      for (Eigen::Index j = 0; j < dim; ++j) {
        std::string tok;
        if (!(scaleLs >> tok)) throw CorruptModelError("model file: scale line too short");
        m.scale(j) = parseDouble(tok);
      }
    }
  }
  {
    std::string line;
    if (!std::getline(is, line)) throw CorruptModelError("model file truncated before 'config'");
    if (line.rfind("config", 0) != 0) throw CorruptModelError("model file: expected 'config' line");
    m.configDigest = line.size() > 7 ? line.substr(7) : "";
  }
  Eigen::Index nsv = 0;
  {
    auto ls = lineStream(is, "nsv");
    if (!(ls >> nsv) || nsv < 0) throw CorruptModelError("model file: malformed nsv line");
  }
  m.supportX.resize(nsv, dim);
  m.supportAlpha.resize(nsv);
  m.supportY.resize(nsv);
  for (Eigen::Index i = 0; i < nsv; ++i) {
    auto ls = lineStream(is, "sv");
    int y = 0;
    std::string alphaTok;
    if (!(ls >> y >> alphaTok) || (y != 1 && y != -1)) {
      throw CorruptModelError("model file: malformed sv line " + std::to_string(i));
    }
    m.supportY(i) = y;
    m.supportAlpha(i) = parseDouble(alphaTok);
    for (Eigen::Index j = 0; j < dim; ++j) {
      std::string tok;
      if (!(ls >> tok)) throw CorruptModelError("model file: sv line " + std::to_string(i) + " too short");
      m.supportX(i, j) = parseDouble(tok);
    }
  }
  {
    std::string line;
    if (!std::getline(is, line) || line != "end") throw CorruptModelError("model file: missing 'end' marker");
  }
  return m;
}

SavedModel loadFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open model file '" + path + "'");
  return load(is);
}

}  // namespace sdr
