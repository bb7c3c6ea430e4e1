#include "sdr/trainer.hpp"

#include <chrono>
#include <fstream>

namespace sdr {

namespace {

void checkShapes(const Eigen::Ref<const Eigen::MatrixXd>& gram, const Eigen::Ref<const Eigen::VectorXi>& labels,
                 const Eigen::VectorXd& alpha) {
  if (gram.rows() != gram.cols()) throw ShapeError("Gram matrix must be square");
  if (gram.rows() != labels.size()) throw ShapeError("Gram matrix and labels disagree in size");
  if (alpha.size() != labels.size()) throw ShapeError("alpha and labels disagree in size");
}

Eigen::VectorXd labelsAsDouble(const Eigen::Ref<const Eigen::VectorXi>& labels) {
  return labels.cast<double>();
}

double positivePart(double a) { return a > 0.0 ? a : 0.0; }

}  // namespace

std::string toString(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::iterCap: return "iter_cap";
    case Termination::lpUnbounded: return "lp_unbounded";
  }
  return "unknown";
}

Eigen::VectorXd trainingMargins(const ModelParams& theta, const Eigen::Ref<const Eigen::MatrixXd>& gram,
                                const Eigen::Ref<const Eigen::VectorXi>& labels) {
  checkShapes(gram, labels, theta.alpha);
  const Eigen::VectorXd y = labelsAsDouble(labels);
  const Eigen::VectorXd f = gram * theta.alpha.cwiseProduct(y) + Eigen::VectorXd::Constant(labels.size(), theta.b);
  return y.cwiseProduct(f);
}

double objectiveJ(const ModelParams& theta, const Eigen::Ref<const Eigen::MatrixXd>& gram,
                  const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg) {
  const Eigen::VectorXd t = trainingMargins(theta, gram, labels);
  double lossSum = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) lossSum += doubleRampLoss(t(i), theta.rho, cfg.loss);
  return cfg.lambda * theta.alpha.sum() + lossSum / static_cast<double>(t.size());
}

double objectiveQ1(const ModelParams& theta, const Eigen::Ref<const Eigen::MatrixXd>& gram,
                   const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg) {
  const Eigen::VectorXd t = trainingMargins(theta, gram, labels);
  const double d = cfg.loss.d, mu = cfg.loss.mu;
  const double scale = 1.0 / (static_cast<double>(t.size()) * mu);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    acc += d * positivePart(mu - t(i) + theta.rho) + (1.0 - d) * positivePart(mu - t(i) - theta.rho);
  }
  return cfg.lambda * theta.alpha.sum() + scale * acc;
}

double objectiveQ2(const ModelParams& theta, const Eigen::Ref<const Eigen::MatrixXd>& gram,
                   const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg) {
  const Eigen::VectorXd t = trainingMargins(theta, gram, labels);
  const double d = cfg.loss.d, mu = cfg.loss.mu;
  const double scale = 1.0 / (static_cast<double>(t.size()) * mu);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    acc += d * positivePart(-mu * mu - t(i) + theta.rho) + (1.0 - d) * positivePart(-mu * mu - t(i) - theta.rho);
  }
  return scale * acc;
}

std::pair<Eigen::VectorXi, Eigen::VectorXi> computeIndicators(const ModelParams& theta,
                                                              const Eigen::Ref<const Eigen::MatrixXd>& gram,
                                                              const Eigen::Ref<const Eigen::VectorXi>& labels,
                                                              const TrainConfig& cfg) {
  const Eigen::VectorXd t = trainingMargins(theta, gram, labels);
  const double mu = cfg.loss.mu;
  const double upper = theta.rho - mu * mu;
  const double lower = -theta.rho - mu * mu;
  Eigen::VectorXi beta1(t.size()), beta2(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    beta1(i) = t(i) <= upper ? 1 : 0;
    beta2(i) = t(i) <= lower ? 1 : 0;
  }
  return {beta1, beta2};
}

namespace {

/// Subgradient of q2 over the stacked coordinates (alpha_1..alpha_N, b, rho).
Eigen::VectorXd gradQ2(const Eigen::Ref<const Eigen::VectorXi>& beta1, const Eigen::Ref<const Eigen::VectorXi>& beta2,
                       const Eigen::Ref<const Eigen::MatrixXd>& gram, const Eigen::Ref<const Eigen::VectorXi>& labels,
                       const TrainConfig& cfg) {
  const Eigen::Index n = labels.size();
  const double d = cfg.loss.d, mu = cfg.loss.mu;
  const double scale = 1.0 / (static_cast<double>(n) * mu);
  const Eigen::VectorXd y = labelsAsDouble(labels);
  const Eigen::VectorXd w = scale * (d * beta1.cast<double>() + (1.0 - d) * beta2.cast<double>());
  Eigen::VectorXd g(n + 2);
  g.head(n) = -y.cwiseProduct(gram * w.cwiseProduct(y));
  g(n) = -w.dot(y);
  g(n + 1) = scale * (d * beta1.cast<double>().sum() - (1.0 - d) * beta2.cast<double>().sum());
  return g;
}

Eigen::VectorXd stack(const ModelParams& theta) {
  Eigen::VectorXd v(theta.alpha.size() + 2);
  v.head(theta.alpha.size()) = theta.alpha;
  v(theta.alpha.size()) = theta.b;
  v(theta.alpha.size() + 1) = theta.rho;
  return v;
}

}  // namespace

double majorizer(const ModelParams& theta, const ModelParams& anchor,
                 const Eigen::Ref<const Eigen::MatrixXd>& gram,
                 const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg) {
  const auto [beta1, beta2] = computeIndicators(anchor, gram, labels, cfg);
  const Eigen::VectorXd g = gradQ2(beta1, beta2, gram, labels, cfg);
  return objectiveQ1(theta, gram, labels, cfg) - objectiveQ2(anchor, gram, labels, cfg) -
         g.dot(stack(theta) - stack(anchor));
}

Subproblem buildSubproblem(const Eigen::Ref<const Eigen::VectorXi>& beta1,
                           const Eigen::Ref<const Eigen::VectorXi>& beta2,
                           const Eigen::Ref<const Eigen::MatrixXd>& gram,
                           const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = labels.size();
  if (beta1.size() != n || beta2.size() != n) throw ShapeError("indicator vectors must have one entry per point");
  if (gram.rows() != n || gram.cols() != n) throw ShapeError("Gram matrix and labels disagree in size");

  const double d = cfg.loss.d, mu = cfg.loss.mu;
  const double scale = 1.0 / (static_cast<double>(n) * mu);
  const double rhoMin = minFeasibleRho(cfg.loss);
  const Eigen::VectorXd y = labelsAsDouble(labels);
  // Margin matrix M_ij = y_i y_j K(x_i, x_j); row i gives the alpha
  // coefficients of constraint i, and M is symmetric.
  const Eigen::MatrixXd m = (y * y.transpose()).cwiseProduct(gram);

  SubproblemLayout layout;
  layout.n = n;
  layout.alphaStart = 0;
  layout.bCol = n;
  layout.rhoCol = n + 1;
  layout.slack1Start = n + 2;
  layout.slack2Start = 2 * n + 2;
  const Eigen::Index cols = 3 * n + 2;

  lp::RawLp raw;
  raw.c.setZero(cols);
  raw.a.setZero(2 * n, cols);
  raw.rhs.setConstant(2 * n, mu);
  raw.lower.assign(static_cast<std::size_t>(cols), 0.0);
  raw.lower[static_cast<std::size_t>(layout.bCol)] = lp::RawLp::kFree;
  raw.lower[static_cast<std::size_t>(layout.rhoCol)] = rhoMin;

  // Objective: the slack terms of the convex part plus the linearization of
  // the concave part expanded over (alpha, b, rho).
  const Eigen::VectorXd w = scale * (d * beta1.cast<double>() + (1.0 - d) * beta2.cast<double>());
  raw.c.head(n) = Eigen::VectorXd::Constant(n, cfg.lambda) + m * w;
  raw.c(layout.bCol) = w.dot(y);
  raw.c(layout.rhoCol) =
      scale * (-d * beta1.cast<double>().sum() + (1.0 - d) * beta2.cast<double>().sum());
  raw.c.segment(layout.slack1Start, n).setConstant(scale * d);
  raw.c.segment(layout.slack2Start, n).setConstant(scale * (1.0 - d));

  for (Eigen::Index i = 0; i < n; ++i) {
    raw.a.row(i).head(n) = m.row(i);
    raw.a(i, layout.bCol) = y(i);
    raw.a(i, layout.rhoCol) = -1.0;
    raw.a(i, layout.slack1Start + i) = 1.0;

    raw.a.row(n + i).head(n) = m.row(i);
    raw.a(n + i, layout.bCol) = y(i);
    raw.a(n + i, layout.rhoCol) = 1.0;
    raw.a(n + i, layout.slack2Start + i) = 1.0;
  }

  // The subproblem is always feasible; assert it on the canonical point
  // (alpha = 0, b = 0, rho at its bound, slacks covering the remainder).
  Eigen::VectorXd probe = Eigen::VectorXd::Zero(cols);
  probe(layout.rhoCol) = rhoMin;
  probe.segment(layout.slack1Start, n).setConstant(mu + rhoMin);
  probe.segment(layout.slack2Start, n).setConstant(positivePart(mu - rhoMin));
  if (((raw.a * probe - raw.rhs).array() < -1e-9).any()) {
    throw Error("subproblem builder produced an infeasible canonical point");
  }

  return {std::move(raw), layout};
}

TrainOutcome trainWithGram(const Eigen::Ref<const Eigen::MatrixXd>& gram,
                           const Eigen::Ref<const Eigen::VectorXi>& labels, const TrainConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = labels.size();
  if (n < 2) throw DataError("training requires at least two points");
  bool hasPos = false, hasNeg = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels(i) == 1) hasPos = true;
    else if (labels(i) == -1) hasNeg = true;
    else throw DataError("labels must be +1 or -1");
  }
  if (!hasPos || !hasNeg) throw DataError("training requires both classes to be present");

  const auto start = std::chrono::steady_clock::now();
  ModelParams theta;
  theta.alpha = Eigen::VectorXd::Zero(n);
  theta.b = 0.0;
  theta.rho = minFeasibleRho(cfg.loss);

  TrainReport report;
  report.objectiveTrace.push_back(objectiveJ(theta, gram, labels, cfg));

  lp::SolverOptions lpOptions;
  lpOptions.maxIters = cfg.lpIterCap;

  for (int iter = 0; iter < cfg.maxDcIters; ++iter) {
    const auto [beta1, beta2] = computeIndicators(theta, gram, labels, cfg);
    const Subproblem sub = buildSubproblem(beta1, beta2, gram, labels, cfg);
    auto [problem, map] = lp::canonicalize(sub.raw);
    if (!cfg.dumpLpPrefix.empty()) {
      std::ofstream out(cfg.dumpLpPrefix + std::to_string(iter) + ".lp");
      lp::dumpProblem(problem, out);
    }

    lp::LpSolution sol;
    try {
      sol = lp::solveLp(problem, lpOptions);
    } catch (const lp::LpIterationError& e) {
      report.termination = Termination::iterCap;
      report.iterations = iter + 1;
      throw TrainingError(std::string("subproblem simplex gave up: ") + e.what(), iter, report);
    }
    report.lpIterationsTotal += sol.iterations;

    if (sol.status == lp::LpStatus::unbounded) {
      report.termination = Termination::lpUnbounded;
      report.iterations = iter + 1;
      throw TrainingError("subproblem " + std::to_string(iter) +
                              " is unbounded; increase lambda so the regularizer dominates the "
                              "linearized loss terms",
                          iter, report);
    }
    if (sol.status == lp::LpStatus::infeasible) {
      report.iterations = iter + 1;
      throw TrainingError("subproblem " + std::to_string(iter) + " reported infeasible (builder bug)", iter,
                          report);
    }

    const Eigen::VectorXd x = map.reconstruct(sol.x);
    ModelParams next;
    next.alpha = x.head(n).cwiseMax(0.0);
    next.b = x(sub.layout.bCol);
    next.rho = std::max(x(sub.layout.rhoCol), minFeasibleRho(cfg.loss));

    const double prev = report.objectiveTrace.back();
    const double now = objectiveJ(next, gram, labels, cfg);
    theta = next;
    report.objectiveTrace.push_back(now);
    report.iterations = iter + 1;
    if (prev - now <= cfg.epsilon) {
      report.termination = Termination::converged;
      report.wallTimeSec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return {std::move(theta), std::move(report)};
    }
  }
  report.termination = Termination::iterCap;
  report.wallTimeSec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(theta), std::move(report)};
}

TrainOutcome train(const Eigen::Ref<const Eigen::MatrixXd>& features,
                   const Eigen::Ref<const Eigen::VectorXi>& labels, const KernelSpec& kernel,
                   const TrainConfig& cfg) {
  if (features.rows() != labels.size()) throw ShapeError("feature rows and labels disagree in count");
  const Eigen::MatrixXd gram = gramMatrix(kernel, features);
  return trainWithGram(gram, labels, cfg);
}

}  // namespace sdr
