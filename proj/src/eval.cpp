#include "sdr/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <thread>

#include "sdr/random.hpp"

namespace sdr {

EvalMetrics evaluate(const SavedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& rawX,
                     const Eigen::Ref<const Eigen::VectorXi>& labels) {
  const Eigen::Index n = rawX.rows();
  if (n == 0) throw DomainError("evaluate: empty test set");
  if (labels.size() != n) throw ShapeError("evaluate: features and labels disagree in count");

  int rejected = 0, correct = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int p = predict(model, rawX.row(i).transpose());
    if (p == 0) {
      ++rejected;
    } else if (p == labels(i)) {
      ++correct;
    }
  }
  EvalMetrics m;
  m.nTest = static_cast<int>(n);
  m.supportCount = static_cast<int>(model.supportAlpha.size());
  m.rejectionRate = static_cast<double>(rejected) / static_cast<double>(n);
  m.allRejected = rejected == static_cast<int>(n);
  m.accuracyUnrejected =
      m.allRejected ? 1.0 : static_cast<double>(correct) / static_cast<double>(n - rejected);
  const int wrong = static_cast<int>(n) - rejected - correct;
  m.empiricalRiskD = (static_cast<double>(wrong) + model.loss.d * static_cast<double>(rejected)) /
                     static_cast<double>(n);
  return m;
}

std::vector<int> stratifiedFolds(const Eigen::Ref<const Eigen::VectorXi>& labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw DomainError("stratifiedFolds: need at least 2 folds");
  std::vector<int> assignment(static_cast<std::size_t>(labels.size()), 0);
  std::size_t offset = 0;  // rolling start so small classes still spread over all folds
  for (const int cls : {+1, -1}) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      if (labels(i) == cls) idx.push_back(i);
    }
    std::mt19937_64 gen(mixSeed(seed, cls == 1 ? 0x706f73ULL : 0x6e6567ULL));
    deterministicShuffle(idx, gen);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      assignment[static_cast<std::size_t>(idx[r])] =
          static_cast<int>((offset + r) % static_cast<std::size_t>(folds));
    }
    offset += idx.size();
  }
  return assignment;
}

void CvPlan::validate(Eigen::Index n) const {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (folds > n) throw ConfigError("more folds than data points");
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  if (dGrid.empty() || lambdaGrid.empty()) throw ConfigError("d and lambda grids must be nonempty");
  if (family == KernelFamily::gaussian && gammaGrid.empty()) {
    throw ConfigError("gamma grid must be nonempty for the gaussian kernel");
  }
  for (const double d : dGrid) LossConfig{d, mu}.validate();
}

Eigen::VectorXi injectLabelNoise(const Eigen::Ref<const Eigen::VectorXi>& labels, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 0.5)) throw DomainError("noise rate must lie in [0, 0.5)");
  Eigen::VectorXi noisy = labels;
  std::mt19937_64 gen(mixSeed(seed, 0x6e6f697365ULL));
  for (Eigen::Index i = 0; i < noisy.size(); ++i) {
    if (uniformReal(gen) < rate) noisy(i) = -noisy(i);
  }
  return noisy;
}

namespace {

struct FoldJob {
  int repeat = 0;
  int fold = 0;
  std::vector<Eigen::Index> trainIdx, testIdx;
};

struct Accumulator {
  double sum = 0.0, sumSq = 0.0;
  int n = 0;
  void add(double v) {
    sum += v;
    sumSq += v * v;
    ++n;
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double std() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = (sumSq - n * m * m) / (n - 1);
    return var > 0.0 ? std::sqrt(var) : 0.0;
  }
};

}  // namespace

CvResult crossValidate(const Eigen::Ref<const Eigen::MatrixXd>& features,
                       const Eigen::Ref<const Eigen::VectorXi>& labels, const CvPlan& plan) {
  const Eigen::Index n = features.rows();
  if (labels.size() != n) throw ShapeError("crossValidate: features and labels disagree in count");
  plan.validate(n);

  const std::vector<double> gammas =
      plan.family == KernelFamily::gaussian ? plan.gammaGrid : std::vector<double>{0.0};

  // Training labels, possibly corrupted; test folds always score against the
  // clean labels. Fold assignment also uses the clean labels.
  Eigen::VectorXi trainLabels = labels;
  if (plan.noiseRate > 0.0) trainLabels = injectLabelNoise(labels, plan.noiseRate, plan.seed);

  std::vector<FoldJob> jobs;
  std::vector<std::string> warnings;
  for (int rep = 0; rep < plan.repeats; ++rep) {
    const std::vector<int> folds = stratifiedFolds(labels, plan.folds, mixSeed(plan.seed, static_cast<std::uint64_t>(rep)));
    for (int f = 0; f < plan.folds; ++f) {
      FoldJob job;
      job.repeat = rep;
      job.fold = f;
      for (Eigen::Index i = 0; i < n; ++i) {
        (folds[static_cast<std::size_t>(i)] == f ? job.testIdx : job.trainIdx).push_back(i);
      }
      bool hasPos = false, hasNeg = false;
      for (const Eigen::Index i : job.trainIdx) {
        hasPos = hasPos || trainLabels(i) == 1;
        hasNeg = hasNeg || trainLabels(i) == -1;
      }
      if (job.testIdx.empty() || !hasPos || !hasNeg) {
        warnings.push_back("repeat " + std::to_string(rep) + " fold " + std::to_string(f) +
                           " skipped: degenerate split");
        continue;
      }
      jobs.push_back(std::move(job));
    }
  }

  // records[jobIndex] is filled independently per job, then flattened in a
  // fixed order so the output does not depend on scheduling.
  std::vector<std::vector<CvRecord>> perJob(jobs.size());
  std::atomic<std::size_t> nextJob{0};
  const int threadCount = std::max(1, plan.threads);

  const auto worker = [&]() {
    for (;;) {
      const std::size_t jobIndex = nextJob.fetch_add(1);
      if (jobIndex >= jobs.size()) return;
      const FoldJob& job = jobs[jobIndex];
      const Eigen::Index nTrain = static_cast<Eigen::Index>(job.trainIdx.size());
      const Eigen::Index nTest = static_cast<Eigen::Index>(job.testIdx.size());

      Eigen::MatrixXd trainX(nTrain, features.cols());
      Eigen::VectorXi trainY(nTrain);
      for (Eigen::Index r = 0; r < nTrain; ++r) {
        trainX.row(r) = features.row(job.trainIdx[static_cast<std::size_t>(r)]);
        trainY(r) = trainLabels(job.trainIdx[static_cast<std::size_t>(r)]);
      }
      Eigen::MatrixXd testX(nTest, features.cols());
      Eigen::VectorXi testY(nTest);
      for (Eigen::Index r = 0; r < nTest; ++r) {
        testX.row(r) = features.row(job.testIdx[static_cast<std::size_t>(r)]);
        testY(r) = labels(job.testIdx[static_cast<std::size_t>(r)]);
      }

      for (const double gamma : gammas) {
        KernelSpec kernel;
        kernel.family = plan.family;
        kernel.gamma = plan.family == KernelFamily::gaussian ? gamma : 1.0;
        const Eigen::MatrixXd gram = gramMatrix(kernel, trainX);
        for (const double lambda : plan.lambdaGrid) {
          for (const double d : plan.dGrid) {
            TrainConfig cfg;
            cfg.lambda = lambda;
            cfg.loss = LossConfig{d, plan.mu};
            cfg.epsilon = plan.epsilon;
            cfg.maxDcIters = plan.maxDcIters;
            const TrainOutcome outcome = trainWithGram(gram, trainY, cfg);
            const SavedModel model =
                buildSavedModel(outcome.params, trainX, trainY, kernel, cfg.loss);
            CvRecord rec;
            rec.d = d;
            rec.lambda = lambda;
            rec.gamma = kernel.gamma;
            rec.fold = job.fold;
            rec.repeat = job.repeat;
            rec.metrics = evaluate(model, testX, testY);
            perJob[jobIndex].push_back(rec);
          }
        }
      }
    }
  };

  if (threadCount == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threadCount));
    for (int t = 0; t < threadCount; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  CvResult result;
  result.warnings = std::move(warnings);
  for (const auto& recs : perJob) {
    result.records.insert(result.records.end(), recs.begin(), recs.end());
  }
  // Canonical record order: d, lambda, gamma, repeat, fold.
  std::sort(result.records.begin(), result.records.end(), [](const CvRecord& a, const CvRecord& b) {
    return std::tie(a.d, a.lambda, a.gamma, a.repeat, a.fold) < std::tie(b.d, b.lambda, b.gamma, b.repeat, b.fold);
  });

  for (const double d : plan.dGrid) {
    CvSelection best;
    best.d = d;
    bool haveBest = false;
    for (const double lambda : plan.lambdaGrid) {
      for (const double gamma : gammas) {
        Accumulator risk, rejection, accuracy, support;
        for (const CvRecord& r : result.records) {
          if (r.d == d && r.lambda == lambda &&
              (plan.family != KernelFamily::gaussian || r.gamma == gamma)) {
            risk.add(r.metrics.empiricalRiskD);
            rejection.add(r.metrics.rejectionRate);
            accuracy.add(r.metrics.accuracyUnrejected);
            support.add(r.metrics.supportCount);
          }
        }
        if (risk.n == 0) continue;
        if (!haveBest || risk.mean() < best.riskMean) {
          haveBest = true;
          best.lambda = lambda;
          best.gamma = plan.family == KernelFamily::gaussian ? gamma : 1.0;
          best.riskMean = risk.mean();
          best.riskStd = risk.std();
          best.rejectionMean = rejection.mean();
          best.rejectionStd = rejection.std();
          best.accuracyMean = accuracy.mean();
          best.accuracyStd = accuracy.std();
          best.supportMean = support.mean();
          best.supportStd = support.std();
          best.evaluations = risk.n;
        }
      }
    }
    if (!haveBest) throw Error("cross-validation produced no usable folds for d = " + std::to_string(d));
    result.selections.push_back(best);
  }
  return result;
}

double MixtureSpec::eta(double x) const {
  const auto gauss = [](double v, double mean, double sd) {
    const double z = (v - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
  };
  const double pos = pPos * gauss(x, meanPos, sdPos);
  const double neg = (1.0 - pPos) * gauss(x, meanNeg, sdNeg);
  return pos / (pos + neg);
}

double MixtureSpec::sampleX(std::mt19937_64& gen) const {
  const bool positive = uniformReal(gen) < pPos;
  const double z = standardNormal(gen);
  return positive ? meanPos + sdPos * z : meanNeg + sdNeg * z;
}

int MixtureSpec::sampleLabel(std::mt19937_64& gen, double x) const {
  return uniformReal(gen) < eta(x) ? 1 : -1;
}

std::vector<MixtureSpec> defaultMixtures() {
  return {
      {"balanced-unit", 0.5, 1.0, 1.0, -1.0, 1.0},
      {"heavy-overlap", 0.5, 0.5, 1.0, -0.5, 1.0},
      {"skewed-wide", 0.3, 2.0, 1.0, -2.0, 1.5},
  };
}

ExcessRisk excessRiskCheck(const MixtureSpec& dist, const std::function<double(double)>& f, double rho,
                           const LossConfig& cfg, int nSamples, std::uint64_t seed) {
  cfg.validate();
  requireRho(rho, cfg);
  if (nSamples < 2) throw DomainError("excessRiskCheck: need at least 2 samples");

  // Optimal reference rule for the mixture: score (rhoStar + mu) * region
  // with rhoStar = mu, which attains the pointwise minimum of both risks.
  const double rhoStar = cfg.mu;
  const double scoreStar = rhoStar + cfg.mu;

  std::mt19937_64 gen(mixSeed(seed, 0x657863657373ULL));
  double sumD = 0.0, sumDr = 0.0, sumW = 0.0, sumWSq = 0.0;
  for (int i = 0; i < nSamples; ++i) {
    const double x = dist.sampleX(gen);
    const int y = dist.sampleLabel(gen, x);
    const double fStar = scoreStar * static_cast<double>(bayesDiscriminant(dist.eta(x), cfg));
    const double t = static_cast<double>(y) * f(x);
    const double tStar = static_cast<double>(y) * fStar;
    const double dD = rejectLoss(t, rho, cfg) - rejectLoss(tStar, rhoStar, cfg);
    const double dDr = doubleRampLoss(t, rho, cfg) - doubleRampLoss(tStar, rhoStar, cfg);
    sumD += dD;
    sumDr += dDr;
    const double w = dDr - dD;
    sumW += w;
    sumWSq += w * w;
  }
  const double inv = 1.0 / static_cast<double>(nSamples);
  ExcessRisk out;
  out.excessD = sumD * inv;
  out.excessDr = sumDr * inv;
  const double meanW = sumW * inv;
  const double varW = std::max(0.0, (sumWSq - static_cast<double>(nSamples) * meanW * meanW) /
                                        static_cast<double>(nSamples - 1));
  out.seCombined = std::sqrt(varW * inv);
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void writeRecordsCsv(const std::string& path, const std::vector<CvRecord>& records) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << "d,lambda,gamma,fold,repeat,risk,rejection_rate,accuracy_unrejected,support_count\n";
  for (const CvRecord& r : records) {
    os << fmt(r.d) << ',' << fmt(r.lambda) << ',' << fmt(r.gamma) << ',' << r.fold << ',' << r.repeat << ','
       << fmt(r.metrics.empiricalRiskD) << ',' << fmt(r.metrics.rejectionRate) << ','
       << fmt(r.metrics.accuracyUnrejected) << ',' << r.metrics.supportCount << '\n';
  }
  if (!os) throw DataError("failed while writing '" + path + "'");
}

void writeSummaryCsv(const std::string& path, const std::vector<CvSelection>& selections) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << "d,best_lambda,best_gamma,risk_mean,risk_std,rejection_mean,rejection_std,"
        "accuracy_mean,accuracy_std,support_mean,support_std,evaluations\n";
  for (const CvSelection& s : selections) {
    os << fmt(s.d) << ',' << fmt(s.lambda) << ',' << fmt(s.gamma) << ',' << fmt(s.riskMean) << ','
       << fmt(s.riskStd) << ',' << fmt(s.rejectionMean) << ',' << fmt(s.rejectionStd) << ','
       << fmt(s.accuracyMean) << ',' << fmt(s.accuracyStd) << ',' << fmt(s.supportMean) << ','
       << fmt(s.supportStd) << ',' << s.evaluations << '\n';
  }
  if (!os) throw DataError("failed while writing '" + path + "'");
}

}  // namespace sdr
