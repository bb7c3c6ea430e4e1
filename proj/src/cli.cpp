#include "sdr/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdr/dataset.hpp"
#include "sdr/eval.hpp"
#include "sdr/kernel.hpp"
#include "sdr/model.hpp"
#include "sdr/theory.hpp"
#include "sdr/trainer.hpp"

namespace sdr::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct DataFlags {
  std::string path;
  std::string labelColumn = "last";
  std::string positiveLabel;
};

void addDataFlags(CLI::App* cmd, DataFlags& flags, bool required = true) {
  auto* opt = cmd->add_option("--data", flags.path, "CSV data file");
  if (required) opt->required();
  cmd->add_option("--label-col", flags.labelColumn, "label column: first, last or 0-based index")
      ->capture_default_str();
  cmd->add_option("--positive-label", flags.positiveLabel, "label token mapped to +1");
}

Dataset loadData(const DataFlags& flags) {
  LoadOptions opts;
  opts.labelColumn = flags.labelColumn;
  opts.positiveLabel = flags.positiveLabel;
  Dataset ds = loadCsv(flags.path, opts);
  for (const std::string& w : ds.warnings) std::cerr << "warning: " << w << "\n";
  return ds;
}

std::string configDigest(const KernelSpec& kernel, const TrainConfig& cfg) {
  std::string s = "kernel=" + toString(kernel.family);
  if (kernel.family == KernelFamily::gaussian) s += " gamma=" + fmt(kernel.gamma);
  s += " d=" + fmt(cfg.loss.d) + " mu=" + fmt(cfg.loss.mu) + " lambda=" + fmt(cfg.lambda) +
       " epsilon=" + fmt(cfg.epsilon);
  return s;
}

nlohmann::json metricsJson(const EvalMetrics& m) {
  return {{"risk", m.empiricalRiskD},
          {"rejection_rate", m.rejectionRate},
          {"accuracy_unrejected", m.accuracyUnrejected},
          {"all_rejected", m.allRejected},
          {"support_count", m.supportCount},
          {"n", m.nTest}};
}

struct Commands {
  // train
  DataFlags trainData;
  double d = 0.2, mu = 1.0, lambda = 0.1, gamma = 1.0, epsilon = 1e-5;
  std::string kernelName = "gaussian";
  int maxIters = 50, lpIterCap = 0;
  std::string modelOut, reportOut, dumpLpPrefix;

  // predict / evaluate
  std::string modelPath;
  DataFlags predictData;
  std::string predictOut;
  DataFlags evalData;
  std::string evalOut;

  // cv / noise-sweep
  DataFlags cvData;
  std::string dGridText = "0.05:0.5:0.05";
  std::string lambdaGridText = "1e-3:log:10:9";
  std::string gammaGridText = "0.0625:log:4:7";
  int folds = 10, repeats = 1, threads = 1;
  std::uint64_t seed = 0;
  std::string cvKernelName = "gaussian";
  double cvMu = 1.0, cvEpsilon = 1e-5;
  int cvMaxIters = 50;
  std::string metricsOut = "metrics.csv", summaryOut = "summary.csv";
  std::string noiseRatesText = "0.1,0.2,0.3";

  // theory-check
  int thTrials = 20;
  int thSamples = 100000;
  long thSurrogatePoints = 1000000;
  std::uint64_t thSeed = 0;
  std::string thOut;
  bool thQuick = false;
};

int cmdTrain(const Commands& c) {
  const Dataset ds = loadData(c.trainData);
  KernelSpec kernel;
  kernel.family = kernelFamilyFromString(c.kernelName);
  kernel.gamma = c.gamma;
  kernel.validate();
  TrainConfig cfg;
  cfg.lambda = c.lambda;
  cfg.loss = LossConfig{c.d, c.mu};
  cfg.epsilon = c.epsilon;
  cfg.maxDcIters = c.maxIters;
  cfg.lpIterCap = c.lpIterCap;
  cfg.dumpLpPrefix = c.dumpLpPrefix;
  cfg.validate();

  const TrainOutcome outcome = train(ds.features, ds.labels, kernel, cfg);
  const SavedModel model = buildSavedModel(outcome.params, ds.features, ds.labels, kernel, cfg.loss, ds.mean,
                                           ds.scale, configDigest(kernel, cfg));
  saveFile(model, c.modelOut);
  const EvalMetrics trainMetrics = evaluate(model, ds.raw, ds.labels);

  nlohmann::json report = {{"objective_trace", outcome.report.objectiveTrace},
                           {"iterations", outcome.report.iterations},
                           {"termination", toString(outcome.report.termination)},
                           {"wall_time_sec", outcome.report.wallTimeSec},
                           {"lp_iterations_total", outcome.report.lpIterationsTotal},
                           {"train_metrics", metricsJson(trainMetrics)}};
  const std::string reportPath = c.reportOut.empty() ? c.modelOut + ".report.json" : c.reportOut;
  std::ofstream os(reportPath);
  if (!os) throw DataError("cannot open '" + reportPath + "' for writing");
  os << report.dump(2) << "\n";

  std::cout << "model: " << c.modelOut << "\n"
            << "iterations: " << outcome.report.iterations << " (" << toString(outcome.report.termination)
            << ")\n"
            << "objective: " << fmt(outcome.report.objectiveTrace.back()) << "\n"
            << "train risk: " << fmt(trainMetrics.empiricalRiskD)
            << "  rejection: " << fmt(trainMetrics.rejectionRate)
            << "  support vectors: " << trainMetrics.supportCount << "/" << ds.size() << "\n";
  return 0;
}

int cmdPredict(const Commands& c) {
  const SavedModel model = loadFile(c.modelPath);
  const Dataset ds = loadData(c.predictData);
  std::ofstream os(c.predictOut);
  if (!os) throw DataError("cannot open '" + c.predictOut + "' for writing");
  os << "decision_value,prediction\n";
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    const double f = decisionValue(model, ds.raw.row(i).transpose());
    const int p = f > model.rho ? 1 : (f < -model.rho ? -1 : 0);
    os << fmt(f) << ',' << p << '\n';
  }
  std::cout << "wrote " << ds.size() << " predictions to " << c.predictOut << "\n";
  return 0;
}

int cmdEvaluate(const Commands& c) {
  const SavedModel model = loadFile(c.modelPath);
  const Dataset ds = loadData(c.evalData);
  const EvalMetrics m = evaluate(model, ds.raw, ds.labels);
  std::cout << "risk: " << fmt(m.empiricalRiskD) << "\n"
            << "rejection_rate: " << fmt(m.rejectionRate) << "\n"
            << "accuracy_unrejected: " << fmt(m.accuracyUnrejected) << "\n"
            << "support_count: " << m.supportCount << "\n"
            << "n: " << m.nTest << "\n";
  if (!c.evalOut.empty()) {
    std::ofstream os(c.evalOut);
    if (!os) throw DataError("cannot open '" + c.evalOut + "' for writing");
    os << metricsJson(m).dump(2) << "\n";
  }
  return 0;
}

CvPlan planFromFlags(const Commands& c, double noiseRate) {
  CvPlan plan;
  plan.folds = c.folds;
  plan.repeats = c.repeats;
  plan.seed = c.seed;
  plan.family = kernelFamilyFromString(c.cvKernelName);
  plan.mu = c.cvMu;
  plan.epsilon = c.cvEpsilon;
  plan.maxDcIters = c.cvMaxIters;
  plan.threads = c.threads;
  plan.noiseRate = noiseRate;
  plan.lambdaGrid = parseGrid(c.lambdaGridText);
  plan.gammaGrid = parseGrid(c.gammaGridText);
  for (const double d : parseGrid(c.dGridText)) {
    if (d > 0.0 && d < 0.5) {
      plan.dGrid.push_back(d);
    } else {
      std::cerr << "warning: rejection cost " << d << " outside (0, 0.5) dropped from the d grid\n";
    }
  }
  return plan;
}

void printSelections(const std::vector<CvSelection>& selections) {
  std::cout << "d      lambda    gamma     risk (mean+-std)      rejection  accuracy  support\n";
  for (const CvSelection& s : selections) {
    std::printf("%-6.3g %-9.4g %-9.4g %-9.5f +- %-8.5f %-10.5f %-9.5f %.1f\n", s.d, s.lambda, s.gamma,
                s.riskMean, s.riskStd, s.rejectionMean, s.accuracyMean, s.supportMean);
  }
}

int cmdCv(const Commands& c, double noiseRate, const std::string& metricsPath, const std::string& summaryPath) {
  const Dataset ds = loadData(c.cvData);
  const CvPlan plan = planFromFlags(c, noiseRate);
  const CvResult result = crossValidate(ds.features, ds.labels, plan);
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  writeRecordsCsv(metricsPath, result.records);
  writeSummaryCsv(summaryPath, result.selections);
  printSelections(result.selections);
  std::cout << "metrics: " << metricsPath << "\nsummary: " << summaryPath << "\n";
  return 0;
}

int cmdNoiseSweep(const Commands& c) {
  const std::vector<double> rates = parseGrid(c.noiseRatesText);
  for (const double rate : rates) {
    if (!(rate >= 0.0 && rate < 0.5)) throw ConfigError("noise rate must lie in [0, 0.5)");
  }
  const auto withSuffix = [](const std::string& path, const std::string& suffix) {
    const std::size_t dot = path.rfind('.');
    if (dot == std::string::npos) return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
  };
  for (const double rate : rates) {
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_noise%g", rate);
    std::cout << "== noise rate " << rate << "\n";
    cmdCv(c, rate, withSuffix(c.metricsOut, suffix), withSuffix(c.summaryOut, suffix));
  }
  return 0;
}

int cmdTheoryCheck(const Commands& c) {
  theory::TheoryGrid grid = theory::defaultGrid();
  long surrogatePoints = c.thSurrogatePoints;
  int trials = c.thTrials, samples = c.thSamples;
  if (c.thQuick) {
    grid.etaValues.clear();
    for (int i = 0; i <= 20; ++i) grid.etaValues.push_back(i / 20.0);
    grid.dValues = {0.1, 0.2, 0.4};
    grid.zStep = 1e-2;
    surrogatePoints = 10000;
    trials = 3;
    samples = 10000;
  }
  const std::vector<theory::CheckReport> reports =
      theory::runAllChecks(grid, trials, samples, surrogatePoints, c.thSeed);
  theory::printReports(reports, std::cout);
  if (!c.thOut.empty()) theory::writeReportsJson(reports, c.thOut);
  return theory::allPass(reports) ? 0 : 4;
}

}  // namespace

std::vector<double> parseGrid(const std::string& text) {
  std::vector<double> out;
  const auto parseOne = [](const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + tok + "' in grid");
    }
    if (used != tok.size()) throw ConfigError("cannot parse number '" + tok + "' in grid");
    return v;
  };

  std::vector<std::string> parts;
  std::string part;
  std::istringstream is(text);
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  while (std::getline(is, part, sep)) parts.push_back(part);
  if (parts.empty()) throw ConfigError("empty grid specification '" + text + "'");

  if (sep == ':') {
    if (parts.size() == 4 && parts[1] == "log") {
      // start:log:end:count -- log-spaced between start and end inclusive.
      const double start = parseOne(parts[0]);
      const double end = parseOne(parts[2]);
      const long count = std::lround(parseOne(parts[3]));
      if (!(start > 0.0 && end > 0.0 && count >= 2)) {
        throw ConfigError("log grid needs positive endpoints and count >= 2");
      }
      for (long i = 0; i < count; ++i) {
        out.push_back(start * std::pow(end / start, static_cast<double>(i) / static_cast<double>(count - 1)));
      }
      return out;
    }
    if (parts.size() != 3) throw ConfigError("range grid must be start:end:step, got '" + text + "'");
    const double start = parseOne(parts[0]);
    const double end = parseOne(parts[1]);
    const double step = parseOne(parts[2]);
    if (!(step > 0.0) || end < start) throw ConfigError("bad range grid '" + text + "'");
    for (long i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > end + 1e-12) break;
      out.push_back(v);
    }
    return out;
  }
  for (const std::string& tok : parts) out.push_back(parseOne(tok));
  return out;
}

int runCli(const std::vector<std::string>& args) {
  CLI::App app{"sparse reject-option classifier via double ramp loss and successive linear programs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key=value file");
  Commands c;

  CLI::App* train = app.add_subcommand("train", "train a model on a CSV dataset");
  addDataFlags(train, c.trainData);
  train->add_option("--d", c.d, "rejection cost in (0, 0.5)")->capture_default_str();
  train->add_option("--mu", c.mu, "ramp slope in (0, 1]")->capture_default_str();
  train->add_option("--lambda", c.lambda, "l1 regularization weight")->capture_default_str();
  train->add_option("--kernel", c.kernelName, "gaussian or linear")->capture_default_str();
  train->add_option("--gamma", c.gamma, "gaussian kernel width")->capture_default_str();
  train->add_option("--epsilon", c.epsilon, "objective-drop stopping threshold")->capture_default_str();
  train->add_option("--max-iters", c.maxIters, "outer iteration cap")->capture_default_str();
  train->add_option("--lp-iter-cap", c.lpIterCap, "simplex iteration cap per subproblem (0 = auto)");
  train->add_option("--out", c.modelOut, "output model file")->required();
  train->add_option("--report", c.reportOut, "training report JSON (default <out>.report.json)");
  train->add_option("--dump-lp", c.dumpLpPrefix, "write each subproblem to <prefix><iter>.lp");

  CLI::App* predict = app.add_subcommand("predict", "apply a saved model to a CSV dataset");
  predict->add_option("--model", c.modelPath, "model file")->required();
  addDataFlags(predict, c.predictData);
  predict->add_option("--out", c.predictOut, "output CSV of decision values and predictions")->required();

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a saved model on a labeled CSV dataset");
  evaluate->add_option("--model", c.modelPath, "model file")->required();
  addDataFlags(evaluate, c.evalData);
  evaluate->add_option("--out", c.evalOut, "optional metrics JSON");

  const auto addCvFlags = [&](CLI::App* cmd) {
    addDataFlags(cmd, c.cvData);
    cmd->add_option("--d-grid", c.dGridText, "rejection costs (list or start:end:step)")->capture_default_str();
    cmd->add_option("--lambda-grid", c.lambdaGridText, "lambda grid (list, range, or start:log:end:count)")
        ->capture_default_str();
    cmd->add_option("--gamma-grid", c.gammaGridText, "gamma grid")->capture_default_str();
    cmd->add_option("--folds", c.folds, "cross-validation folds")->capture_default_str();
    cmd->add_option("--repeats", c.repeats, "cross-validation repetitions")->capture_default_str();
    cmd->add_option("--seed", c.seed, "seed for folds and noise")->capture_default_str();
    cmd->add_option("--kernel", c.cvKernelName, "gaussian or linear")->capture_default_str();
    cmd->add_option("--mu", c.cvMu, "ramp slope")->capture_default_str();
    cmd->add_option("--epsilon", c.cvEpsilon, "objective-drop stopping threshold")->capture_default_str();
    cmd->add_option("--max-iters", c.cvMaxIters, "outer iteration cap")->capture_default_str();
    cmd->add_option("--threads", c.threads, "parallel fold workers")->capture_default_str();
    cmd->add_option("--metrics-out", c.metricsOut, "per-fold metrics CSV")->capture_default_str();
    cmd->add_option("--summary-out", c.summaryOut, "per-d summary CSV")->capture_default_str();
  };
  CLI::App* cv = app.add_subcommand("cv", "cross-validated hyperparameter search");
  addCvFlags(cv);
  CLI::App* noise = app.add_subcommand("noise-sweep", "repeat cv with training-label noise");
  addCvFlags(noise);
  noise->add_option("--noise-rates", c.noiseRatesText, "label flip probabilities")->capture_default_str();

  CLI::App* theoryCheck = app.add_subcommand("theory-check", "numerical verification of the loss properties");
  theoryCheck->add_option("--trials", c.thTrials, "excess-risk trials per distribution")->capture_default_str();
  theoryCheck->add_option("--samples", c.thSamples, "Monte Carlo samples per trial")->capture_default_str();
  theoryCheck->add_option("--surrogate-points", c.thSurrogatePoints, "random points for the bound check")
      ->capture_default_str();
  theoryCheck->add_option("--seed", c.thSeed, "seed")->capture_default_str();
  theoryCheck->add_option("--out", c.thOut, "machine-readable report JSON");
  theoryCheck->add_flag("--quick", c.thQuick, "small grids for a fast smoke run");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) return cmdTrain(c);
    if (predict->parsed()) return cmdPredict(c);
    if (evaluate->parsed()) return cmdEvaluate(c);
    if (cv->parsed()) return cmdCv(c, 0.0, c.metricsOut, c.summaryOut);
    if (noise->parsed()) return cmdNoiseSweep(c);
    if (theoryCheck->parsed()) return cmdTheoryCheck(c);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const TrainingError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace sdr::cli
