#include "sdr/theory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "sdr/eval.hpp"
#include "sdr/random.hpp"

namespace sdr::theory {

TheoryGrid defaultGrid() {
  TheoryGrid g;
  for (int i = 0; i <= 100; ++i) g.etaValues.push_back(i / 100.0);
  for (int i = 1; i <= 9; ++i) g.dValues.push_back(i * 0.05);
  g.muValues = {0.25, 0.5, 1.0};
  g.zStep = 1e-3;
  g.rhoSweep = {1.0, 2.0, 5.0};
  return g;
}

double defaultRho(const LossConfig& cfg) { return std::max(cfg.mu, minFeasibleRho(cfg)); }

double conditionalRiskPiecewise(double eta, double z, double rho, const LossConfig& cfg) {
  requireEta(eta);
  const double d = cfg.d, mu = cfg.mu;
  if (!(rho >= mu)) throw ConfigError("piecewise conditional risk requires rho >= mu");
  const double m2 = mu * mu;
  if (z <= -rho - mu) return eta * (1.0 + mu);
  if (z <= -rho - m2) return eta * (1.0 + mu) + (1.0 - eta) * (mu + z + rho) * d / mu;
  if (z <= -rho + m2) {
    return eta * d * (1.0 + mu) + eta * (mu - z - rho) * (1.0 - d) / mu + (1.0 - eta) * (mu + z + rho) * d / mu;
  }
  if (z <= -rho + mu) return eta * d * (1.0 + mu) + eta * (mu - z - rho) * (1.0 - d) / mu + (1.0 - eta) * (1.0 + mu) * d;
  if (z <= rho - mu) return d * (1.0 + mu);
  if (z <= rho - m2) return eta * d * (1.0 + mu) + (1.0 - eta) * (1.0 + mu) * d + (1.0 - eta) * (z - rho + mu) * (1.0 - d) / mu;
  if (z <= rho + m2) {
    return eta * (rho + mu - z) * d / mu + (1.0 - eta) * (1.0 + mu) * d + (1.0 - eta) * (z - rho + mu) * (1.0 - d) / mu;
  }
  if (z <= rho + mu) return eta * (rho + mu - z) * d / mu + (1.0 - eta) * (1.0 + mu);
  return (1.0 - eta) * (1.0 + mu);
}

double xiRisk(double eta, const LossConfig& cfg) {
  requireEta(eta);
  if (eta < cfg.d) return eta;
  if (eta > 1.0 - cfg.d) return 1.0 - eta;
  return cfg.d;
}

double xiRegion(double eta, int region, const LossConfig& cfg) {
  switch (region) {
    case -1: return eta - xiRisk(eta, cfg);
    case 0: return cfg.d - xiRisk(eta, cfg);
    case 1: return (1.0 - eta) - xiRisk(eta, cfg);
    default: throw DomainError("region must be -1, 0 or +1");
  }
}

double hRisk(double eta, const LossConfig& cfg) { return (1.0 + cfg.mu) * xiRisk(eta, cfg); }

double hRegion(double eta, int region, const LossConfig& cfg) {
  requireEta(eta);
  const double d = cfg.d, mu = cfg.mu;
  // Corner values of the piecewise-linear conditional risk at z = -rho and
  // z = +rho; the flats contribute eta(1+mu), d(1+mu) and (1-eta)(1+mu).
  const double cornerNeg = eta * d * (mu - 1.0) + eta + d;
  const double cornerPos = (1.0 + d * mu) * (1.0 - eta) + eta * d;
  switch (region) {
    case -1: return std::min(eta * (1.0 + mu), cornerNeg);
    case 0: return std::min({cornerNeg, d * (1.0 + mu), cornerPos});
    case 1: return std::min((1.0 - eta) * (1.0 + mu), cornerPos);
    default: throw DomainError("region must be -1, 0 or +1");
  }
}

namespace {

void recordViolation(CheckReport& report, double gap, const std::string& what) {
  ++report.violations;
  report.worstGap = std::min(report.worstGap, gap);
  if (report.samples.size() < 10) report.samples.push_back(what);
}

std::string point(double eta, double d, double mu, double rho) {
  return "eta=" + std::to_string(eta) + " d=" + std::to_string(d) + " mu=" + std::to_string(mu) +
         " rho=" + std::to_string(rho);
}

}  // namespace

CheckReport verifyFisherConsistency(const TheoryGrid& grid) {
  CheckReport report;
  report.name = "fisher-consistency";
  constexpr double kValueTol = 1e-6;
  constexpr double kTieTol = 1e-9;

  for (const double mu : grid.muValues) {
    for (const double d : grid.dValues) {
      const LossConfig cfg{d, mu};
      std::vector<double> rhos = {defaultRho(cfg)};
      for (const double r : grid.rhoSweep) {
        if (r >= defaultRho(cfg) && r != rhos.front()) rhos.push_back(r);
      }
      for (const double rho : rhos) {
        const double zMax = rho + mu + 1.0;
        const long steps = static_cast<long>(std::llround(2.0 * zMax / grid.zStep));
        for (const double eta : grid.etaValues) {
          ++report.cases;
          double best = std::numeric_limits<double>::infinity();
          for (long k = 0; k <= steps; ++k) {
            const double z = -zMax + static_cast<double>(k) * grid.zStep;
            best = std::min(best, conditionalRisk(eta, z, rho, cfg));
          }
          const OptimalRisk expected = optimalConditionalRisk(eta, cfg);
          if (std::abs(best - expected.value) > kValueTol) {
            recordViolation(report, -(std::abs(best - expected.value)),
                            point(eta, d, mu, rho) + ": grid min " + std::to_string(best) + " vs closed form " +
                                std::to_string(expected.value));
            continue;
          }
          const bool boundary = std::abs(eta - d) < 1e-12 || std::abs(eta - (1.0 - d)) < 1e-12;
          if (boundary) continue;
          if (expected.region != bayesDiscriminant(eta, cfg)) {
            recordViolation(report, 0.0, point(eta, d, mu, rho) + ": region disagrees with the optimal rule");
            continue;
          }
          // Every argmin must fall inside the claimed region.
          bool regionOk = true;
          for (long k = 0; k <= steps && regionOk; ++k) {
            const double z = -zMax + static_cast<double>(k) * grid.zStep;
            if (conditionalRisk(eta, z, rho, cfg) > best + kTieTol) continue;
            switch (expected.region) {
              case -1: regionOk = z <= -rho - mu + kTieTol; break;
              case 0: regionOk = std::abs(z) <= rho - mu + kTieTol; break;
              case 1: regionOk = z >= rho + mu - kTieTol; break;
            }
          }
          if (!regionOk) {
            recordViolation(report, 0.0, point(eta, d, mu, rho) + ": an argmin escapes region " +
                                             std::to_string(expected.region));
          }
        }
      }
    }
  }
  return report;
}

CheckReport verifyProposition2(const TheoryGrid& grid) {
  CheckReport report;
  report.name = "proposition2";
  constexpr double kIneqTol = 1e-9;
  constexpr double kSearchTol = 1e-6;

  for (const double mu : grid.muValues) {
    for (const double d : grid.dValues) {
      const LossConfig cfg{d, mu};
      const double rho = defaultRho(cfg);
      const double zMax = rho + mu + 1.0;
      for (const double eta : grid.etaValues) {
        ++report.cases;
        const double h = hRisk(eta, cfg);
        for (const int region : {-1, 0, 1}) {
          const double lhs = xiRegion(eta, region, cfg);
          const double rhs = hRegion(eta, region, cfg) - h;
          if (lhs > rhs + kIneqTol) {
            recordViolation(report, rhs - lhs,
                            point(eta, d, mu, rho) + ": region " + std::to_string(region) + " inequality fails (" +
                                std::to_string(lhs) + " > " + std::to_string(rhs) + ")");
          }

          // Constrained grid search over the matching z range must agree
          // with the closed form.
          double lo = 0.0, hi = 0.0;
          if (region == -1) {
            lo = -zMax;
            hi = -rho;
          } else if (region == 0) {
            lo = -rho;
            hi = rho;
          } else {
            lo = rho;
            hi = zMax;
          }
          double best = std::numeric_limits<double>::infinity();
          const long steps = static_cast<long>(std::llround((hi - lo) / grid.zStep));
          for (long k = 0; k <= steps; ++k) {
            const double z = lo + static_cast<double>(k) * grid.zStep;
            best = std::min(best, conditionalRisk(eta, z, rho, cfg));
          }
          const double closed = hRegion(eta, region, cfg);
          if (std::abs(best - closed) > kSearchTol) {
            recordViolation(report, -std::abs(best - closed),
                            point(eta, d, mu, rho) + ": region " + std::to_string(region) + " closed form " +
                                std::to_string(closed) + " vs grid search " + std::to_string(best));
          }
        }
      }
    }
  }
  return report;
}

CheckReport verifyTheorem3(int trialsPerDistribution, int samplesPerTrial, std::uint64_t seed) {
  CheckReport report;
  report.name = "theorem3-excess-risk";
  report.worstGap = std::numeric_limits<double>::infinity();
  const std::vector<MixtureSpec> mixtures = defaultMixtures();
  const std::vector<double> mus = {0.25, 0.5, 1.0};
  std::mt19937_64 gen(mixSeed(seed, 0x74683033ULL));

  for (std::size_t m = 0; m < mixtures.size(); ++m) {
    for (int trial = 0; trial < trialsPerDistribution; ++trial) {
      ++report.cases;
      LossConfig cfg;
      cfg.d = uniformReal(gen, 0.05, 0.45);
      cfg.mu = mus[static_cast<std::size_t>(uniformIndex(gen, mus.size()))];
      const double slope = uniformReal(gen, -3.0, 3.0);
      const double intercept = uniformReal(gen, -2.0, 2.0);
      const double rho = minFeasibleRho(cfg) + uniformReal(gen, 0.0, 2.0);
      const std::uint64_t trialSeed = gen();
      const ExcessRisk er = excessRiskCheck(
          mixtures[m], [slope, intercept](double x) { return slope * x + intercept; }, rho, cfg,
          samplesPerTrial, trialSeed);
      const double slack = er.excessDr + 3.0 * er.seCombined - er.excessD;
      report.worstGap = std::min(report.worstGap, slack);
      if (slack < 0.0) {
        recordViolation(report, slack,
                        mixtures[m].name + " trial " + std::to_string(trial) + ": excess_d " +
                            std::to_string(er.excessD) + " > excess_dr " + std::to_string(er.excessDr) + " + 3se");
      }
    }
  }
  return report;
}

CheckReport verifySurrogateBound(long numPoints, std::uint64_t seed) {
  CheckReport report;
  report.name = "surrogate-bound";
  std::mt19937_64 gen(mixSeed(seed, 0x626f756eULL));
  for (long i = 0; i < numPoints; ++i) {
    ++report.cases;
    LossConfig cfg;
    cfg.d = uniformReal(gen, 0.01, 0.49);
    cfg.mu = uniformReal(gen, 0.05, 1.0);
    const double rho = minFeasibleRho(cfg) + uniformReal(gen, 0.0, 4.0);
    const double t = uniformReal(gen, -(rho + cfg.mu + 3.0), rho + cfg.mu + 3.0);
    const double ld = rejectLoss(t, rho, cfg);
    const double ldr = doubleRampLoss(t, rho, cfg);
    if (!(ld <= ldr)) {
      recordViolation(report, ldr - ld,
                      "t=" + std::to_string(t) + " rho=" + std::to_string(rho) + " d=" + std::to_string(cfg.d) +
                          " mu=" + std::to_string(cfg.mu));
    }
  }
  return report;
}

CheckReport verifyPiecewiseAgreement(long numPoints, std::uint64_t seed) {
  CheckReport report;
  report.name = "piecewise-agreement";
  std::mt19937_64 gen(mixSeed(seed, 0x70696563ULL));
  for (long i = 0; i < numPoints; ++i) {
    ++report.cases;
    LossConfig cfg;
    cfg.d = uniformReal(gen, 0.01, 0.49);
    cfg.mu = uniformReal(gen, 0.05, 1.0);
    const double rho = cfg.mu + uniformReal(gen, 0.0, 3.0);
    const double eta = uniformReal(gen);
    const double z = uniformReal(gen, -(rho + cfg.mu + 2.0), rho + cfg.mu + 2.0);
    const double direct = conditionalRisk(eta, z, rho, cfg);
    const double table = conditionalRiskPiecewise(eta, z, rho, cfg);
    if (std::abs(direct - table) > 1e-12) {
      recordViolation(report, -std::abs(direct - table),
                      "eta=" + std::to_string(eta) + " z=" + std::to_string(z) + " rho=" + std::to_string(rho) +
                          " d=" + std::to_string(cfg.d) + " mu=" + std::to_string(cfg.mu));
    }
  }
  return report;
}

std::vector<CheckReport> runAllChecks(const TheoryGrid& grid, int theorem3Trials, int theorem3Samples,
                                      long surrogatePoints, std::uint64_t seed) {
  std::vector<CheckReport> reports;
  reports.push_back(verifyFisherConsistency(grid));
  reports.push_back(verifyProposition2(grid));
  reports.push_back(verifyTheorem3(theorem3Trials, theorem3Samples, seed));
  reports.push_back(verifySurrogateBound(surrogatePoints, seed));
  reports.push_back(verifyPiecewiseAgreement(100000, seed));
  return reports;
}

void printReports(const std::vector<CheckReport>& reports, std::ostream& os) {
  for (const CheckReport& r : reports) {
    os << (r.pass() ? "PASS" : "FAIL") << "  " << r.name << "  cases=" << r.cases
       << " violations=" << r.violations;
    if (r.name == "theorem3-excess-risk" && r.cases > 0) os << " worst_slack=" << r.worstGap;
    os << "\n";
    for (const std::string& s : r.samples) os << "      " << s << "\n";
  }
}

void writeReportsJson(const std::vector<CheckReport>& reports, const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const CheckReport& r : reports) {
    j.push_back({{"name", r.name},
                 {"cases", r.cases},
                 {"violations", r.violations},
                 {"worst_gap", r.worstGap},
                 {"pass", r.pass()},
                 {"samples", r.samples}});
  }
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << j.dump(2) << "\n";
}

bool allPass(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass(); });
}

}  // namespace sdr::theory
