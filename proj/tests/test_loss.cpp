#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sdr/loss.hpp"
#include "sdr/random.hpp"
#include "sdr/theory.hpp"

using namespace sdr;

namespace {
const LossConfig kCfg{0.2, 1.0};
}

TEST_CASE("reject loss cases") {
  CHECK(rejectLoss(-2.0, 1.0, kCfg) == 1.0);
  CHECK(rejectLoss(0.5, 1.0, kCfg) == 0.2);
  CHECK(rejectLoss(2.0, 1.0, kCfg) == 0.0);
  // the band boundary counts as reject
  CHECK(rejectLoss(1.0, 1.0, kCfg) == 0.2);
  CHECK(rejectLoss(-1.0, 1.0, kCfg) == 0.2);
}

TEST_CASE("double ramp loss pinned values") {
  CHECK(doubleRampLoss(5.0, 2.0, kCfg) == 0.0);
  CHECK(doubleRampLoss(0.0, 2.0, kCfg) == doctest::Approx(0.4).epsilon(1e-15));  // d(1+mu)
  // term-by-term at t = -5, rho = 2, d = 0.2, mu = 1:
  //   0.2*([1+5+2]-[-1+5+2]) + 0.8*([1+5-2]-[-1+5-2]) = 0.2*2 + 0.8*2 = 2
  CHECK(doubleRampLoss(-5.0, 2.0, kCfg) == 2.0);
}

TEST_CASE("double ramp loss rejects infeasible rho") {
  CHECK_THROWS_AS(doubleRampLoss(0.0, 0.5, kCfg), ConfigError);  // bound is 1 for mu=1
  LossConfig half{0.2, 0.5};
  CHECK_NOTHROW(doubleRampLoss(0.0, 0.375, half));
  CHECK_THROWS_AS(doubleRampLoss(0.0, 0.374, half), ConfigError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(LossConfig{0.0, 1.0}.validate(), ConfigError);
  CHECK_THROWS_AS(LossConfig{0.5, 1.0}.validate(), ConfigError);
  CHECK_THROWS_AS(LossConfig{0.2, 0.0}.validate(), ConfigError);
  CHECK_THROWS_AS(LossConfig{0.2, 1.5}.validate(), ConfigError);
  CHECK_NOTHROW(LossConfig{0.49, 1.0}.validate());
}

TEST_CASE("bayes discriminant thresholds") {
  CHECK(bayesDiscriminant(0.9, kCfg) == 1);
  CHECK(bayesDiscriminant(0.5, kCfg) == 0);
  CHECK(bayesDiscriminant(0.1, kCfg) == -1);
  // boundaries resolve to reject
  CHECK(bayesDiscriminant(0.2, kCfg) == 0);
  CHECK(bayesDiscriminant(0.8, kCfg) == 0);
  CHECK_THROWS_AS(bayesDiscriminant(1.5, kCfg), DomainError);
  CHECK_THROWS_AS(bayesDiscriminant(-0.1, kCfg), DomainError);
}

TEST_CASE("conditional risk pinned values") {
  CHECK(conditionalRisk(0.3, 0.0, 2.0, kCfg) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(conditionalRisk(1.0, -5.0, 2.0, kCfg) == 2.0);
  const double direct = 0.5 * doubleRampLoss(0.7, 2.0, kCfg) + 0.5 * doubleRampLoss(-0.7, 2.0, kCfg);
  CHECK(conditionalRisk(0.5, 0.7, 2.0, kCfg) == direct);
}

TEST_CASE("optimal conditional risk values and regions") {
  const auto low = optimalConditionalRisk(0.1, kCfg);
  CHECK(low.value == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(low.region == -1);
  const auto mid = optimalConditionalRisk(0.3, kCfg);
  CHECK(mid.value == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(mid.region == 0);
  const auto high = optimalConditionalRisk(0.95, kCfg);
  CHECK(high.value == doctest::Approx(0.05 * 2).epsilon(1e-12));
  CHECK(high.region == 1);
  // ties break toward reject
  CHECK(optimalConditionalRisk(0.2, kCfg).region == 0);
  CHECK(optimalConditionalRisk(0.8, kCfg).region == 0);
}

TEST_CASE("optimal value confirmed by grid search over z") {
  const LossConfig cfg{0.2, 1.0};
  const double rho = 2.0;
  for (const double eta : {0.05, 0.3, 0.62, 0.97}) {
    double best = 1e300;
    for (double z = -10.0; z <= 10.0; z += 1e-3) best = std::min(best, conditionalRisk(eta, z, rho, cfg));
    CHECK(best == doctest::Approx(optimalConditionalRisk(eta, cfg).value).epsilon(1e-9));
  }
}

TEST_CASE("surrogate bound and boundedness on a grid") {
  for (const double mu : {0.25, 0.5, 1.0}) {
    for (const double d : {0.05, 0.2, 0.45}) {
      const LossConfig cfg{d, mu};
      const double rho = std::max(mu, minFeasibleRho(cfg));
      const double span = rho + mu + 2.0;
      for (int k = 0; k <= 10000; ++k) {
        const double t = -span + 2.0 * span * k / 10000.0;
        const double ld = rejectLoss(t, rho, cfg);
        const double ldr = doubleRampLoss(t, rho, cfg);
        REQUIRE(ld <= ldr);
        REQUIRE(ldr >= 0.0);
        REQUIRE(ldr <= 1.0 + mu);
      }
    }
  }
}

TEST_CASE("flat regions have zero slope") {
  const LossConfig cfg{0.2, 1.0};
  const double rho = 2.0, h = 1e-5;
  for (const double t : {-5.0, -3.5, -0.9, 0.0, 0.9, 3.5, 5.0}) {
    const double deriv = (doubleRampLoss(t + h, rho, cfg) - doubleRampLoss(t - h, rho, cfg)) / (2.0 * h);
    CHECK(std::abs(deriv) < 1e-8);
  }
}

TEST_CASE("piecewise table matches the definition on random draws") {
  std::mt19937_64 gen(42);
  for (int i = 0; i < 100000; ++i) {
    LossConfig cfg{uniformReal(gen, 0.01, 0.49), uniformReal(gen, 0.05, 1.0)};
    const double rho = cfg.mu + uniformReal(gen, 0.0, 3.0);
    const double eta = uniformReal(gen);
    const double z = uniformReal(gen, -(rho + cfg.mu + 2.0), rho + cfg.mu + 2.0);
    const double direct = conditionalRisk(eta, z, rho, cfg);
    const double table = theory::conditionalRiskPiecewise(eta, z, rho, cfg);
    REQUIRE(std::abs(direct - table) <= 1e-12);
  }
}
