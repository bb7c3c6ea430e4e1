#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sdr/kernel.hpp"
#include "sdr/random.hpp"

using namespace sdr;

TEST_CASE("kernel values") {
  KernelSpec g{KernelFamily::gaussian, 1.0};
  Eigen::VectorXd a(2), b(2);
  a << 0, 0;
  b << 1, 0;
  CHECK(evalKernel(g, a, a) == 1.0);
  CHECK(evalKernel(g, a, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  KernelSpec lin{KernelFamily::linear, 0.0};
  Eigen::VectorXd c(2), d(2);
  c << 1, 2;
  d << 3, 4;
  CHECK(evalKernel(lin, c, d) == 11.0);
}

TEST_CASE("dimension and parameter validation") {
  KernelSpec g{KernelFamily::gaussian, 1.0};
  Eigen::VectorXd a(2), b(3);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(evalKernel(g, a, b), ShapeError);
  KernelSpec bad{KernelFamily::gaussian, 0.0};
  CHECK_THROWS_AS(evalKernel(bad, a, a), ConfigError);
  CHECK_THROWS_AS(kernelFamilyFromString("poly"), ConfigError);
}

TEST_CASE("gram matrix basics") {
  KernelSpec g{KernelFamily::gaussian, 0.7};
  Eigen::MatrixXd one(1, 3);
  one << 1, 2, 3;
  CHECK(gramMatrix(g, one)(0, 0) == 1.0);

  Eigen::MatrixXd two(2, 3);
  two << 1, 2, 3, 1, 2, 3;
  CHECK(gramMatrix(g, two).isApprox(Eigen::MatrixXd::Ones(2, 2)));

  Eigen::MatrixXd empty(0, 3);
  CHECK_THROWS_AS(gramMatrix(g, empty), ShapeError);
}

TEST_CASE("gram entries equal elementwise kernel calls, bitwise") {
  std::mt19937_64 gen(7);
  Eigen::MatrixXd x(6, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = uniformReal(gen, -2.0, 2.0);
  for (const auto family : {KernelFamily::gaussian, KernelFamily::linear}) {
    KernelSpec spec{family, 0.35};
    const Eigen::MatrixXd k = gramMatrix(spec, x);
    for (Eigen::Index i = 0; i < 6; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) {
        REQUIRE(k(i, j) == evalKernel(spec, x.row(i).transpose(), x.row(j).transpose()));
        REQUIRE(k(i, j) == k(j, i));
      }
    }
    if (family == KernelFamily::gaussian) {
      CHECK((k.array() > 0.0).all());
      CHECK((k.array() <= 1.0).all());
      CHECK(k.diagonal().isApproxToConstant(1.0, 1e-15));
      // 2x2 principal minors are nonnegative for a PSD matrix
      for (Eigen::Index i = 0; i < 6; ++i) {
        for (Eigen::Index j = 0; j < 6; ++j) {
          CHECK(k(i, i) * k(j, j) - k(i, j) * k(j, i) >= -1e-10);
        }
      }
    }
  }
}
