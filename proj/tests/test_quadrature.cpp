#include "adboot/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace adboot;
using doctest::Approx;

TEST_CASE("Gauss-Hermite integrates polynomials exactly") {
  const QuadratureRule r = gauss_hermite(20);
  CHECK(r.weights.sum() == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
  // int x^{2k} e^{-x^2} = Gamma(k + 1/2)
  for (int k = 0; k <= 19; ++k) {
    const double exact = std::tgamma(k + 0.5);
    const double got = (r.weights.array() * r.nodes.array().pow(2 * k)).sum();
    CHECK(got == Approx(exact).epsilon(1e-11));
  }
  const double odd = (r.weights.array() * r.nodes.array().pow(7)).sum();
  CHECK(std::abs(odd) < 1e-12);
}

TEST_CASE("normal-weight rule gives standard normal moments") {
  const QuadratureRule r = gauss_hermite_normal(16);
  CHECK(r.weights.sum() == Approx(1.0).epsilon(1e-14));
  CHECK((r.weights.array() * r.nodes.array().square()).sum() == Approx(1.0).epsilon(1e-13));
  CHECK((r.weights.array() * r.nodes.array().pow(4)).sum() == Approx(3.0).epsilon(1e-13));
  CHECK((r.weights.array() * r.nodes.array().pow(8)).sum() == Approx(105.0).epsilon(1e-12));
}

TEST_CASE("adaptive Gauss-Kronrod") {
  const auto r = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(r.value == Approx(2.0).epsilon(1e-13));

  const auto kink = integrate_adaptive([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0, 1e-13, 1e-13, {0.3});
  CHECK(kink.value == Approx(0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7).epsilon(1e-13));
}

TEST_CASE("real line integration") {
  const auto r = integrate_real_line([](double x) { return std::exp(-x * x / 2.0); });
  CHECK(r.converged);
  CHECK(r.value == Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
  const auto cauchy = integrate_real_line([](double x) { return 1.0 / (1.0 + x * x); }, 1e-11, 1e-11);
  CHECK(cauchy.value == Approx(std::numbers::pi).epsilon(1e-9));
}
