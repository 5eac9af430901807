#include "adboot/inference.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace adboot;
using testutil::near;
using testutil::sample1;

namespace {

BootstrapVariant variant(Family f, double h, Variant v = Variant::Natural) {
  BootstrapVariant out;
  out.estimator.family = f;
  out.estimator.kernel = KernelSpec(KernelFamily::Gaussian2, 1);
  out.estimator.h = h;
  if (is_leave_out(f)) out.estimator.blocks = kBlocksN;
  out.variant = v;
  return out;
}

}  // namespace

TEST_CASE("normal quantile") {
  CHECK(near(inverse_normal_cdf(0.975), 1.9599639845400542, 1e-14));
  CHECK(near(inverse_normal_cdf(0.3), -0.52440051270804078, 1e-14));
  CHECK(near(inverse_normal_cdf(1e-10), -6.3613409024040562, 1e-13));
  CHECK(inverse_normal_cdf(0.5) == 0.0);
  for (double p : {1e-200, 1e-12, 0.01, 0.2, 0.6, 0.99, 1.0 - 1e-12}) CHECK(normal_cdf(inverse_normal_cdf(p)) == doctest::Approx(p).epsilon(1e-12));
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::invalid_argument);
}

TEST_CASE("quantiles of the two-point enumeration") {
  const Sample s = sample1({0.0, 1.0});
  const BootstrapVariant ad = variant(Family::AD, 1.0);
  const BootstrapDistribution d = distribution_from_atoms(enumerate_bootstrap(s, ad), estimate(s, ad.estimator).value);
  CHECK(bootstrap_quantile(d, 0.5) == 0.0);
  CHECK(near(bootstrap_quantile(d, 0.75), 0.078485777941144669, 1e-14));
  // 2 theta-hat - median* with median* = theta-hat
  CHECK(near(percentile_point_estimate(d), 0.32045650246028801, 1e-15));
  CHECK_THROWS_AS(bootstrap_quantile(d, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_quantile(d, 1.0), std::invalid_argument);
}

TEST_CASE("type-1 quantile convention") {
  const auto d = BootstrapDistribution::from_values({5.0, 1.0, 3.0, 2.0, 4.0}, 0.0);
  CHECK(bootstrap_quantile(d, 0.2) == 1.0);
  CHECK(bootstrap_quantile(d, 0.2000001) == 2.0);
  CHECK(bootstrap_quantile(d, 0.5) == 3.0);
  CHECK(bootstrap_quantile(d, 0.99) == 5.0);
  const auto flat = BootstrapDistribution::from_values({2.0, 2.0, 2.0}, 1.5);
  for (double a : {0.01, 0.5, 0.99}) CHECK(bootstrap_quantile(flat, a) == 0.5);
}

TEST_CASE("quantiles bracket the requested level") {
  CounterStream rng(4, 0);
  std::vector<double> v(101);
  for (double& x : v) x = std::floor(10.0 * rng.next_normal()) / 10.0;  // ties on purpose
  const auto d = BootstrapDistribution::from_values(v, 0.3);
  double prev = -1e300;
  for (double a = 0.005; a < 1.0; a += 0.01) {
    const double q = bootstrap_quantile(d, a);
    CHECK(q >= prev);
    prev = q;
    double below = 0.0, strictly = 0.0;
    for (Index k = 0; k < d.size(); ++k) {
      below += d.centered(k) <= q;
      strictly += d.centered(k) < q;
    }
    CHECK(below / double(d.size()) >= a);
    CHECK(strictly / double(d.size()) < a);
  }
}

TEST_CASE("percentile and Efron intervals") {
  const auto sym = BootstrapDistribution::from_values({-1.0, 1.0}, 0.0);
  const ConfidenceInterval p = percentile_interval(sym, 0.5);
  CHECK(p.lo == -1.0);
  CHECK(p.hi == 1.0);
  const ConfidenceInterval e = efron_interval(sym, 0.5);
  CHECK(e.lo == p.lo);
  CHECK(e.hi == p.hi);

  const auto flat = BootstrapDistribution::from_values({0.7, 0.7}, 0.7);
  CHECK(percentile_interval(flat, 0.05).lo == 0.7);
  CHECK(percentile_interval(flat, 0.05).hi == 0.7);

  // shifted draws move the two intervals in opposite directions
  const auto shifted = BootstrapDistribution::from_values({-0.5, 1.5}, 0.0);
  CHECK(percentile_interval(shifted, 0.5).lo == -1.5);
  CHECK(efron_interval(shifted, 0.5).hi == 1.5);

  // duality with shared quantiles
  CounterStream rng(8, 0);
  std::vector<double> v(999);
  for (double& x : v) x = 2.0 + 0.3 * rng.next_normal();
  const auto d = BootstrapDistribution::from_values(v, 2.05);
  for (double alpha : {0.01, 0.05, 0.1, 0.5}) {
    CHECK(percentile_interval(d, alpha).lo + efron_interval(d, alpha).hi == doctest::Approx(2.0 * 2.05).epsilon(1e-15));
    CHECK(percentile_interval(d, alpha).lo <= percentile_interval(d, alpha).hi);
  }
  CHECK_THROWS_AS(percentile_interval(d, 0.0), std::invalid_argument);
}

TEST_CASE("normal interval") {
  const ConfidenceInterval ci = normal_interval(0.3, 0.04, 100, 0.05);
  CHECK(near(ci.hi - 0.3, 1.9599639845400542 * 0.02, 1e-14));
  CHECK(near(0.3 - ci.lo, 1.9599639845400542 * 0.02, 1e-14));
  const ConfidenceInterval point = normal_interval(0.3, 0.0, 100, 0.05);
  CHECK(point.lo == 0.3);
  CHECK(point.hi == 0.3);
  CHECK_THROWS_AS(normal_interval(0.3, -1e-9, 100, 0.05), std::invalid_argument);
}

TEST_CASE("point estimate from the bootstrap median") {
  const auto sym = BootstrapDistribution::from_values({0.8, 1.0, 1.2}, 1.0);
  CHECK(percentile_point_estimate(sym) == 1.0);
}

TEST_CASE("corrected analog reproduces the plug-in percentile interval bitwise") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Sample s = testutil::random_sample(seed, 40 + Index(seed), 1);
    const BootstrapVariant ad = variant(Family::AD, 0.37);
    const BootstrapVariant tilde = variant(Family::AD_BC, 0.37, Variant::TildeBC);
    for (bool engine : {true, false}) {
      BootstrapOptions opt;
      opt.use_engine = engine;
      const ResamplePlan plan{Scheme::Standard, 499, 100 + seed};
      const BootstrapDistribution a = run_bootstrap(s, ad, plan, opt);
      const BootstrapDistribution b = run_bootstrap(s, tilde, plan, opt);
      for (double alpha : {0.05, 0.1, 0.32}) {
        const ConfidenceInterval pa = percentile_interval(a, alpha), pb = percentile_interval(b, alpha);
        CHECK(pa.lo == pb.lo);
        CHECK(pa.hi == pb.hi);
      }
    }
  }
}

TEST_CASE("method names") {
  for (auto m : {IntervalMethod::Percentile, IntervalMethod::Efron, IntervalMethod::Normal})
    CHECK(parse_interval_method(interval_method_name(m)) == m);
}
