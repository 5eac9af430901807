#include "adboot/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace adboot {

IntervalMethod parse_interval_method(std::string_view name) {
  if (name == "percentile") return IntervalMethod::Percentile;
  if (name == "efron") return IntervalMethod::Efron;
  if (name == "normal") return IntervalMethod::Normal;
  throw std::invalid_argument("unknown interval method '" + std::string(name) + "'");
}

std::string_view interval_method_name(IntervalMethod method) {
  switch (method) {
    case IntervalMethod::Percentile: return "percentile";
    case IntervalMethod::Efron: return "efron";
    case IntervalMethod::Normal: return "normal";
  }
  return "unknown";
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal quantile needs p in (0, 1)");
  // Acklam's rational approximation, then one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double lowp = 0.02425;
  double x;
  if (p < lowp) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - lowp) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Residual through erfc on the short tail side to keep relative accuracy.
  const double e = x < 0.0 ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - p
                           : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Index quantile_position(const BootstrapDistribution& dist, double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  const Index m = dist.size();
  if (m == 0) throw std::invalid_argument("empty bootstrap distribution");
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    return dist.raw[static_cast<std::size_t>(i)] < dist.raw[static_cast<std::size_t>(j)];
  });
  if (dist.weights.empty()) {
    const double md = static_cast<double>(m);
    Index k = static_cast<Index>(std::ceil(a * md));
    if (k > 1 && static_cast<double>(k - 1) / md >= a) --k;
    k = std::clamp<Index>(k, 1, m);
    return order[static_cast<std::size_t>(k - 1)];
  }
  double cum = 0.0;
  for (Index r = 0; r < m; ++r) {
    cum += dist.weights[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
    if (cum >= a - 1e-12) return order[static_cast<std::size_t>(r)];
  }
  return order.back();
}

double bootstrap_quantile(const BootstrapDistribution& dist, double a) {
  return dist.centered(quantile_position(dist, a));
}

namespace {
void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}
}  // namespace

// The raw and shift parts are combined separately so that a constant shift of
// the draws that is matched by the center drops out exactly.
ConfidenceInterval percentile_interval(const BootstrapDistribution& dist, double alpha) {
  check_alpha(alpha);
  const double rc = dist.raw_center, cs = dist.center_shift, ds = dist.draw_shift;
  const double upper = dist.raw[static_cast<std::size_t>(quantile_position(dist, 1.0 - alpha / 2.0))];
  const double lower = dist.raw[static_cast<std::size_t>(quantile_position(dist, alpha / 2.0))];
  ConfidenceInterval ci;
  ci.method = IntervalMethod::Percentile;
  ci.alpha = alpha;
  ci.lo = (rc - (upper - rc)) + (cs - (ds - cs));
  ci.hi = (rc - (lower - rc)) + (cs - (ds - cs));
  return ci;
}

ConfidenceInterval efron_interval(const BootstrapDistribution& dist, double alpha) {
  check_alpha(alpha);
  const double rc = dist.raw_center, cs = dist.center_shift, ds = dist.draw_shift;
  const double upper = dist.raw[static_cast<std::size_t>(quantile_position(dist, 1.0 - alpha / 2.0))];
  const double lower = dist.raw[static_cast<std::size_t>(quantile_position(dist, alpha / 2.0))];
  ConfidenceInterval ci;
  ci.method = IntervalMethod::Efron;
  ci.alpha = alpha;
  ci.lo = (rc + (lower - rc)) + (cs + (ds - cs));
  ci.hi = (rc + (upper - rc)) + (cs + (ds - cs));
  return ci;
}

ConfidenceInterval normal_interval(double theta_hat, double sigma_hat_sq, Index n, double alpha) {
  check_alpha(alpha);
  if (!(sigma_hat_sq >= 0.0)) throw std::invalid_argument("variance must be nonnegative");
  if (n < 1) throw std::invalid_argument("n must be positive");
  const double half = inverse_normal_cdf(1.0 - alpha / 2.0) * std::sqrt(sigma_hat_sq / static_cast<double>(n));
  return {theta_hat - half, theta_hat + half, IntervalMethod::Normal, alpha};
}

double percentile_point_estimate(const BootstrapDistribution& dist) {
  const double med = dist.raw[static_cast<std::size_t>(quantile_position(dist, 0.5))];
  const double rc = dist.raw_center, cs = dist.center_shift;
  return (2.0 * rc - med) + (2.0 * cs - dist.draw_shift);
}

}  // namespace adboot
