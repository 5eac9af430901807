#pragma once

#include "adboot/bootstrap.hpp"

#include <string_view>

namespace adboot {

enum class IntervalMethod { Percentile, Efron, Normal };

IntervalMethod parse_interval_method(std::string_view name);
std::string_view interval_method_name(IntervalMethod method);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  IntervalMethod method = IntervalMethod::Percentile;
  double alpha = 0.05;

  bool contains(double x) const { return lo <= x && x <= hi; }
  double length() const { return hi - lo; }
};

// Standard normal quantile, |error| below 1e-12 on (1e-300, 1 - 1e-16).
double inverse_normal_cdf(double p);
double normal_cdf(double x);

// Position (into dist.raw) of the order statistic inf{q : P*[draw <= q] >= a}.
Index quantile_position(const BootstrapDistribution& dist, double a);

// q*_a of the centered draws.
double bootstrap_quantile(const BootstrapDistribution& dist, double a);

ConfidenceInterval percentile_interval(const BootstrapDistribution& dist, double alpha);
ConfidenceInterval efron_interval(const BootstrapDistribution& dist, double alpha);
ConfidenceInterval normal_interval(double theta_hat, double sigma_hat_sq, Index n, double alpha);

// 2 * center - median of the draws.
double percentile_point_estimate(const BootstrapDistribution& dist);

}  // namespace adboot
