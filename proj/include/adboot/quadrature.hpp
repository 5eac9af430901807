#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace adboot {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Gauss-Hermite rule for int e^{-x^2} f(x) dx (Golub-Welsch).
QuadratureRule gauss_hermite(int n);
// Same rule rescaled for int phi(x) f(x) dx with phi the N(0,1) density.
QuadratureRule gauss_hermite_normal(int n);

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod (7/15) on [a, b], optionally split at
// the given interior break points first.
IntegrationResult integrate_adaptive(const Integrand& f, double a, double b, double abs_tol = 1e-12,
                                     double rel_tol = 1e-12, const std::vector<double>& breaks = {},
                                     int max_intervals = 20000);

// Integral over the real line using x = t / (1 - t^2) on (-1, 1).
IntegrationResult integrate_real_line(const Integrand& f, double abs_tol = 1e-12, double rel_tol = 1e-12,
                                      int max_intervals = 20000);

}  // namespace adboot
