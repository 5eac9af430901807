#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adboot {

using Index = Eigen::Index;

enum class KernelFamily { Gaussian2, Gaussian4, Gaussian6 };

KernelFamily parse_kernel_family(std::string_view name);
std::string_view kernel_family_name(KernelFamily family);
int kernel_order(KernelFamily family);

// Product kernel built from one of the Gaussian-based univariate kernels
//   k(u) = p(u^2) phi(u)
// whose self-convolution has the closed form
//   k^D(u) = r(u^2) phi_2(u),   phi_2 = N(0, 2) density.
class KernelSpec {
 public:
  KernelSpec(KernelFamily family, int dim);

  KernelFamily family() const { return family_; }
  int dim() const { return dim_; }
  int order() const { return kernel_order(family_); }
  // S = P/2 for the smooth (Gaussian mixture) test densities.
  double smoothness() const { return order() / 2.0; }

  template <class Scalar>
  Scalar univariate(Scalar u) const {
    const Scalar u2 = u * u;
    Scalar poly = Scalar(base_[2]);
    poly = poly * u2 + Scalar(base_[1]);
    poly = poly * u2 + Scalar(base_[0]);
    using std::exp;
    return poly * exp(-u2 / Scalar(2)) * Scalar(inv_sqrt_2pi);
  }

  template <class Scalar>
  Scalar univariate_convolution(Scalar u) const {
    const Scalar u2 = u * u;
    Scalar poly = Scalar(conv_[4]);
    for (int k = 3; k >= 0; --k) poly = poly * u2 + Scalar(conv_[k]);
    using std::exp;
    return poly * exp(-u2 / Scalar(4)) * Scalar(inv_sqrt_4pi);
  }

  // Polynomial factor p in k(u) = p(u) phi(u), coefficients of u^0, u^2, u^4.
  const std::array<double, 3>& base_coefficients() const { return base_; }
  // Polynomial factor r in k^D(u) = r(u) phi_2(u), coefficients of u^0 .. u^8 (even powers).
  const std::array<double, 5>& convolution_coefficients() const { return conv_; }

  // K(0) and K^D(0) = int K^2 for the d-dimensional product kernel.
  double at_zero() const { return at_zero_; }
  double convolution_at_zero() const { return conv_at_zero_; }

  static constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;
  static constexpr double inv_sqrt_4pi = 0.282094791773878143474039725780;

 private:
  KernelFamily family_;
  int dim_;
  std::array<double, 3> base_{};
  std::array<double, 5> conv_{};
  double at_zero_ = 0.0;
  double conv_at_zero_ = 0.0;
};

namespace detail {
inline void check_point(const KernelSpec& spec, Index size) {
  if (size != spec.dim()) throw std::invalid_argument("kernel argument has wrong dimension");
}
inline void check_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("bandwidth must be positive");
}
inline void check_gj_ratio(double c) {
  if (!(c > 0.0) || c == 1.0 || !std::isfinite(c))
    throw std::invalid_argument("jackknife ratio c must be positive and different from 1");
}
}  // namespace detail

inline double bandwidth_power(double h, int d) {
  double out = 1.0;
  for (int k = 0; k < d; ++k) out *= h;
  return out;
}

template <class Derived>
typename Derived::Scalar eval_kernel(const KernelSpec& spec, const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  detail::check_point(spec, u.size());
  Scalar out(1);
  for (Index j = 0; j < u.size(); ++j) out *= spec.univariate(u(j));
  return out;
}

template <class Derived>
typename Derived::Scalar eval_convolution(const KernelSpec& spec, const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  detail::check_point(spec, u.size());
  Scalar out(1);
  for (Index j = 0; j < u.size(); ++j) out *= spec.univariate_convolution(u(j));
  return out;
}

// K_n(x) = h^{-d} K(x / h)
template <class Derived>
typename Derived::Scalar eval_scaled(const KernelSpec& spec, double h, const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  detail::check_bandwidth(h);
  detail::check_point(spec, x.size());
  Scalar out(1);
  for (Index j = 0; j < x.size(); ++j) out *= spec.univariate(Scalar(x(j) / h));
  return out / Scalar(bandwidth_power(h, spec.dim()));
}

template <class Derived>
typename Derived::Scalar eval_scaled_convolution(const KernelSpec& spec, double h,
                                                 const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  detail::check_bandwidth(h);
  detail::check_point(spec, x.size());
  Scalar out(1);
  for (Index j = 0; j < x.size(); ++j) out *= spec.univariate_convolution(Scalar(x(j) / h));
  return out / Scalar(bandwidth_power(h, spec.dim()));
}

// K^GJ(u) = [K(u) - K(u / c)] / (1 - c^d)
template <class Derived>
typename Derived::Scalar eval_gj_kernel(const KernelSpec& spec, double c, const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  detail::check_gj_ratio(c);
  detail::check_point(spec, u.size());
  Scalar near(1), far(1);
  for (Index j = 0; j < u.size(); ++j) {
    near *= spec.univariate(Scalar(u(j)));
    far *= spec.univariate(Scalar(u(j) / c));
  }
  return (near - far) / Scalar(1.0 - bandwidth_power(c, spec.dim()));
}

// Scalar conveniences for d = 1.
double eval_kernel(const KernelSpec& spec, double u);
double eval_convolution(const KernelSpec& spec, double u);
double eval_scaled(const KernelSpec& spec, double h, double x);
double eval_gj_kernel(const KernelSpec& spec, double c, double u);

// Weights a, b of the generalized jackknife combination a*T(h) + b*T(ch).
struct JackknifeWeights {
  double near;
  double far;
};
JackknifeWeights jackknife_weights(double c, int d);

struct MomentResidual {
  std::vector<int> multi_index;
  double value = 0.0;
  double target = 0.0;
  double residual = 0.0;
};

struct ConditionKReport {
  int claimed_order = 0;
  int nodes_per_axis = 0;
  std::vector<MomentResidual> moments;
  double max_residual = 0.0;
  bool passes(double tol = 1e-8) const { return max_residual <= tol; }
};

// Moments int u^l K(u) du for every multi-index with |l|_1 < claimed_order, by a
// tensor Gauss-Hermite rule. claimed_order <= 0 means the kernel's own order.
ConditionKReport verify_condition_k(const KernelSpec& spec, int claimed_order = 0, int nodes_per_axis = 64);

struct BandwidthRule {
  double c0 = 1.0;
  double gamma = 0.0;

  BandwidthRule() = default;
  BandwidthRule(double c0_, double gamma_);
  double at(Index n) const;
};

enum class BandwidthRegime { FailsBminus, Bminus, B, Bplus };

std::string_view regime_name(BandwidthRegime regime);
BandwidthRegime classify_bandwidth_regime(const BandwidthRule& rule, int d, double S);

}  // namespace adboot
