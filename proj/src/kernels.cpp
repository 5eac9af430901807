#include "adboot/kernels.hpp"

#include "adboot/quadrature.hpp"

#include <algorithm>
#include <functional>

namespace adboot {

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gauss2") return KernelFamily::Gaussian2;
  if (name == "gauss4") return KernelFamily::Gaussian4;
  if (name == "gauss6") return KernelFamily::Gaussian6;
  throw std::invalid_argument("unknown kernel '" + std::string(name) + "' (expected gauss2, gauss4 or gauss6)");
}

std::string_view kernel_family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian2: return "gauss2";
    case KernelFamily::Gaussian4: return "gauss4";
    case KernelFamily::Gaussian6: return "gauss6";
  }
  return "unknown";
}

int kernel_order(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian2: return 2;
    case KernelFamily::Gaussian4: return 4;
    case KernelFamily::Gaussian6: return 6;
  }
  return 0;
}

KernelSpec::KernelSpec(KernelFamily family, int dim) : family_(family), dim_(dim) {
  if (dim < 1) throw std::invalid_argument("kernel dimension must be positive");
  if (!(2 * order() > dim)) {
    throw std::invalid_argument("kernel order " + std::to_string(order()) + " does not exceed d/2 for d = " +
                                std::to_string(dim));
  }
  switch (family) {
    case KernelFamily::Gaussian2:
      base_ = {1.0, 0.0, 0.0};
      conv_ = {1.0, 0.0, 0.0, 0.0, 0.0};
      break;
    case KernelFamily::Gaussian4:
      base_ = {1.5, -0.5, 0.0};
      conv_ = {27.0 / 16.0, -7.0 / 16.0, 1.0 / 64.0, 0.0, 0.0};
      break;
    case KernelFamily::Gaussian6:
      base_ = {15.0 / 8.0, -5.0 / 4.0, 1.0 / 8.0};
      conv_ = {2265.0 / 1024.0, -605.0 / 512.0, 289.0 / 2048.0, -11.0 / 2048.0, 1.0 / 16384.0};
      break;
  }
  const double k0 = univariate(0.0);
  const double kd0 = univariate_convolution(0.0);
  at_zero_ = 1.0;
  conv_at_zero_ = 1.0;
  for (int j = 0; j < dim; ++j) {
    at_zero_ *= k0;
    conv_at_zero_ *= kd0;
  }
}

namespace {
void require_dim_one(const KernelSpec& spec) {
  if (spec.dim() != 1) throw std::invalid_argument("scalar kernel argument requires dim = 1");
}
}  // namespace

double eval_kernel(const KernelSpec& spec, double u) {
  require_dim_one(spec);
  return spec.univariate(u);
}

double eval_convolution(const KernelSpec& spec, double u) {
  require_dim_one(spec);
  return spec.univariate_convolution(u);
}

double eval_scaled(const KernelSpec& spec, double h, double x) {
  require_dim_one(spec);
  return eval_scaled(spec, h, Eigen::Matrix<double, 1, 1>(x));
}

double eval_gj_kernel(const KernelSpec& spec, double c, double u) {
  require_dim_one(spec);
  return eval_gj_kernel(spec, c, Eigen::Matrix<double, 1, 1>(u));
}

JackknifeWeights jackknife_weights(double c, int d) {
  detail::check_gj_ratio(c);
  const double cd = bandwidth_power(c, d);
  return {1.0 / (1.0 - cd), -cd / (1.0 - cd)};
}

ConditionKReport verify_condition_k(const KernelSpec& spec, int claimed_order, int nodes_per_axis) {
  const int order = claimed_order > 0 ? claimed_order : spec.order();
  const int d = spec.dim();
  const QuadratureRule rule = gauss_hermite_normal(nodes_per_axis);

  // All multi-indices with |l|_1 < order.
  std::vector<std::vector<int>> indices;
  std::vector<int> cur(d, 0);
  std::function<void(int, int)> build = [&](int axis, int budget) {
    if (axis == d) {
      indices.push_back(cur);
      return;
    }
    for (int v = 0; v <= budget; ++v) {
      cur[axis] = v;
      build(axis + 1, budget - v);
    }
    cur[axis] = 0;
  };
  build(0, order - 1);

  // K(u) = prod phi(u_j) * ratio(u); integrate ratio(u) u^l against the normal weight.
  std::vector<double> sums(indices.size(), 0.0);
  std::vector<int> pos(d, 0);
  Eigen::VectorXd u(d);
  const Index m = rule.nodes.size();
  while (true) {
    double w = 1.0;
    double phi_prod = 1.0;
    for (int j = 0; j < d; ++j) {
      const double x = rule.nodes(pos[j]);
      u(j) = x;
      w *= rule.weights(pos[j]);
      phi_prod *= KernelSpec::inv_sqrt_2pi * std::exp(-0.5 * x * x);
    }
    const double ratio = eval_kernel(spec, u) / phi_prod;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      double mono = 1.0;
      for (int j = 0; j < d; ++j)
        for (int p = 0; p < indices[k][j]; ++p) mono *= u(j);
      sums[k] += w * ratio * mono;
    }
    int axis = 0;
    while (axis < d && ++pos[axis] == m) pos[axis++] = 0;
    if (axis == d) break;
  }

  ConditionKReport report;
  report.claimed_order = order;
  report.nodes_per_axis = nodes_per_axis;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    MomentResidual r;
    r.multi_index = indices[k];
    r.value = sums[k];
    const bool is_zero = std::all_of(indices[k].begin(), indices[k].end(), [](int v) { return v == 0; });
    r.target = is_zero ? 1.0 : 0.0;
    r.residual = std::abs(r.value - r.target);
    report.max_residual = std::max(report.max_residual, r.residual);
    report.moments.push_back(std::move(r));
  }
  return report;
}

BandwidthRule::BandwidthRule(double c0_, double gamma_) : c0(c0_), gamma(gamma_) {
  if (!(c0 > 0.0)) throw std::invalid_argument("bandwidth constant c0 must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("bandwidth exponent must be nonnegative");
}

double BandwidthRule::at(Index n) const { return c0 * std::pow(static_cast<double>(n), -gamma); }

std::string_view regime_name(BandwidthRegime regime) {
  switch (regime) {
    case BandwidthRegime::FailsBminus: return "fails-B-";
    case BandwidthRegime::Bminus: return "B-";
    case BandwidthRegime::B: return "B";
    case BandwidthRegime::Bplus: return "B+";
  }
  return "unknown";
}

BandwidthRegime classify_bandwidth_regime(const BandwidthRule& rule, int d, double S) {
  if (d < 1 || !(S > 0.0)) throw std::invalid_argument("regime classification needs d >= 1 and S > 0");
  const double g = rule.gamma;
  if (!(g > 0.0 && g < 1.0 / d)) return BandwidthRegime::FailsBminus;
  if (!(g > 1.0 / (4.0 * S))) return BandwidthRegime::Bminus;
  if (!(g < 1.0 / (2.0 * d))) return BandwidthRegime::B;
  return BandwidthRegime::Bplus;
}

}  // namespace adboot
