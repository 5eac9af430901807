#include "adboot/oracles.hpp"

#include "adboot/quadrature.hpp"
#include "adboot/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adboot {

namespace {

using Kind = KernelPairs::Kind;

double normal_pdf(double x, double var) {
  return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// E[P(U^2)] for U ~ N(m, t), P given by coefficients of U^0, U^2, ...
template <std::size_t N>
double poly_moment(const std::array<double, N>& coef, double m, double t) {
  const double m2 = m * m;
  const double moments[5] = {
      1.0,
      m2 + t,
      m2 * m2 + 6.0 * m2 * t + 3.0 * t * t,
      m2 * m2 * m2 + 15.0 * m2 * m2 * t + 45.0 * m2 * t * t + 15.0 * t * t * t,
      m2 * m2 * m2 * m2 + 28.0 * m2 * m2 * m2 * t + 210.0 * m2 * m2 * t * t + 420.0 * m2 * t * t * t +
          105.0 * t * t * t * t,
  };
  double out = 0.0;
  for (std::size_t k = 0; k < N; ++k) out += coef[k] * moments[k];
  return out;
}

// E[k_h(z - Y)] for Y ~ N(0, s) in one coordinate, k = P(u^2) N(u; 0, a).
double smoothed_factor(const KernelSpec& kernel, Kind kind, double h, double z, double s) {
  const double a = kind == Kind::Kernel ? 1.0 : 2.0;
  const double mp = z / h;
  const double v = s / (h * h);
  const double m = a * mp / (a + v);
  const double t = a * v / (a + v);
  const double e = kind == Kind::Kernel ? poly_moment(kernel.base_coefficients(), m, t)
                                        : poly_moment(kernel.convolution_coefficients(), m, t);
  return normal_pdf(z, a * h * h + s) * e;
}

void check_kernel(const DensityModel& model, const KernelSpec& kernel) {
  if (model.dim() != kernel.dim()) throw std::invalid_argument("model and kernel dimensions differ");
}

}  // namespace

DensityModel::DensityModel(std::vector<MixtureComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("mixture needs at least one component");
  dim_ = static_cast<int>(components_.front().mean.size());
  if (dim_ < 1) throw std::invalid_argument("mixture dimension must be positive");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.mean.size() != dim_ || c.var.size() != dim_) throw std::invalid_argument("mixture component dimensions differ");
    if (!(c.weight > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    if (!(c.var.array() > 0.0).all() || !c.var.allFinite() || !c.mean.allFinite())
      throw std::invalid_argument("mixture variances must be positive and finite");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-14) throw std::invalid_argument("mixture weights must sum to 1");
}

DensityModel DensityModel::standard_normal(int dim) {
  return DensityModel({{1.0, Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)}});
}

double DensityModel::density(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("point has wrong dimension");
  double out = 0.0;
  for (const auto& c : components_) {
    double p = c.weight;
    for (int j = 0; j < dim_; ++j) p *= normal_pdf(x(j) - c.mean(j), c.var(j));
    out += p;
  }
  return out;
}

double DensityModel::cdf(double x) const {
  if (dim_ != 1) throw std::invalid_argument("cdf is defined for d = 1 only");
  double out = 0.0;
  for (const auto& c : components_) out += c.weight * 0.5 * std::erfc(-(x - c.mean(0)) / std::sqrt(2.0 * c.var(0)));
  return out;
}

Eigen::VectorXd DensityModel::mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim_);
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

double f0_delta(const DensityModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.dim()) throw std::invalid_argument("point has wrong dimension");
  double out = 0.0;
  for (const auto& ck : model.components())
    for (const auto& cl : model.components()) {
      double p = ck.weight * cl.weight;
      for (int j = 0; j < model.dim(); ++j) p *= normal_pdf(x(j) - (cl.mean(j) - ck.mean(j)), ck.var(j) + cl.var(j));
      out += p;
    }
  return out;
}

double theta0(const DensityModel& model) { return f0_delta(model, Eigen::VectorXd::Zero(model.dim())); }

double integral_cube(const DensityModel& model) {
  double out = 0.0;
  for (const auto& a : model.components())
    for (const auto& b : model.components())
      for (const auto& c : model.components()) {
        double p = a.weight * b.weight * c.weight;
        for (int j = 0; j < model.dim(); ++j) {
          const double s1 = a.var(j), s2 = b.var(j), s3 = c.var(j);
          const double m12 = (a.mean(j) * s2 + b.mean(j) * s1) / (s1 + s2);
          const double s12 = s1 * s2 / (s1 + s2);
          p *= normal_pdf(a.mean(j) - b.mean(j), s1 + s2) * normal_pdf(c.mean(j) - m12, s12 + s3);
        }
        out += p;
      }
  return out;
}

double sigma0_sq(const DensityModel& model) {
  const double t = theta0(model);
  return std::max(0.0, 4.0 * (integral_cube(model) - t * t));
}

double influence(const DensityModel& model, const Eigen::VectorXd& x) {
  return 2.0 * (model.density(x) - theta0(model));
}

double smoothed_density(const DensityModel& model, const KernelSpec& kernel, Kind kind, double h,
                        const Eigen::VectorXd& x) {
  check_kernel(model, kernel);
  detail::check_bandwidth(h);
  if (x.size() != model.dim()) throw std::invalid_argument("point has wrong dimension");
  double out = 0.0;
  for (const auto& c : model.components()) {
    double p = c.weight;
    for (int j = 0; j < model.dim(); ++j) p *= smoothed_factor(kernel, kind, h, x(j) - c.mean(j), c.var(j));
    out += p;
  }
  return out;
}

double smoothed_target(const DensityModel& model, const KernelSpec& kernel, Kind kind, double h) {
  check_kernel(model, kernel);
  detail::check_bandwidth(h);
  double out = 0.0;
  for (const auto& ck : model.components())
    for (const auto& cl : model.components()) {
      double p = ck.weight * cl.weight;
      for (int j = 0; j < model.dim(); ++j)
        p *= smoothed_factor(kernel, kind, h, cl.mean(j) - ck.mean(j), ck.var(j) + cl.var(j));
      out += p;
    }
  return out;
}

namespace {

constexpr double kQuadTol = 1e-14;

// int over R^d (d <= 2) by nested adaptive rules.
double integrate_rd(int d, const std::function<double(const Eigen::VectorXd&)>& f) {
  if (d == 1) {
    return integrate_real_line([&](double x) { return f(Eigen::VectorXd::Constant(1, x)); }, kQuadTol, 1e-13).value;
  }
  if (d == 2) {
    return integrate_real_line(
               [&](double x) {
                 return integrate_real_line(
                            [&](double y) {
                              Eigen::VectorXd p(2);
                              p << x, y;
                              return f(p);
                            },
                            kQuadTol, 1e-13)
                     .value;
               },
               kQuadTol, 1e-13)
        .value;
  }
  throw std::invalid_argument("quadrature cross-checks support d <= 2");
}

}  // namespace

double theta0_quadrature(const DensityModel& model) {
  return integrate_rd(model.dim(), [&](const Eigen::VectorXd& x) {
    const double f = model.density(x);
    return f * f;
  });
}

double sigma0_sq_quadrature(const DensityModel& model) {
  const double t = theta0_quadrature(model);
  const double cube = integrate_rd(model.dim(), [&](const Eigen::VectorXd& x) {
    const double f = model.density(x);
    return f * f * f;
  });
  return 4.0 * (cube - t * t);
}

double f0_delta_quadrature(const DensityModel& model, const Eigen::VectorXd& x) {
  return integrate_rd(model.dim(), [&](const Eigen::VectorXd& u) { return model.density(u) * model.density(x + u); });
}

double smoothed_target_quadrature(const DensityModel& model, const KernelSpec& kernel, Kind kind, double h,
                                  int nodes_per_axis) {
  check_kernel(model, kernel);
  detail::check_bandwidth(h);
  // k(t) = P(t^2) N(t; 0, a): integrate P(t^2) f0^D(h t) against N(0, a) per axis.
  const QuadratureRule rule = gauss_hermite_normal(nodes_per_axis);
  const double scale = kind == Kind::Kernel ? 1.0 : std::numbers::sqrt2;
  const int d = model.dim();
  auto poly = [&](double t) {
    const double t2 = t * t;
    if (kind == Kind::Kernel) {
      const auto& c = kernel.base_coefficients();
      return c[0] + t2 * (c[1] + t2 * c[2]);
    }
    const auto& c = kernel.convolution_coefficients();
    return c[0] + t2 * (c[1] + t2 * (c[2] + t2 * (c[3] + t2 * c[4])));
  };
  std::vector<int> pos(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd t(d);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      t(j) = scale * rule.nodes(pos[static_cast<std::size_t>(j)]);
      w *= rule.weights(pos[static_cast<std::size_t>(j)]) * poly(t(j));
    }
    total += w * f0_delta(model, h * t);
    int j = 0;
    while (j < d && ++pos[static_cast<std::size_t>(j)] == nodes_per_axis) pos[static_cast<std::size_t>(j++)] = 0;
    if (j == d) break;
  }
  return total;
}

TruthValues truth_values(const DensityModel& model, const KernelSpec& kernel, double h) {
  TruthValues v;
  v.theta0 = theta0(model);
  v.sigma0_sq = sigma0_sq(model);
  v.theta_n = smoothed_target(model, kernel, Kind::Kernel, h);
  v.theta_n_isd = smoothed_target(model, kernel, Kind::Convolution, h);
  v.S_effective = kernel.smoothness();
  return v;
}

Sample sample_from(const DensityModel& model, Index n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample size must be at least 2");
  CounterStream rng(seed, static_cast<std::uint64_t>(Stream::Sample));
  const auto& comps = model.components();
  Eigen::MatrixXd x(n, model.dim());
  for (Index i = 0; i < n; ++i) {
    std::size_t k = 0;
    if (comps.size() > 1) {
      const double u = rng.next_open01();
      double cum = 0.0;
      for (k = 0; k + 1 < comps.size(); ++k) {
        cum += comps[k].weight;
        if (u < cum) break;
      }
    }
    for (int j = 0; j < model.dim(); ++j) x(i, j) = comps[k].mean(j) + std::sqrt(comps[k].var(j)) * rng.next_normal();
  }
  return Sample(std::move(x), DuplicatePolicy::Allow);
}

GaussianMixtureTruth::GaussianMixtureTruth(DensityModel model, KernelSpec kernel)
    : model_(std::move(model)), kernel_(kernel), theta0_(adboot::theta0(model_)) {
  check_kernel(model_, kernel_);
}

double GaussianMixtureTruth::smoothed_density(Kind kind, double h, const Eigen::VectorXd& x) const {
  return adboot::smoothed_density(model_, kernel_, kind, h, x);
}

double GaussianMixtureTruth::smoothed_target(Kind kind, double h) const {
  return adboot::smoothed_target(model_, kernel_, kind, h);
}

}  // namespace adboot
