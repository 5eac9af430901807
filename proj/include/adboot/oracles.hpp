#pragma once

#include "adboot/hoeffding.hpp"

#include <cstdint>
#include <vector>

namespace adboot {

struct MixtureComponent {
  double weight = 1.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd var;  // diagonal covariance
};

// Finite Gaussian mixture with diagonal covariances.
class DensityModel {
 public:
  explicit DensityModel(std::vector<MixtureComponent> components);
  static DensityModel standard_normal(int dim = 1);

  int dim() const { return dim_; }
  const std::vector<MixtureComponent>& components() const { return components_; }

  double density(const Eigen::VectorXd& x) const;
  // Distribution function, d = 1 only.
  double cdf(double x) const;
  Eigen::VectorXd mean() const;

 private:
  std::vector<MixtureComponent> components_;
  int dim_ = 1;
};

double theta0(const DensityModel& model);
// int f^3
double integral_cube(const DensityModel& model);
double sigma0_sq(const DensityModel& model);
double f0_delta(const DensityModel& model, const Eigen::VectorXd& x);
// L0(x) = 2 (f(x) - theta0)
double influence(const DensityModel& model, const Eigen::VectorXd& x);

// E[k_h(x - X)] and E[k_h(X - X')] for k = K or K^D, closed form.
double smoothed_density(const DensityModel& model, const KernelSpec& kernel, KernelPairs::Kind kind, double h,
                        const Eigen::VectorXd& x);
double smoothed_target(const DensityModel& model, const KernelSpec& kernel, KernelPairs::Kind kind, double h);

// Quadrature versions used to cross-check the closed forms (d <= 2).
double theta0_quadrature(const DensityModel& model);
double sigma0_sq_quadrature(const DensityModel& model);
double f0_delta_quadrature(const DensityModel& model, const Eigen::VectorXd& x);
// int k(t) f0^D(h t) dt by a tensor Gauss-Hermite rule.
double smoothed_target_quadrature(const DensityModel& model, const KernelSpec& kernel, KernelPairs::Kind kind,
                                  double h, int nodes_per_axis = 60);

struct TruthValues {
  double theta0 = 0.0;
  double sigma0_sq = 0.0;
  double theta_n = 0.0;  // E[K_h(X - X')]
  double theta_n_isd = 0.0;  // E[K^D_h(X - X')]
  double S_effective = 0.0;
};

TruthValues truth_values(const DensityModel& model, const KernelSpec& kernel, double h);

// Iid draws: component by a categorical draw, then independent normals.
Sample sample_from(const DensityModel& model, Index n, std::uint64_t seed);

class GaussianMixtureTruth : public PopulationTruth {
 public:
  GaussianMixtureTruth(DensityModel model, KernelSpec kernel);

  const KernelSpec& kernel() const override { return kernel_; }
  double theta0() const override { return theta0_; }
  double smoothed_density(KernelPairs::Kind kind, double h, const Eigen::VectorXd& x) const override;
  double smoothed_target(KernelPairs::Kind kind, double h) const override;
  const DensityModel& model() const { return model_; }

 private:
  DensityModel model_;
  KernelSpec kernel_;
  double theta0_;
};

}  // namespace adboot
