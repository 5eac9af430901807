#pragma once

#include "adboot/estimators.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace adboot {

// One scaled kernel appearing in a pair term: coefficient * K_h or coefficient * K^D_h.
struct KernelComponent {
  KernelPairs::Kind kind = KernelPairs::Kind::Kernel;
  double h = 1.0;
  double coefficient = 1.0;
};

// V_ij(x, y) = sum_t slot_weight_t(i, j) * value_t(x, y) + offset, where value_t
// is evaluated on data indices and slot_weight_t on positions in the sample.
struct PairTerm {
  std::function<double(Index, Index)> slot_weight;  // empty means 1
  std::function<double(Index, Index)> value;
  std::vector<KernelComponent> kernels;  // empty when value is not a known kernel
  bool symmetric = false;                // value(k, l) == value(l, k)
};

class VRepresentation {
 public:
  VRepresentation(Index n, std::vector<PairTerm> terms, double offset = 0.0,
                  std::optional<KernelSpec> kernel = std::nullopt);

  static VRepresentation for_estimator(const Sample& sample, const EstimatorConfig& config);
  static VRepresentation from_matrix(const Eigen::MatrixXd& v);

  Index size() const { return n_; }
  double offset() const { return offset_; }
  const std::vector<PairTerm>& terms() const { return terms_; }
  const std::optional<KernelSpec>& kernel() const { return kernel_; }

  // V_ij at the sample itself.
  double operator()(Index i, Index j) const { return at(i, j, i, j); }
  // Slot pair (i, j) evaluated at data points (k, l).
  double at(Index i, Index j, Index k, Index l) const;
  // n^-2 sum_ij V_ij at the realization x_{idx[i]} (identity when idx is empty).
  double mean(const std::vector<Index>& idx = {}) const;
  Eigen::MatrixXd materialize() const;

 private:
  Index n_;
  std::vector<PairTerm> terms_;
  double offset_;
  std::optional<KernelSpec> kernel_;
};

struct HoeffdingParts {
  double beta = 0.0;
  Eigen::VectorXd linear;  // L_i
  Eigen::MatrixXd quad;    // W_ij for i < j; empty when streamed
  double quad_sum = 0.0;   // sum_{i<j} W_ij
  double quad_mean = 0.0;
  double quad_var = 0.0;
  double estimate = 0.0;   // statistic at the realization
  double center = 0.0;     // theta-hat (bootstrap) or theta0 (population)
  double reconstruction_residual = 0.0;  // relative
  bool bootstrap = true;

  Index n() const { return linear.size(); }
  double linear_component() const;  // n^-1 sum L_i
  double quad_component() const;    // 2/(n(n-1)) sum_{i<j} W_ij
  double linear_mean() const;
  double linear_var() const;
};

// Matrices above this size are not stored; the quadratic part is summarized.
inline constexpr Index kMaterializeLimit = 2000;

// Bootstrap version: expectations are finite sums over the empirical
// distribution; the parts are evaluated at the realization x*_i = x_{idx[i]}
// (the sample itself when idx is empty).
HoeffdingParts decompose_bootstrap(const Sample& sample, const VRepresentation& vrep,
                                   const std::vector<Index>& realization = {});

// L*_i as a function on the data points (length n).
Eigen::VectorXd bootstrap_linear_function(const VRepresentation& vrep, Index slot);
// W*_ij as a function on pairs of data points (n x n).
Eigen::MatrixXd bootstrap_quadratic_kernel(const VRepresentation& vrep, Index slot_i, Index slot_j);

class PopulationTruth {
 public:
  virtual ~PopulationTruth() = default;
  virtual const KernelSpec& kernel() const = 0;
  virtual double theta0() const = 0;
  // E[k_h(x - X)] with k = K or K^D.
  virtual double smoothed_density(KernelPairs::Kind kind, double h, const Eigen::VectorXd& x) const = 0;
  // E[k_h(X - X')] for independent X, X'.
  virtual double smoothed_target(KernelPairs::Kind kind, double h) const = 0;
};

HoeffdingParts decompose_population(const Sample& sample, const VRepresentation& vrep, const PopulationTruth& truth);

}  // namespace adboot
