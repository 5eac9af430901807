#pragma once

#include "adboot/kernels.hpp"
#include "adboot/parallel.hpp"
#include "adboot/sample.hpp"

#include <memory>
#include <optional>
#include <string_view>

namespace adboot {

enum class Family { AD, AD_BC, AD_GJ, AD_LO, ISD, ISD_BC, ISD_GJ, ISD_LO, ISD_DCF, LR, LR_BC, LR_GJ, LR_LO };

Family parse_family(std::string_view name);
std::string_view family_name(Family family);
bool is_gj(Family family);
bool is_leave_out(Family family);  // *_LO
bool needs_blocks(Family family);  // *_LO and ISD_DCF
bool is_bias_corrected(Family family);
bool is_lr(Family family);
bool is_isd(Family family);
bool is_ad(Family family);

// Block count sentinel meaning B = n.
inline constexpr Index kBlocksN = -1;

struct EstimatorConfig {
  Family family = Family::AD;
  KernelSpec kernel{KernelFamily::Gaussian2, 1};
  double h = 1.0;
  std::optional<double> gj_c;
  std::optional<Index> blocks;  // a count in [2, n] or kBlocksN

  // Throws std::invalid_argument for missing or inconsistent parameters.
  void validate(Index n) const;
  BlockScheme block_scheme(Index n) const;
};

struct HoeffdingParts;

struct EstimatorResult {
  double value = 0.0;
  EstimatorConfig config;
  Index n = 0;
  Index d = 0;
  std::shared_ptr<const HoeffdingParts> diagnostics;
};

struct EstimateOptions {
  bool diagnostics = false;
  int workers = 1;
};

// Pair values K_n(X_i - X_j) or K^D_n(X_i - X_j) computed on demand.
class KernelPairs {
 public:
  enum class Kind { Kernel, Convolution };
  KernelPairs(const Sample& sample, const KernelSpec& kernel, double h, Kind kind);

  double operator()(Index i, Index j) const;
  // Value at zero difference: K(0)/h^d or K^D(0)/h^d.
  double diagonal() const { return diag_; }
  Index size() const { return sample_.n(); }

 private:
  const Sample& sample_;
  const KernelSpec& kernel_;
  double h_;
  double hd_;
  Kind kind_;
  double diag_;
};

// Pair values read from a precomputed symmetric Gram matrix.
class GramPairs {
 public:
  explicit GramPairs(const Eigen::MatrixXd& gram) : gram_(gram) {}
  double operator()(Index i, Index j) const { return gram_(i, j); }
  double diagonal() const { return gram_(0, 0); }
  Index size() const { return gram_.rows(); }

 private:
  const Eigen::MatrixXd& gram_;
};

// Gram matrix of a pair source (symmetric, filled from the upper triangle).
Eigen::MatrixXd kernel_gram(const Sample& sample, const KernelSpec& kernel, double h, KernelPairs::Kind kind);

// Families written against any pair source so the bootstrap engine and the
// direct path share one reduction order.
namespace core {

template <class Pairs>
double plugin(const Pairs& g, int workers = 1) {
  const Index n = g.size();
  const double upper = upper_pair_sum(n, g, workers);
  const double nd = static_cast<double>(n);
  return (2.0 * upper + nd * g.diagonal()) / (nd * nd);
}

template <class Pairs>
double leave_out(const Pairs& g, const BlockScheme& blocks, int workers = 1) {
  const Index n = g.size();
  auto term = [&](Index i, Index j) {
    const Index bi = blocks.block_of(i), bj = blocks.block_of(j);
    if (bi == bj) return 0.0;
    const double wi = 1.0 / static_cast<double>(blocks.outside_count(i));
    const double wj = 1.0 / static_cast<double>(blocks.outside_count(j));
    return (wi + wj) * g(i, j);
  };
  return upper_pair_sum(n, term, workers) / static_cast<double>(n);
}

template <class Pairs>
double isd_leave_out(const Pairs& g, const BlockScheme& blocks, int workers = 1) {
  const Index n = g.size();
  auto term = [&](Index i, Index j) {
    const double w = blocks.isd_weight(i, j);
    return w == 0.0 ? 0.0 : w * g(i, j);
  };
  const double upper = upper_pair_sum(n, term, workers);
  const double diag_weight = index_sum(n, [&](Index i) { return blocks.isd_weight(i, i); });
  return (2.0 * upper + diag_weight * g.diagonal()) / static_cast<double>(n);
}

// Halves {0..n1-1} and {n1..n-1}, n1 = floor(n/2).
template <class Pairs>
double cross_halves(const Pairs& g, int workers = 1) {
  const Index n = g.size();
  const Index n1 = n / 2;
  auto term = [&](Index i, Index j) { return (i < n1 && j >= n1) ? g(i, j) : 0.0; };
  const double s = upper_pair_sum(n, term, workers);
  return s / (static_cast<double>(n1) * static_cast<double>(n - n1));
}

}  // namespace core

double ad_plugin(const Sample& sample, const KernelSpec& kernel, double h, int workers = 1);
double ad_bc(const Sample& sample, const KernelSpec& kernel, double h, int workers = 1);
double ad_gj(const Sample& sample, const KernelSpec& kernel, double h, double c, int workers = 1);
double ad_lo(const Sample& sample, const KernelSpec& kernel, double h, const BlockScheme& blocks, int workers = 1);
double isd_plugin(const Sample& sample, const KernelSpec& kernel, double h, int workers = 1);
double isd_bc(const Sample& sample, const KernelSpec& kernel, double h, int workers = 1);
double isd_gj(const Sample& sample, const KernelSpec& kernel, double h, double c, int workers = 1);
double isd_lo(const Sample& sample, const KernelSpec& kernel, double h, const BlockScheme& blocks, int workers = 1);
double isd_dcf(const Sample& sample, const KernelSpec& kernel, double h, int workers = 1);
double lr_family(const Sample& sample, const EstimatorConfig& config, int workers = 1);

// Corrections subtracted by the *_BC families.
double leave_in_correction(const KernelSpec& kernel, double h, Index n);     // K(0)/(n h^d)
double nonlinearity_correction(const KernelSpec& kernel, double h, Index n); // K^D(0)/(n h^d)
double bc_correction(Family family, const KernelSpec& kernel, double h, Index n);

EstimatorResult estimate(const Sample& sample, const EstimatorConfig& config, const EstimateOptions& options = {});

}  // namespace adboot
