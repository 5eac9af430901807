#pragma once

#include "adboot/bootstrap.hpp"

#include <map>
#include <utility>

namespace adboot {

// Bootstrap draws through count vectors. With c the resample counts over the
// original points, every supported statistic is a combination of quadratic
// forms c'Gc (and half-sample pieces) of precomputed Gram matrices G, and a
// batch of draws is one matrix product G * [c_1 ... c_m].
class BootstrapEngine {
 public:
  static constexpr Index kBatch = 64;

  BootstrapEngine(const Sample& sample, const KernelSpec& kernel);

  static bool supports(const BootstrapVariant& variant, Index n);

  // Raw draws (BC constants excluded), one column per variant. Every variant
  // sees the same resamples of the plan.
  Eigen::MatrixXd raw_draws(const std::vector<BootstrapVariant>& variants, const ResamplePlan& plan,
                            int workers = 1);

  const Eigen::MatrixXd& gram(KernelPairs::Kind kind, double h);
  Index size() const { return sample_.n(); }

 private:
  const Sample& sample_;
  KernelSpec kernel_;
  std::map<std::pair<int, double>, Eigen::MatrixXd> grams_;
  std::vector<std::pair<Index, Index>> tie_pairs_;  // k < l with identical rows
};

// Constant added to raw draws of the variant.
double variant_draw_shift(const BootstrapVariant& variant, Index n);

}  // namespace adboot
