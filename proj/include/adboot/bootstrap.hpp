#pragma once

#include "adboot/estimators.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace adboot {

enum class Scheme { Standard, CrossFit2 };
enum class Variant { Natural, TildeBC, TildeKernel, FixedFirstStage, FixedFirstStageBC };
enum class CenteringRule { AtEstimate, AtBootstrapMean };

Scheme parse_scheme(std::string_view name);
std::string_view scheme_name(Scheme scheme);
Variant parse_variant(std::string_view name);
std::string_view variant_name(Variant variant);
CenteringRule parse_centering(std::string_view name);
std::string_view centering_name(CenteringRule rule);

struct ResamplePlan {
  Scheme scheme = Scheme::Standard;
  Index draws = 999;
  std::uint64_t seed = 0;

  void validate(Index n) const;
};

struct BootstrapVariant {
  EstimatorConfig estimator;
  Variant variant = Variant::Natural;
  double h_ratio = 1.0;  // h* / h

  void validate(Index n) const;
  double boot_h() const { return estimator.h * h_ratio; }
};

class UnsupportedClosedForm : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A statistic split as raw + shift, where shift is a deterministic constant.
struct SplitValue {
  double raw = 0.0;
  double shift = 0.0;
  double value() const { return raw + shift; }
};

// Draws are stored raw; the value of draw k is raw[k] + draw_shift and the
// center is raw_center + center_shift. Keeping the constants apart lets
// intervals built from shifted variants reproduce unshifted ones exactly.
struct BootstrapDistribution {
  std::vector<double> raw;
  std::vector<double> weights;  // empty: equal weights
  double raw_center = 0.0;
  double draw_shift = 0.0;
  double center_shift = 0.0;
  Scheme scheme = Scheme::Standard;
  CenteringRule centering = CenteringRule::AtEstimate;

  Index size() const { return static_cast<Index>(raw.size()); }
  double center() const { return raw_center + center_shift; }
  double draw(Index k) const { return raw[static_cast<std::size_t>(k)] + draw_shift; }
  double centered(Index k) const {
    return (raw[static_cast<std::size_t>(k)] - raw_center) + (draw_shift - center_shift);
  }
  std::vector<double> values() const;
  double mean() const;  // of the draws
  double probability(Index k) const;

  static BootstrapDistribution from_values(std::vector<double> values, double center,
                                           std::vector<double> weights = {});
};

std::vector<Index> resample(Index n, const ResamplePlan& plan, std::uint64_t rep_index);
std::vector<Index> resample(const Sample& sample, const ResamplePlan& plan, std::uint64_t rep_index);

// Original-sample statistic for the variant (its center under AtEstimate).
SplitValue variant_center(const Sample& sample, const BootstrapVariant& variant);
// Same, with the original-sample estimators supplied by the caller (e.g. cached).
using EstimateFn = std::function<double(const EstimatorConfig&)>;
SplitValue variant_center(const Sample& sample, const BootstrapVariant& variant, const EstimateFn& estimate_fn);
SplitValue bootstrap_estimate_split(const Sample& sample, const BootstrapVariant& variant,
                                    const std::vector<Index>& indices);
double bootstrap_estimate(const Sample& sample, const BootstrapVariant& variant, const std::vector<Index>& indices);

double exact_bootstrap_mean(const Sample& sample, const BootstrapVariant& variant,
                            Scheme scheme = Scheme::Standard);

struct Atom {
  double value = 0.0;
  double probability = 0.0;
};

inline constexpr Index kEnumerateStandardMax = 6;
inline constexpr Index kEnumerateCrossFitMax = 8;

std::vector<Atom> enumerate_bootstrap(const Sample& sample, const BootstrapVariant& variant,
                                      Scheme scheme = Scheme::Standard);
BootstrapDistribution distribution_from_atoms(const std::vector<Atom>& atoms, double center);

struct BootstrapOptions {
  CenteringRule centering = CenteringRule::AtEstimate;
  int workers = 1;
  bool use_engine = true;  // Gram/count-vector fast path when supported
};

// Wraps raw draws of the variant with its shifts and the requested center.
BootstrapDistribution make_distribution(const Sample& sample, const BootstrapVariant& variant, Scheme scheme,
                                        CenteringRule centering, std::vector<double> raw,
                                        std::optional<SplitValue> center = std::nullopt);

BootstrapDistribution run_bootstrap(const Sample& sample, const BootstrapVariant& variant, const ResamplePlan& plan,
                                    const BootstrapOptions& options = {});

// n times the variance of the draws (denominator B).
double bootstrap_variance(const BootstrapDistribution& dist, Index n);

}  // namespace adboot
