#include "adboot/estimators.hpp"

#include "adboot/hoeffding.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adboot {

namespace {
struct FamilyEntry {
  Family family;
  std::string_view name;
};
constexpr std::array<FamilyEntry, 13> kFamilies{{
    {Family::AD, "AD"},
    {Family::AD_BC, "AD-BC"},
    {Family::AD_GJ, "AD-GJ"},
    {Family::AD_LO, "AD-LO"},
    {Family::ISD, "ISD"},
    {Family::ISD_BC, "ISD-BC"},
    {Family::ISD_GJ, "ISD-GJ"},
    {Family::ISD_LO, "ISD-LO"},
    {Family::ISD_DCF, "ISD-DCF"},
    {Family::LR, "LR"},
    {Family::LR_BC, "LR-BC"},
    {Family::LR_GJ, "LR-GJ"},
    {Family::LR_LO, "LR-LO"},
}};
}  // namespace

Family parse_family(std::string_view name) {
  std::string norm(name);
  for (char& ch : norm) {
    if (ch == '_') ch = '-';
    ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  for (const auto& e : kFamilies)
    if (e.name == norm) return e.family;
  throw std::invalid_argument("unknown estimator family '" + std::string(name) + "'");
}

std::string_view family_name(Family family) {
  for (const auto& e : kFamilies)
    if (e.family == family) return e.name;
  return "unknown";
}

bool is_gj(Family f) { return f == Family::AD_GJ || f == Family::ISD_GJ || f == Family::LR_GJ; }
bool is_leave_out(Family f) { return f == Family::AD_LO || f == Family::ISD_LO || f == Family::LR_LO; }
bool needs_blocks(Family f) { return is_leave_out(f) || f == Family::ISD_DCF; }
bool is_bias_corrected(Family f) { return f == Family::AD_BC || f == Family::ISD_BC || f == Family::LR_BC; }
bool is_lr(Family f) { return f == Family::LR || f == Family::LR_BC || f == Family::LR_GJ || f == Family::LR_LO; }
bool is_isd(Family f) {
  return f == Family::ISD || f == Family::ISD_BC || f == Family::ISD_GJ || f == Family::ISD_LO ||
         f == Family::ISD_DCF;
}
bool is_ad(Family f) { return f == Family::AD || f == Family::AD_BC || f == Family::AD_GJ || f == Family::AD_LO; }

void EstimatorConfig::validate(Index n) const {
  detail::check_bandwidth(h);
  if (n < 2) throw std::invalid_argument("estimators need n >= 2");
  if (is_gj(family)) {
    if (!gj_c) throw std::invalid_argument(std::string(family_name(family)) + " requires the jackknife ratio c");
    detail::check_gj_ratio(*gj_c);
  }
  if (family == Family::ISD_DCF) {
    if (n < 4) throw std::invalid_argument("ISD-DCF requires n >= 4");
    if (blocks && *blocks != 2) throw std::invalid_argument("ISD-DCF uses exactly two blocks");
  } else if (is_leave_out(family)) {
    if (!blocks) throw std::invalid_argument(std::string(family_name(family)) + " requires a block count");
    const Index b = *blocks == kBlocksN ? n : *blocks;
    if (b < 2 || b > n) throw std::invalid_argument("block count must satisfy 2 <= B <= n");
  }
}

BlockScheme EstimatorConfig::block_scheme(Index n) const {
  if (family == Family::ISD_DCF) return BlockScheme(n, 2);
  if (!blocks) throw std::invalid_argument("no block scheme configured");
  return BlockScheme(n, *blocks == kBlocksN ? n : *blocks);
}

KernelPairs::KernelPairs(const Sample& sample, const KernelSpec& kernel, double h, Kind kind)
    : sample_(sample), kernel_(kernel), h_(h), kind_(kind) {
  detail::check_bandwidth(h);
  if (sample.dim() != kernel.dim()) throw std::invalid_argument("sample dimension does not match the kernel");
  hd_ = bandwidth_power(h, kernel.dim());
  diag_ = (kind == Kind::Kernel ? kernel.at_zero() : kernel.convolution_at_zero()) / hd_;
}

double KernelPairs::operator()(Index i, Index j) const {
  const auto& x = sample_.data();
  double out = 1.0;
  if (kind_ == Kind::Kernel) {
    for (Index k = 0; k < x.cols(); ++k) out *= kernel_.univariate((x(i, k) - x(j, k)) / h_);
  } else {
    for (Index k = 0; k < x.cols(); ++k) out *= kernel_.univariate_convolution((x(i, k) - x(j, k)) / h_);
  }
  return out / hd_;
}

Eigen::MatrixXd kernel_gram(const Sample& sample, const KernelSpec& kernel, double h, KernelPairs::Kind kind) {
  KernelPairs pairs(sample, kernel, h, kind);
  const Index n = sample.n();
  Eigen::MatrixXd g(n, n);
  for (Index j = 0; j < n; ++j) {
    g(j, j) = pairs.diagonal();
    for (Index i = 0; i < j; ++i) {
      const double v = pairs(i, j);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

double leave_in_correction(const KernelSpec& kernel, double h, Index n) {
  return kernel.at_zero() / (static_cast<double>(n) * bandwidth_power(h, kernel.dim()));
}

double nonlinearity_correction(const KernelSpec& kernel, double h, Index n) {
  return kernel.convolution_at_zero() / (static_cast<double>(n) * bandwidth_power(h, kernel.dim()));
}

double bc_correction(Family family, const KernelSpec& kernel, double h, Index n) {
  switch (family) {
    case Family::AD_BC: return leave_in_correction(kernel, h, n);
    case Family::ISD_BC: return nonlinearity_correction(kernel, h, n);
    case Family::LR_BC:
      return (2.0 * kernel.at_zero() - kernel.convolution_at_zero()) /
             (static_cast<double>(n) * bandwidth_power(h, kernel.dim()));
    default: return 0.0;
  }
}

namespace {
using Kind = KernelPairs::Kind;

double plugin_at(const Sample& s, const KernelSpec& k, double h, Kind kind, int workers) {
  return core::plugin(KernelPairs(s, k, h, kind), workers);
}
}  // namespace

double ad_plugin(const Sample& sample, const KernelSpec& kernel, double h, int workers) {
  return plugin_at(sample, kernel, h, Kind::Kernel, workers);
}

double ad_bc(const Sample& sample, const KernelSpec& kernel, double h, int workers) {
  return ad_plugin(sample, kernel, h, workers) - leave_in_correction(kernel, h, sample.n());
}

double ad_gj(const Sample& sample, const KernelSpec& kernel, double h, double c, int workers) {
  const JackknifeWeights w = jackknife_weights(c, kernel.dim());
  return w.near * ad_plugin(sample, kernel, h, workers) + w.far * ad_plugin(sample, kernel, c * h, workers);
}

double ad_lo(const Sample& sample, const KernelSpec& kernel, double h, const BlockScheme& blocks, int workers) {
  if (blocks.n() != sample.n()) throw std::invalid_argument("block scheme size does not match the sample");
  return core::leave_out(KernelPairs(sample, kernel, h, Kind::Kernel), blocks, workers);
}

double isd_plugin(const Sample& sample, const KernelSpec& kernel, double h, int workers) {
  return plugin_at(sample, kernel, h, Kind::Convolution, workers);
}

double isd_bc(const Sample& sample, const KernelSpec& kernel, double h, int workers) {
  return isd_plugin(sample, kernel, h, workers) - nonlinearity_correction(kernel, h, sample.n());
}

double isd_gj(const Sample& sample, const KernelSpec& kernel, double h, double c, int workers) {
  const JackknifeWeights w = jackknife_weights(c, kernel.dim());
  return w.near * isd_plugin(sample, kernel, h, workers) + w.far * isd_plugin(sample, kernel, c * h, workers);
}

double isd_lo(const Sample& sample, const KernelSpec& kernel, double h, const BlockScheme& blocks, int workers) {
  if (blocks.n() != sample.n()) throw std::invalid_argument("block scheme size does not match the sample");
  return core::isd_leave_out(KernelPairs(sample, kernel, h, Kind::Convolution), blocks, workers);
}

double isd_dcf(const Sample& sample, const KernelSpec& kernel, double h, int workers) {
  if (sample.n() < 4) throw std::invalid_argument("ISD-DCF requires n >= 4");
  return core::cross_halves(KernelPairs(sample, kernel, h, Kind::Convolution), workers);
}

double lr_family(const Sample& sample, const EstimatorConfig& config, int workers) {
  config.validate(sample.n());
  const KernelSpec& k = config.kernel;
  const double h = config.h;
  switch (config.family) {
    case Family::LR: return 2.0 * ad_plugin(sample, k, h, workers) - isd_plugin(sample, k, h, workers);
    case Family::LR_BC: return 2.0 * ad_bc(sample, k, h, workers) - isd_bc(sample, k, h, workers);
    case Family::LR_GJ:
      return 2.0 * ad_gj(sample, k, h, *config.gj_c, workers) - isd_gj(sample, k, h, *config.gj_c, workers);
    case Family::LR_LO: {
      const BlockScheme b = config.block_scheme(sample.n());
      return 2.0 * ad_lo(sample, k, h, b, workers) - isd_lo(sample, k, h, b, workers);
    }
    default: throw std::invalid_argument("lr_family expects an LR family");
  }
}

EstimatorResult estimate(const Sample& sample, const EstimatorConfig& config, const EstimateOptions& options) {
  config.validate(sample.n());
  if (sample.dim() != config.kernel.dim()) throw std::invalid_argument("sample dimension does not match the kernel");
  const KernelSpec& k = config.kernel;
  const double h = config.h;
  const int w = options.workers;
  double value = 0.0;
  switch (config.family) {
    case Family::AD: value = ad_plugin(sample, k, h, w); break;
    case Family::AD_BC: value = ad_bc(sample, k, h, w); break;
    case Family::AD_GJ: value = ad_gj(sample, k, h, *config.gj_c, w); break;
    case Family::AD_LO: value = ad_lo(sample, k, h, config.block_scheme(sample.n()), w); break;
    case Family::ISD: value = isd_plugin(sample, k, h, w); break;
    case Family::ISD_BC: value = isd_bc(sample, k, h, w); break;
    case Family::ISD_GJ: value = isd_gj(sample, k, h, *config.gj_c, w); break;
    case Family::ISD_LO: value = isd_lo(sample, k, h, config.block_scheme(sample.n()), w); break;
    case Family::ISD_DCF: value = isd_dcf(sample, k, h, w); break;
    case Family::LR:
    case Family::LR_BC:
    case Family::LR_GJ:
    case Family::LR_LO: value = lr_family(sample, config, w); break;
  }
  if (!std::isfinite(value)) throw std::runtime_error("estimator produced a non-finite value");
  EstimatorResult out;
  out.value = value;
  out.config = config;
  out.n = sample.n();
  out.d = sample.dim();
  if (options.diagnostics) {
    const VRepresentation vrep = VRepresentation::for_estimator(sample, config);
    out.diagnostics = std::make_shared<const HoeffdingParts>(decompose_bootstrap(sample, vrep));
  }
  return out;
}

}  // namespace adboot
