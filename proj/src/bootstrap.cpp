#include "adboot/bootstrap.hpp"

#include "adboot/engine.hpp"
#include "adboot/hoeffding.hpp"
#include "adboot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace adboot {

Scheme parse_scheme(std::string_view name) {
  if (name == "standard") return Scheme::Standard;
  if (name == "crossfit2") return Scheme::CrossFit2;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected standard or crossfit2)");
}

std::string_view scheme_name(Scheme scheme) { return scheme == Scheme::Standard ? "standard" : "crossfit2"; }

Variant parse_variant(std::string_view name) {
  if (name == "natural") return Variant::Natural;
  if (name == "tilde-bc") return Variant::TildeBC;
  if (name == "tilde-kernel") return Variant::TildeKernel;
  if (name == "fixed-first-stage") return Variant::FixedFirstStage;
  if (name == "ffs-bc") return Variant::FixedFirstStageBC;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

std::string_view variant_name(Variant variant) {
  switch (variant) {
    case Variant::Natural: return "natural";
    case Variant::TildeBC: return "tilde-bc";
    case Variant::TildeKernel: return "tilde-kernel";
    case Variant::FixedFirstStage: return "fixed-first-stage";
    case Variant::FixedFirstStageBC: return "ffs-bc";
  }
  return "unknown";
}

CenteringRule parse_centering(std::string_view name) {
  if (name == "estimate") return CenteringRule::AtEstimate;
  if (name == "bootstrap-mean") return CenteringRule::AtBootstrapMean;
  throw std::invalid_argument("unknown centering '" + std::string(name) + "'");
}

std::string_view centering_name(CenteringRule rule) {
  return rule == CenteringRule::AtEstimate ? "estimate" : "bootstrap-mean";
}

void ResamplePlan::validate(Index n) const {
  if (draws < 1) throw std::invalid_argument("bootstrap draws must be at least 1");
  if (scheme == Scheme::CrossFit2 && n < 4) throw std::invalid_argument("the cross-fit bootstrap requires n >= 4");
}

void BootstrapVariant::validate(Index n) const {
  estimator.validate(n);
  if (!(h_ratio > 0.0) || !std::isfinite(h_ratio)) throw std::invalid_argument("bootstrap bandwidth ratio must be positive");
  const Family f = estimator.family;
  switch (variant) {
    case Variant::Natural: break;
    case Variant::TildeBC:
      if (!is_bias_corrected(f)) throw std::invalid_argument("tilde-bc applies to the *-BC families");
      break;
    case Variant::TildeKernel:
      if (!is_leave_out(f)) throw std::invalid_argument("tilde-kernel applies to the *-LO families");
      break;
    case Variant::FixedFirstStage:
      if (f != Family::LR) throw std::invalid_argument("fixed-first-stage applies to LR");
      if (h_ratio != 1.0) throw std::invalid_argument("fixed-first-stage keeps the original bandwidth");
      break;
    case Variant::FixedFirstStageBC:
      if (f != Family::LR_BC) throw std::invalid_argument("ffs-bc applies to LR-BC");
      if (h_ratio != 1.0) throw std::invalid_argument("fixed-first-stage keeps the original bandwidth");
      break;
  }
}

std::vector<double> BootstrapDistribution::values() const {
  std::vector<double> out(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) out[k] = raw[k] + draw_shift;
  return out;
}

double BootstrapDistribution::probability(Index k) const {
  if (weights.empty()) return 1.0 / static_cast<double>(raw.size());
  return weights[static_cast<std::size_t>(k)];
}

double BootstrapDistribution::mean() const {
  if (raw.empty()) throw std::invalid_argument("empty bootstrap distribution");
  std::vector<double> terms(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) terms[k] = probability(static_cast<Index>(k)) * raw[k];
  return pairwise_sum(terms) + draw_shift;
}

BootstrapDistribution BootstrapDistribution::from_values(std::vector<double> values, double center,
                                                         std::vector<double> weights) {
  if (!weights.empty() && weights.size() != values.size())
    throw std::invalid_argument("weights and values differ in length");
  BootstrapDistribution d;
  d.raw = std::move(values);
  d.weights = std::move(weights);
  d.raw_center = center;
  return d;
}

std::vector<Index> resample(Index n, const ResamplePlan& plan, std::uint64_t rep_index) {
  plan.validate(n);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  const Index n1 = n / 2;
  for (Index s = 0; s < n; ++s) {
    std::uint64_t k;
    if (plan.scheme == Scheme::Standard) {
      k = uniform_index(plan.seed, rep_index, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(n));
    } else if (s < n1) {
      k = uniform_index(plan.seed, rep_index, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(n1));
    } else {
      k = static_cast<std::uint64_t>(n1) +
          uniform_index(plan.seed, rep_index, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(n - n1));
    }
    idx[static_cast<std::size_t>(s)] = static_cast<Index>(k);
  }
  return idx;
}

std::vector<Index> resample(const Sample& sample, const ResamplePlan& plan, std::uint64_t rep_index) {
  return resample(sample.n(), plan, rep_index);
}

double variant_draw_shift(const BootstrapVariant& variant, Index n) {
  const Family f = variant.estimator.family;
  const KernelSpec& k = variant.estimator.kernel;
  switch (variant.variant) {
    case Variant::Natural: return -bc_correction(f, k, variant.boot_h(), n);
    case Variant::TildeBC: {
      const double c = -bc_correction(f, k, variant.boot_h(), n);
      return c + c;
    }
    case Variant::TildeKernel: return 0.0;
    case Variant::FixedFirstStage: return 0.0;
    case Variant::FixedFirstStageBC: return -bc_correction(Family::LR_BC, k, variant.estimator.h, n);
  }
  return 0.0;
}

namespace {

using Kind = KernelPairs::Kind;

Family uncorrected(Family f) {
  switch (f) {
    case Family::AD_BC: return Family::AD;
    case Family::ISD_BC: return Family::ISD;
    case Family::LR_BC: return Family::LR;
    default: return f;
  }
}

bool rows_equal(const Sample& s, Index i, Index j) {
  return (s.data().row(i).array() == s.data().row(j).array()).all();
}

// K with K(x) set to zero where x == 0.
template <class Pairs>
struct TildePairs {
  const Pairs& inner;
  const Sample& sample;
  double operator()(Index i, Index j) const { return rows_equal(sample, i, j) ? 0.0 : inner(i, j); }
  double diagonal() const { return 0.0; }
  Index size() const { return inner.size(); }
};

double tilde_ad_lo(const Sample& xs, const KernelSpec& k, double h, const BlockScheme& blocks) {
  const KernelPairs pairs(xs, k, h, Kind::Kernel);
  return core::leave_out(TildePairs<KernelPairs>{pairs, xs}, blocks);
}

// Evaluates a variant on explicit resamples.
class GenericEvaluator {
 public:
  GenericEvaluator(const Sample& sample, const BootstrapVariant& variant) : sample_(sample), variant_(variant) {
    variant.validate(sample.n());
    const Index n = sample.n();
    if (variant.variant == Variant::FixedFirstStage || variant.variant == Variant::FixedFirstStageBC) {
      const KernelPairs pairs(sample, variant.estimator.kernel, variant.estimator.h, Kind::Kernel);
      fhat_.resize(static_cast<std::size_t>(n));
      std::vector<double> buf(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) buf[static_cast<std::size_t>(j)] = i == j ? pairs.diagonal() : pairs(i, j);
        fhat_[static_cast<std::size_t>(i)] = pairwise_sum(buf) / static_cast<double>(n);
      }
      isd_ = isd_plugin(sample, variant.estimator.kernel, variant.estimator.h);
    }
  }

  SplitValue at(const std::vector<Index>& idx) const {
    const Index n = sample_.n();
    if (static_cast<Index>(idx.size()) != n) throw std::invalid_argument("resample length does not match the sample");
    SplitValue out;
    out.shift = variant_draw_shift(variant_, n);
    if (variant_.variant == Variant::FixedFirstStage || variant_.variant == Variant::FixedFirstStageBC) {
      std::vector<double> g(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i) {
        const Index k = idx[static_cast<std::size_t>(i)];
        if (k < 0 || k >= n) throw std::out_of_range("resample index out of range");
        g[static_cast<std::size_t>(i)] = fhat_[static_cast<std::size_t>(k)];
      }
      out.raw = 2.0 * pairwise_sum(g) / static_cast<double>(n) - isd_;
      return out;
    }
    const Sample xs = sample_.select(idx);
    EstimatorConfig cfg = variant_.estimator;
    cfg.h = variant_.boot_h();
    if (variant_.variant == Variant::TildeKernel) {
      const BlockScheme blocks = cfg.block_scheme(n);
      switch (cfg.family) {
        case Family::AD_LO: out.raw = tilde_ad_lo(xs, cfg.kernel, cfg.h, blocks); break;
        // The integral of the squared leave-out density does not see a single point.
        case Family::ISD_LO: out.raw = isd_lo(xs, cfg.kernel, cfg.h, blocks); break;
        case Family::LR_LO:
          out.raw = 2.0 * tilde_ad_lo(xs, cfg.kernel, cfg.h, blocks) - isd_lo(xs, cfg.kernel, cfg.h, blocks);
          break;
        default: throw std::logic_error("unreachable");
      }
      return out;
    }
    cfg.family = uncorrected(cfg.family);
    out.raw = estimate(xs, cfg).value;
    return out;
  }

 private:
  const Sample& sample_;
  const BootstrapVariant& variant_;
  std::vector<double> fhat_;
  double isd_ = 0.0;
};

}  // namespace

SplitValue variant_center(const Sample& sample, const BootstrapVariant& variant) {
  return variant_center(sample, variant, [&](const EstimatorConfig& cfg) { return estimate(sample, cfg).value; });
}

SplitValue variant_center(const Sample& sample, const BootstrapVariant& variant, const EstimateFn& estimate_fn) {
  variant.validate(sample.n());
  const Index n = sample.n();
  EstimatorConfig cfg = variant.estimator;
  SplitValue out;
  switch (variant.variant) {
    case Variant::Natural:
    case Variant::TildeBC:
      out.shift = -bc_correction(cfg.family, cfg.kernel, cfg.h, n);
      cfg.family = uncorrected(cfg.family);
      out.raw = estimate_fn(cfg);
      break;
    case Variant::TildeKernel: out.raw = estimate_fn(cfg); break;
    case Variant::FixedFirstStage:
    case Variant::FixedFirstStageBC:
      out.shift = -bc_correction(cfg.family, cfg.kernel, cfg.h, n);
      cfg.family = Family::LR;
      out.raw = estimate_fn(cfg);
      break;
  }
  return out;
}

SplitValue bootstrap_estimate_split(const Sample& sample, const BootstrapVariant& variant,
                                    const std::vector<Index>& indices) {
  return GenericEvaluator(sample, variant).at(indices);
}

double bootstrap_estimate(const Sample& sample, const BootstrapVariant& variant, const std::vector<Index>& indices) {
  return bootstrap_estimate_split(sample, variant, indices).value();
}

namespace {

// Resampling groups: slots in group a draw data uniformly from group a.
std::vector<std::pair<Index, Index>> scheme_groups(Index n, Scheme scheme) {
  if (scheme == Scheme::Standard) return {{0, n}};
  return {{0, n / 2}, {n / 2, n}};
}

Index group_of(const std::vector<std::pair<Index, Index>>& groups, Index i) {
  for (std::size_t a = 0; a < groups.size(); ++a)
    if (i >= groups[a].first && i < groups[a].second) return static_cast<Index>(a);
  return -1;
}

// E* of n^-2 sum_ij w_ij g(X*_i, X*_j) under the grouped scheme.
double grouped_mean(const PairTerm& t, Index n, Scheme scheme, const std::function<double(Index, Index)>& value) {
  const auto groups = scheme_groups(n, scheme);
  const Index G = static_cast<Index>(groups.size());
  std::vector<double> diag_w(static_cast<std::size_t>(G), 0.0);
  std::vector<double> off_w(static_cast<std::size_t>(G * G), 0.0);
  {
    std::vector<std::vector<double>> diag_terms(static_cast<std::size_t>(G));
    std::vector<std::vector<double>> off_terms(static_cast<std::size_t>(G * G));
    for (Index i = 0; i < n; ++i) {
      const Index a = group_of(groups, i);
      diag_terms[static_cast<std::size_t>(a)].push_back(t.slot_weight ? t.slot_weight(i, i) : 1.0);
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const Index b = group_of(groups, j);
        off_terms[static_cast<std::size_t>(a * G + b)].push_back(t.slot_weight ? t.slot_weight(i, j) : 1.0);
      }
    }
    for (Index a = 0; a < G; ++a) diag_w[static_cast<std::size_t>(a)] = pairwise_sum(diag_terms[static_cast<std::size_t>(a)]);
    for (Index ab = 0; ab < G * G; ++ab) off_w[static_cast<std::size_t>(ab)] = pairwise_sum(off_terms[static_cast<std::size_t>(ab)]);
  }
  std::vector<double> parts;
  for (Index a = 0; a < G; ++a) {
    const auto [a0, a1] = groups[static_cast<std::size_t>(a)];
    std::vector<double> d;
    for (Index k = a0; k < a1; ++k) d.push_back(value(k, k));
    parts.push_back(diag_w[static_cast<std::size_t>(a)] * pairwise_sum(d) / static_cast<double>(a1 - a0));
    for (Index b = 0; b < G; ++b) {
      const double w = off_w[static_cast<std::size_t>(a * G + b)];
      if (w == 0.0) continue;
      const auto [b0, b1] = groups[static_cast<std::size_t>(b)];
      std::vector<double> rows;
      std::vector<double> buf;
      for (Index k = a0; k < a1; ++k) {
        buf.clear();
        for (Index l = b0; l < b1; ++l) buf.push_back(value(k, l));
        rows.push_back(pairwise_sum(buf));
      }
      parts.push_back(w * pairwise_sum(rows) / (static_cast<double>(a1 - a0) * static_cast<double>(b1 - b0)));
    }
  }
  const double nd = static_cast<double>(n);
  return pairwise_sum(parts) / (nd * nd);
}

}  // namespace

double exact_bootstrap_mean(const Sample& sample, const BootstrapVariant& variant, Scheme scheme) {
  variant.validate(sample.n());
  const Index n = sample.n();
  ResamplePlan{scheme, 1, 0}.validate(n);
  if (variant.variant == Variant::FixedFirstStage || variant.variant == Variant::FixedFirstStageBC) {
    if (scheme != Scheme::Standard)
      throw UnsupportedClosedForm("no closed-form mean for the fixed-first-stage draws under the cross-fit scheme");
    // E*[(2/n) sum fhat(X*_i)] is twice the mean of fhat over the sample.
    GenericEvaluator eval(sample, variant);
    std::vector<Index> id(static_cast<std::size_t>(n));
    std::iota(id.begin(), id.end(), Index{0});
    return eval.at(id).value();
  }
  EstimatorConfig cfg = variant.estimator;
  cfg.h = variant.boot_h();
  const VRepresentation vrep = VRepresentation::for_estimator(sample, cfg);
  std::vector<double> parts;
  for (const auto& t : vrep.terms()) {
    std::function<double(Index, Index)> value = t.value;
    if (variant.variant == Variant::TildeKernel) {
      const bool ad_part = !t.kernels.empty() && t.kernels.front().kind == Kind::Kernel;
      if (ad_part) {
        value = [&sample, v = t.value](Index k, Index l) { return rows_equal(sample, k, l) ? 0.0 : v(k, l); };
      }
    }
    parts.push_back(grouped_mean(t, n, scheme, value));
  }
  double shift = vrep.offset();
  if (variant.variant == Variant::TildeBC) shift = variant_draw_shift(variant, n);
  return pairwise_sum(parts) + shift;
}

namespace {

bool slot_symmetric(const BootstrapVariant& v) {
  if (v.variant == Variant::FixedFirstStage || v.variant == Variant::FixedFirstStageBC) return true;
  const Family f = v.estimator.family;
  return !(is_leave_out(f) || f == Family::ISD_DCF);
}

// Calls visit(indices, probability) for every outcome of the scheme.
void for_each_outcome(Index n, Scheme scheme, bool symmetric,
                      const std::function<void(const std::vector<Index>&, double)>& visit) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  if (scheme == Scheme::Standard && symmetric) {
    // Multisets as nondecreasing index vectors, weight n!/prod(c!) n^-n.
    std::vector<double> logfact(static_cast<std::size_t>(n + 1), 0.0);
    for (Index k = 1; k <= n; ++k) logfact[static_cast<std::size_t>(k)] = logfact[static_cast<std::size_t>(k - 1)] + std::log(static_cast<double>(k));
    std::function<void(Index, Index)> rec = [&](Index pos, Index lo) {
      if (pos == n) {
        double lw = logfact[static_cast<std::size_t>(n)] - static_cast<double>(n) * std::log(static_cast<double>(n));
        Index run = 1;
        for (Index s = 1; s <= n; ++s) {
          if (s < n && idx[static_cast<std::size_t>(s)] == idx[static_cast<std::size_t>(s - 1)]) {
            ++run;
          } else {
            lw -= logfact[static_cast<std::size_t>(run)];
            run = 1;
          }
        }
        visit(idx, std::exp(lw));
        return;
      }
      for (Index k = lo; k < n; ++k) {
        idx[static_cast<std::size_t>(pos)] = k;
        rec(pos + 1, k);
      }
    };
    rec(0, 0);
    return;
  }
  const auto groups = scheme_groups(n, scheme);
  double p = 1.0;
  for (const auto& [a0, a1] : groups)
    for (Index s = a0; s < a1; ++s) p /= static_cast<double>(a1 - a0);
  std::function<void(Index)> rec = [&](Index pos) {
    if (pos == n) {
      visit(idx, p);
      return;
    }
    const auto [a0, a1] = groups[static_cast<std::size_t>(group_of(groups, pos))];
    for (Index k = a0; k < a1; ++k) {
      idx[static_cast<std::size_t>(pos)] = k;
      rec(pos + 1);
    }
  };
  rec(0);
}

}  // namespace

std::vector<Atom> enumerate_bootstrap(const Sample& sample, const BootstrapVariant& variant, Scheme scheme) {
  const Index n = sample.n();
  variant.validate(n);
  ResamplePlan{scheme, 1, 0}.validate(n);
  if (scheme == Scheme::Standard && n > kEnumerateStandardMax)
    throw std::invalid_argument("enumeration under the standard scheme is limited to n <= 6");
  if (scheme == Scheme::CrossFit2 && n > kEnumerateCrossFitMax)
    throw std::invalid_argument("enumeration under the cross-fit scheme is limited to n <= 8");
  GenericEvaluator eval(sample, variant);
  std::vector<Atom> atoms;
  for_each_outcome(n, scheme, slot_symmetric(variant),
                   [&](const std::vector<Index>& idx, double p) { atoms.push_back({eval.at(idx).value(), p}); });
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value)
      merged.back().probability += a.probability;
    else
      merged.push_back(a);
  }
  return merged;
}

BootstrapDistribution distribution_from_atoms(const std::vector<Atom>& atoms, double center) {
  std::vector<double> v, w;
  for (const Atom& a : atoms) {
    v.push_back(a.value);
    w.push_back(a.probability);
  }
  return BootstrapDistribution::from_values(std::move(v), center, std::move(w));
}

BootstrapDistribution make_distribution(const Sample& sample, const BootstrapVariant& variant, Scheme scheme,
                                        CenteringRule centering, std::vector<double> raw,
                                        std::optional<SplitValue> center) {
  const Index n = sample.n();
  if (raw.empty()) throw std::invalid_argument("no bootstrap draws");
  for (double v : raw)
    if (!std::isfinite(v)) throw std::runtime_error("non-finite bootstrap draw");
  BootstrapDistribution dist;
  dist.raw = std::move(raw);
  dist.scheme = scheme;
  dist.centering = centering;
  dist.draw_shift = variant_draw_shift(variant, n);
  if (centering == CenteringRule::AtEstimate) {
    const SplitValue c = center ? *center : variant_center(sample, variant);
    dist.raw_center = c.raw;
    dist.center_shift = c.shift;
  } else {
    dist.center_shift = dist.draw_shift;
    try {
      dist.raw_center = exact_bootstrap_mean(sample, variant, scheme) - dist.draw_shift;
    } catch (const UnsupportedClosedForm&) {
      dist.raw_center = pairwise_sum(dist.raw) / static_cast<double>(dist.raw.size());
    }
  }
  return dist;
}

BootstrapDistribution run_bootstrap(const Sample& sample, const BootstrapVariant& variant, const ResamplePlan& plan,
                                    const BootstrapOptions& options) {
  const Index n = sample.n();
  variant.validate(n);
  plan.validate(n);
  std::vector<double> raw(static_cast<std::size_t>(plan.draws));
  if (options.use_engine && BootstrapEngine::supports(variant, n)) {
    BootstrapEngine engine(sample, variant.estimator.kernel);
    const Eigen::MatrixXd m = engine.raw_draws({variant}, plan, options.workers);
    for (Index r = 0; r < plan.draws; ++r) raw[static_cast<std::size_t>(r)] = m(r, 0);
  } else {
    GenericEvaluator eval(sample, variant);
    parallel_for(plan.draws, options.workers, [&](Index r) {
      raw[static_cast<std::size_t>(r)] = eval.at(resample(n, plan, static_cast<std::uint64_t>(r))).raw;
    });
  }
  return make_distribution(sample, variant, plan.scheme, options.centering, std::move(raw));
}

double bootstrap_variance(const BootstrapDistribution& dist, Index n) {
  if (dist.size() < 2) throw std::invalid_argument("bootstrap variance needs at least two draws");
  double m = 0.0;
  {
    std::vector<double> t(dist.raw.size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = dist.probability(static_cast<Index>(k)) * dist.raw[k];
    m = pairwise_sum(t);
  }
  std::vector<double> sq(dist.raw.size());
  for (std::size_t k = 0; k < sq.size(); ++k) {
    const double e = dist.raw[k] - m;
    sq[k] = dist.probability(static_cast<Index>(k)) * e * e;
  }
  return static_cast<double>(n) * pairwise_sum(sq);
}

}  // namespace adboot
