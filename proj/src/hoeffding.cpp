#include "adboot/hoeffding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adboot {

VRepresentation::VRepresentation(Index n, std::vector<PairTerm> terms, double offset,
                                 std::optional<KernelSpec> kernel)
    : n_(n), terms_(std::move(terms)), offset_(offset), kernel_(std::move(kernel)) {
  if (n < 2) throw std::invalid_argument("a V-representation needs n >= 2");
  for (const auto& t : terms_)
    if (!t.value) throw std::invalid_argument("pair term without a value function");
}

double VRepresentation::at(Index i, Index j, Index k, Index l) const {
  double s = offset_;
  for (const auto& t : terms_) {
    const double w = t.slot_weight ? t.slot_weight(i, j) : 1.0;
    if (w != 0.0) s += w * t.value(k, l);
  }
  return s;
}

double VRepresentation::mean(const std::vector<Index>& idx) const {
  if (!idx.empty() && static_cast<Index>(idx.size()) != n_)
    throw std::invalid_argument("realization length does not match the representation");
  auto data = [&](Index i) { return idx.empty() ? i : idx[static_cast<std::size_t>(i)]; };
  std::vector<double> rows(static_cast<std::size_t>(n_));
  std::vector<double> buf(static_cast<std::size_t>(n_));
  for (Index i = 0; i < n_; ++i) {
    for (Index j = 0; j < n_; ++j) buf[static_cast<std::size_t>(j)] = at(i, j, data(i), data(j)) - offset_;
    rows[static_cast<std::size_t>(i)] = pairwise_sum(buf);
  }
  const double nd = static_cast<double>(n_);
  return pairwise_sum(rows) / (nd * nd) + offset_;
}

Eigen::MatrixXd VRepresentation::materialize() const {
  if (n_ > kMaterializeLimit) throw std::length_error("V matrix too large to materialize");
  Eigen::MatrixXd v(n_, n_);
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j) v(i, j) = (*this)(i, j);
  return v;
}

namespace {

using Kind = KernelPairs::Kind;

std::function<double(Index, Index)> kernel_value(std::shared_ptr<const Sample> sample, const KernelSpec& kernel,
                                                 std::vector<KernelComponent> comps) {
  return [sample, kernel, comps](Index k, Index l) {
    double s = 0.0;
    for (const auto& c : comps) s += c.coefficient * KernelPairs(*sample, kernel, c.h, c.kind)(k, l);
    return s;
  };
}

PairTerm kernel_term(std::shared_ptr<const Sample> sample, const KernelSpec& kernel,
                     std::vector<KernelComponent> comps, std::function<double(Index, Index)> slot = {}) {
  PairTerm t;
  t.slot_weight = std::move(slot);
  t.value = kernel_value(std::move(sample), kernel, comps);
  t.kernels = std::move(comps);
  t.symmetric = true;
  return t;
}

}  // namespace

VRepresentation VRepresentation::for_estimator(const Sample& sample, const EstimatorConfig& config) {
  config.validate(sample.n());
  const Index n = sample.n();
  const double nd = static_cast<double>(n);
  auto data = std::make_shared<const Sample>(sample);
  const KernelSpec& k = config.kernel;
  const double h = config.h;

  auto plain = [&](Kind kind, double coef) { return std::vector<KernelComponent>{{kind, h, coef}}; };
  auto jack = [&](Kind kind, double coef) {
    const JackknifeWeights w = jackknife_weights(*config.gj_c, k.dim());
    return std::vector<KernelComponent>{{kind, h, coef * w.near}, {kind, *config.gj_c * h, coef * w.far}};
  };
  auto lo_slot = [&](double coef) {
    auto blocks = std::make_shared<const BlockScheme>(config.block_scheme(n));
    return std::function<double(Index, Index)>(
        [blocks, nd, coef](Index i, Index j) { return coef * nd * blocks->weight(i, j); });
  };
  auto isd_lo_slot = [&](double coef) {
    auto blocks = std::make_shared<const BlockScheme>(config.block_scheme(n));
    return std::function<double(Index, Index)>(
        [blocks, nd, coef](Index i, Index j) { return coef * nd * blocks->isd_weight(i, j); });
  };

  std::vector<PairTerm> terms;
  double offset = 0.0;
  switch (config.family) {
    case Family::AD:
    case Family::AD_BC:
      terms.push_back(kernel_term(data, k, plain(Kind::Kernel, 1.0)));
      break;
    case Family::AD_GJ: terms.push_back(kernel_term(data, k, jack(Kind::Kernel, 1.0))); break;
    case Family::AD_LO: terms.push_back(kernel_term(data, k, plain(Kind::Kernel, 1.0), lo_slot(1.0))); break;
    case Family::ISD:
    case Family::ISD_BC:
      terms.push_back(kernel_term(data, k, plain(Kind::Convolution, 1.0)));
      break;
    case Family::ISD_GJ: terms.push_back(kernel_term(data, k, jack(Kind::Convolution, 1.0))); break;
    case Family::ISD_LO:
      terms.push_back(kernel_term(data, k, plain(Kind::Convolution, 1.0), isd_lo_slot(1.0)));
      break;
    case Family::ISD_DCF: {
      const Index n1 = n / 2;
      const double w = nd * nd / (static_cast<double>(n1) * static_cast<double>(n - n1));
      terms.push_back(kernel_term(data, k, plain(Kind::Convolution, 1.0),
                                  [n1, w](Index i, Index j) { return (i < n1 && j >= n1) ? w : 0.0; }));
      break;
    }
    case Family::LR:
    case Family::LR_BC:
      terms.push_back(kernel_term(data, k, {{Kind::Kernel, h, 2.0}, {Kind::Convolution, h, -1.0}}));
      break;
    case Family::LR_GJ: {
      auto comps = jack(Kind::Kernel, 2.0);
      auto more = jack(Kind::Convolution, -1.0);
      comps.insert(comps.end(), more.begin(), more.end());
      terms.push_back(kernel_term(data, k, comps));
      break;
    }
    case Family::LR_LO:
      terms.push_back(kernel_term(data, k, plain(Kind::Kernel, 1.0), lo_slot(2.0)));
      terms.push_back(kernel_term(data, k, plain(Kind::Convolution, 1.0), isd_lo_slot(-1.0)));
      break;
  }
  if (is_bias_corrected(config.family)) offset = -bc_correction(config.family, k, h, n);
  return VRepresentation(n, std::move(terms), offset, k);
}

VRepresentation VRepresentation::from_matrix(const Eigen::MatrixXd& v) {
  if (v.rows() != v.cols()) throw std::invalid_argument("V matrix must be square");
  auto m = std::make_shared<const Eigen::MatrixXd>(v);
  PairTerm t;
  t.value = [m](Index k, Index l) { return (*m)(k, l); };
  t.symmetric = v.isApprox(v.transpose(), 0.0);
  return VRepresentation(v.rows(), {std::move(t)});
}

double HoeffdingParts::linear_component() const {
  return pairwise_sum(linear.data(), linear.size()) / static_cast<double>(linear.size());
}

double HoeffdingParts::quad_component() const {
  const double nd = static_cast<double>(n());
  return 2.0 * quad_sum / (nd * (nd - 1.0));
}

double HoeffdingParts::linear_mean() const { return linear_component(); }

double HoeffdingParts::linear_var() const {
  const double m = linear_mean();
  std::vector<double> sq(static_cast<std::size_t>(linear.size()));
  for (Index i = 0; i < linear.size(); ++i) sq[static_cast<std::size_t>(i)] = (linear(i) - m) * (linear(i) - m);
  return pairwise_sum(sq) / static_cast<double>(linear.size());
}

namespace {

// Slot-side sums of one term.
struct SlotSums {
  std::vector<double> diag;  // w_ii
  std::vector<double> row;   // sum_{j != i} w_ij
  std::vector<double> col;   // sum_{j != i} w_ji
  double diag_total = 0.0;
  double off_total = 0.0;
};

SlotSums slot_sums(const PairTerm& t, Index n) {
  SlotSums s;
  s.diag.assign(static_cast<std::size_t>(n), 1.0);
  s.row.assign(static_cast<std::size_t>(n), static_cast<double>(n - 1));
  s.col.assign(static_cast<std::size_t>(n), static_cast<double>(n - 1));
  if (t.slot_weight) {
    std::vector<double> buf(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      s.diag[static_cast<std::size_t>(i)] = t.slot_weight(i, i);
      for (Index j = 0; j < n; ++j) buf[static_cast<std::size_t>(j)] = j == i ? 0.0 : t.slot_weight(i, j);
      s.row[static_cast<std::size_t>(i)] = pairwise_sum(buf);
      for (Index j = 0; j < n; ++j) buf[static_cast<std::size_t>(j)] = j == i ? 0.0 : t.slot_weight(j, i);
      s.col[static_cast<std::size_t>(i)] = pairwise_sum(buf);
    }
  }
  s.diag_total = pairwise_sum(s.diag);
  s.off_total = pairwise_sum(s.row);
  return s;
}

// Data-side empirical moments of one term.
struct DataMoments {
  std::vector<double> row_mean;  // r_k = n^-1 sum_l g(k, l)
  std::vector<double> col_mean;  // c_l = n^-1 sum_k g(k, l)
  double mean = 0.0;             // n^-2 sum g
  double diag_mean = 0.0;        // n^-1 sum g(k, k)
};

DataMoments data_moments(const PairTerm& t, Index n) {
  DataMoments m;
  const double nd = static_cast<double>(n);
  m.row_mean.resize(static_cast<std::size_t>(n));
  m.col_mean.resize(static_cast<std::size_t>(n));
  std::vector<double> buf(static_cast<std::size_t>(n));
  std::vector<double> diag(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    for (Index l = 0; l < n; ++l) buf[static_cast<std::size_t>(l)] = t.value(k, l);
    diag[static_cast<std::size_t>(k)] = buf[static_cast<std::size_t>(k)];
    m.row_mean[static_cast<std::size_t>(k)] = pairwise_sum(buf) / nd;
  }
  if (t.symmetric) {
    m.col_mean = m.row_mean;
  } else {
    for (Index l = 0; l < n; ++l) {
      for (Index k = 0; k < n; ++k) buf[static_cast<std::size_t>(k)] = t.value(k, l);
      m.col_mean[static_cast<std::size_t>(l)] = pairwise_sum(buf) / nd;
    }
  }
  m.mean = pairwise_sum(m.row_mean) / nd;
  m.diag_mean = pairwise_sum(diag) / nd;
  return m;
}

struct QuadAccumulator {
  bool store;
  Eigen::MatrixXd quad;
  std::vector<double> row_sum;
  std::vector<double> row_sq;
};

void finish_parts(HoeffdingParts& parts, QuadAccumulator& acc, double target) {
  const Index n = parts.linear.size();
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  parts.quad_sum = pairwise_sum(acc.row_sum);
  parts.quad_mean = parts.quad_sum / pairs;
  parts.quad_var = std::max(0.0, pairwise_sum(acc.row_sq) / pairs - parts.quad_mean * parts.quad_mean);
  if (acc.store) parts.quad = std::move(acc.quad);
  const double lc = parts.linear_component();
  const double qc = parts.quad_component();
  const double scale = std::max({std::abs(parts.estimate), std::abs(parts.center), std::abs(parts.beta),
                                 std::abs(lc), std::abs(qc), 1e-300});
  parts.reconstruction_residual = std::abs(parts.beta + lc + qc - target) / scale;
}

template <class QuadTerm>
void accumulate_quad(QuadAccumulator& acc, Index n, const QuadTerm& w) {
  acc.store = n <= kMaterializeLimit;
  if (acc.store) acc.quad = Eigen::MatrixXd::Zero(n, n);
  acc.row_sum.assign(static_cast<std::size_t>(n), 0.0);
  acc.row_sq.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<double> buf(static_cast<std::size_t>(n)), sq(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Index m = 0;
    for (Index j = i + 1; j < n; ++j) {
      const double v = w(i, j);
      if (acc.store) acc.quad(i, j) = v;
      buf[static_cast<std::size_t>(m)] = v;
      sq[static_cast<std::size_t>(m)] = v * v;
      ++m;
    }
    acc.row_sum[static_cast<std::size_t>(i)] = pairwise_sum(buf.data(), m);
    acc.row_sq[static_cast<std::size_t>(i)] = pairwise_sum(sq.data(), m);
  }
}

}  // namespace

HoeffdingParts decompose_bootstrap(const Sample& sample, const VRepresentation& vrep,
                                   const std::vector<Index>& realization) {
  const Index n = vrep.size();
  if (sample.n() != n) throw std::invalid_argument("V-representation size does not match the sample");
  if (!realization.empty() && static_cast<Index>(realization.size()) != n)
    throw std::invalid_argument("realization length does not match the sample");
  for (Index k : realization)
    if (k < 0 || k >= n) throw std::out_of_range("realization index out of range");
  auto data = [&](Index i) { return realization.empty() ? i : realization[static_cast<std::size_t>(i)]; };

  const double nd = static_cast<double>(n);
  const auto& terms = vrep.terms();
  std::vector<SlotSums> slots;
  std::vector<DataMoments> moments;
  for (const auto& t : terms) {
    slots.push_back(slot_sums(t, n));
    moments.push_back(data_moments(t, n));
  }

  HoeffdingParts parts;
  parts.bootstrap = true;
  parts.center = vrep.mean();
  parts.estimate = vrep.mean(realization);

  std::vector<double> beta_terms;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    beta_terms.push_back(slots[t].diag_total * moments[t].diag_mean / (nd * nd));
    beta_terms.push_back(slots[t].off_total * moments[t].mean / (nd * nd));
  }
  parts.beta = pairwise_sum(beta_terms) + vrep.offset() - parts.center;

  parts.linear.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Index k = data(i);
    const auto ks = static_cast<std::size_t>(k);
    const auto is = static_cast<std::size_t>(i);
    double s = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& m = moments[t];
      const auto& w = slots[t];
      s += w.diag[is] * (terms[t].value(k, k) - m.diag_mean) + (m.row_mean[ks] - m.mean) * w.row[is] +
           (m.col_mean[ks] - m.mean) * w.col[is];
    }
    parts.linear(i) = s / nd;
  }

  const double factor = (nd - 1.0) / nd;
  QuadAccumulator acc;
  accumulate_quad(acc, n, [&](Index i, Index j) {
    const Index k = data(i), l = data(j);
    const auto ks = static_cast<std::size_t>(k), ls = static_cast<std::size_t>(l);
    double s = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& term = terms[t];
      const auto& m = moments[t];
      const double wij = term.slot_weight ? term.slot_weight(i, j) : 1.0;
      const double wji = term.slot_weight ? term.slot_weight(j, i) : 1.0;
      if (wij == 0.0 && wji == 0.0) continue;
      const double gkl = term.value(k, l);
      const double glk = term.symmetric ? gkl : term.value(l, k);
      s += wij * (gkl - m.row_mean[ks] - m.col_mean[ls] + m.mean) +
           wji * (glk - m.col_mean[ks] - m.row_mean[ls] + m.mean);
    }
    return factor * 0.5 * s;
  });
  finish_parts(parts, acc, parts.estimate - parts.center);
  return parts;
}

Eigen::VectorXd bootstrap_linear_function(const VRepresentation& vrep, Index slot) {
  const Index n = vrep.size();
  const double nd = static_cast<double>(n);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (const auto& t : vrep.terms()) {
    const SlotSums w = slot_sums(t, n);
    const DataMoments m = data_moments(t, n);
    const auto is = static_cast<std::size_t>(slot);
    for (Index k = 0; k < n; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      out(k) += (w.diag[is] * (t.value(k, k) - m.diag_mean) + (m.row_mean[ks] - m.mean) * w.row[is] +
                 (m.col_mean[ks] - m.mean) * w.col[is]) /
                nd;
    }
  }
  return out;
}

Eigen::MatrixXd bootstrap_quadratic_kernel(const VRepresentation& vrep, Index slot_i, Index slot_j) {
  const Index n = vrep.size();
  if (n > kMaterializeLimit) throw std::length_error("quadratic kernel too large to materialize");
  const double nd = static_cast<double>(n);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : vrep.terms()) {
    const DataMoments m = data_moments(t, n);
    const double wij = t.slot_weight ? t.slot_weight(slot_i, slot_j) : 1.0;
    const double wji = t.slot_weight ? t.slot_weight(slot_j, slot_i) : 1.0;
    for (Index k = 0; k < n; ++k) {
      for (Index l = 0; l < n; ++l) {
        const auto ks = static_cast<std::size_t>(k), ls = static_cast<std::size_t>(l);
        out(k, l) += 0.5 * (nd - 1.0) / nd *
                     (wij * (t.value(k, l) - m.row_mean[ks] - m.col_mean[ls] + m.mean) +
                      wji * (t.value(l, k) - m.col_mean[ks] - m.row_mean[ls] + m.mean));
      }
    }
  }
  return out;
}

HoeffdingParts decompose_population(const Sample& sample, const VRepresentation& vrep, const PopulationTruth& truth) {
  const Index n = vrep.size();
  if (sample.n() != n) throw std::invalid_argument("V-representation size does not match the sample");
  if (!vrep.kernel()) throw std::invalid_argument("population decomposition needs a kernel-backed representation");
  if (vrep.kernel()->family() != truth.kernel().family() || vrep.kernel()->dim() != truth.kernel().dim() ||
      sample.dim() != truth.kernel().dim())
    throw std::invalid_argument("population truth does not match the representation's kernel");
  for (const auto& t : vrep.terms())
    if (t.kernels.empty() || !t.symmetric)
      throw std::invalid_argument("population decomposition needs symmetric kernel pair terms");

  const double nd = static_cast<double>(n);
  const auto& terms = vrep.terms();
  const KernelSpec& kernel = truth.kernel();

  // a_t(X_i), theta_t and the constant diagonal of every term.
  std::vector<std::vector<double>> proj(terms.size());
  std::vector<double> theta(terms.size(), 0.0), diag(terms.size(), 0.0);
  std::vector<SlotSums> slots;
  Eigen::VectorXd x(sample.dim());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    slots.push_back(slot_sums(terms[t], n));
    for (const auto& c : terms[t].kernels) {
      theta[t] += c.coefficient * truth.smoothed_target(c.kind, c.h);
      const double z = c.kind == Kind::Kernel ? kernel.at_zero() : kernel.convolution_at_zero();
      diag[t] += c.coefficient * z / bandwidth_power(c.h, kernel.dim());
    }
    proj[t].resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      x = sample.row(i).transpose();
      double s = 0.0;
      for (const auto& c : terms[t].kernels) s += c.coefficient * truth.smoothed_density(c.kind, c.h, x);
      proj[t][static_cast<std::size_t>(i)] = s;
    }
  }

  HoeffdingParts parts;
  parts.bootstrap = false;
  parts.center = truth.theta0();
  parts.estimate = vrep.mean();

  std::vector<double> beta_terms;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    beta_terms.push_back(slots[t].diag_total * diag[t] / (nd * nd));
    beta_terms.push_back(slots[t].off_total * theta[t] / (nd * nd));
  }
  parts.beta = pairwise_sum(beta_terms) + vrep.offset() - parts.center;

  parts.linear.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto is = static_cast<std::size_t>(i);
    double s = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t)
      s += (slots[t].row[is] + slots[t].col[is]) * (proj[t][is] - theta[t]);
    parts.linear(i) = s / nd;
  }

  const double factor = (nd - 1.0) / nd;
  QuadAccumulator acc;
  accumulate_quad(acc, n, [&](Index i, Index j) {
    double s = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& term = terms[t];
      const double wij = term.slot_weight ? term.slot_weight(i, j) : 1.0;
      const double wji = term.slot_weight ? term.slot_weight(j, i) : 1.0;
      if (wij == 0.0 && wji == 0.0) continue;
      s += (wij + wji) * (term.value(i, j) - proj[t][static_cast<std::size_t>(i)] -
                          proj[t][static_cast<std::size_t>(j)] + theta[t]);
    }
    return factor * 0.5 * s;
  });
  finish_parts(parts, acc, parts.estimate - parts.center);
  return parts;
}

}  // namespace adboot
