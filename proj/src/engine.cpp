#include "adboot/engine.hpp"

#include "adboot/rng.hpp"

#include <stdexcept>

namespace adboot {

namespace {

using Kind = KernelPairs::Kind;

enum class Layout { Full, Halves };

Layout block_layout(const EstimatorConfig& cfg, Index n) {
  if (cfg.family == Family::ISD_DCF) return Layout::Halves;
  const Index b = cfg.blocks.value_or(kBlocksN);
  if (b == kBlocksN || b == n) return Layout::Full;
  return Layout::Halves;  // b == 2, checked by supports()
}

bool first_stage_fixed(const BootstrapVariant& v) {
  return v.variant == Variant::FixedFirstStage || v.variant == Variant::FixedFirstStageBC;
}

bool uses_ad_part(Family f) { return is_ad(f) || is_lr(f); }
bool uses_isd_part(Family f) { return is_isd(f) || is_lr(f); }

// Quadratic forms of one Gram matrix for one draw.
struct Forms {
  double q = 0.0;
  double q11 = 0.0, q12 = 0.0, q22 = 0.0;
  double t = 0.0, t12 = 0.0;  // tie parts of q and q12
};

struct GramJob {
  const Eigen::MatrixXd* gram = nullptr;
  bool halves = false;
  bool ties = false;
};

}  // namespace

BootstrapEngine::BootstrapEngine(const Sample& sample, const KernelSpec& kernel) : sample_(sample), kernel_(kernel) {
  if (sample.dim() != kernel.dim()) throw std::invalid_argument("sample dimension does not match the kernel");
  const Index n = sample.n();
  if (has_duplicate_rows(sample.data())) {
    for (Index k = 0; k < n; ++k)
      for (Index l = k + 1; l < n; ++l)
        if ((sample.data().row(k).array() == sample.data().row(l).array()).all()) tie_pairs_.emplace_back(k, l);
  }
}

bool BootstrapEngine::supports(const BootstrapVariant& v, Index n) {
  if (first_stage_fixed(v)) return true;
  const EstimatorConfig& cfg = v.estimator;
  if (is_leave_out(cfg.family)) {
    const Index b = cfg.blocks.value_or(kBlocksN);
    return b == kBlocksN || b == n || b == 2;
  }
  return true;
}

const Eigen::MatrixXd& BootstrapEngine::gram(Kind kind, double h) {
  const auto key = std::make_pair(static_cast<int>(kind), h);
  auto it = grams_.find(key);
  if (it == grams_.end()) it = grams_.emplace(key, kernel_gram(sample_, kernel_, h, kind)).first;
  return it->second;
}

Eigen::MatrixXd BootstrapEngine::raw_draws(const std::vector<BootstrapVariant>& variants, const ResamplePlan& plan,
                                           int workers) {
  const Index n = sample_.n();
  plan.validate(n);
  for (const auto& v : variants) {
    v.validate(n);
    if (!supports(v, n)) throw std::invalid_argument("variant is not supported by the count-vector engine");
  }
  const double nd = static_cast<double>(n);
  const Index n1 = n / 2;
  const double n1d = static_cast<double>(n1), n2d = static_cast<double>(n - n1);

  // Gram matrices and what each needs; built up front so the batch loop only reads.
  std::map<std::pair<int, double>, GramJob> jobs;
  auto need = [&](Kind kind, double h, bool halves, bool ties) {
    GramJob& job = jobs[{static_cast<int>(kind), h}];
    job.gram = &gram(kind, h);
    job.halves = job.halves || halves;
    job.ties = job.ties || ties;
  };
  Eigen::VectorXd fhat;
  double isd_orig = 0.0;
  for (const auto& v : variants) {
    const EstimatorConfig& cfg = v.estimator;
    if (first_stage_fixed(v)) {
      const Eigen::MatrixXd& g = gram(Kind::Kernel, cfg.h);
      fhat = g.rowwise().sum() / nd;
      isd_orig = core::plugin(GramPairs(gram(Kind::Convolution, cfg.h)));
      continue;
    }
    const double h = v.boot_h();
    const bool halves = needs_blocks(cfg.family) && block_layout(cfg, n) == Layout::Halves;
    const bool tilde = v.variant == Variant::TildeKernel;
    if (uses_ad_part(cfg.family)) {
      need(Kind::Kernel, h, halves, tilde);
      if (is_gj(cfg.family)) need(Kind::Kernel, *cfg.gj_c * h, false, false);
    }
    if (uses_isd_part(cfg.family)) {
      need(Kind::Convolution, h, halves, false);
      if (is_gj(cfg.family)) need(Kind::Convolution, *cfg.gj_c * h, false, false);
    }
  }

  Eigen::MatrixXd out(plan.draws, static_cast<Index>(variants.size()));
  const Index batches = (plan.draws + kBatch - 1) / kBatch;

  parallel_for(batches, workers, [&](Index b) {
    const Index r0 = b * kBatch;
    const Index m = std::min(kBatch, plan.draws - r0);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, m);
    Eigen::MatrixXd c1 = Eigen::MatrixXd::Zero(n, m);
    for (Index r = 0; r < m; ++r) {
      const auto idx = resample(n, plan, static_cast<std::uint64_t>(r0 + r));
      for (Index s = 0; s < n; ++s) {
        const Index k = idx[static_cast<std::size_t>(s)];
        c(k, r) += 1.0;
        if (s < n1) c1(k, r) += 1.0;
      }
    }
    const Eigen::MatrixXd c2 = c - c1;

    std::map<std::pair<int, double>, std::vector<Forms>> forms;
    for (const auto& [key, job] : jobs) {
      const Eigen::MatrixXd& g = *job.gram;
      std::vector<Forms> f(static_cast<std::size_t>(m));
      const Eigen::MatrixXd y = g * c;
      const Eigen::RowVectorXd q = (c.array() * y.array()).colwise().sum();
      for (Index r = 0; r < m; ++r) f[static_cast<std::size_t>(r)].q = q(r);
      if (job.halves) {
        const Eigen::MatrixXd y1 = g * c1;
        const Eigen::MatrixXd y2 = y - y1;
        const Eigen::RowVectorXd q11 = (c1.array() * y1.array()).colwise().sum();
        const Eigen::RowVectorXd q12 = (c2.array() * y1.array()).colwise().sum();
        const Eigen::RowVectorXd q22 = (c2.array() * y2.array()).colwise().sum();
        for (Index r = 0; r < m; ++r) {
          Forms& fr = f[static_cast<std::size_t>(r)];
          fr.q11 = q11(r);
          fr.q12 = q12(r);
          fr.q22 = q22(r);
        }
      }
      if (job.ties) {
        const double g0 = g(0, 0);
        for (Index r = 0; r < m; ++r) {
          Forms& fr = f[static_cast<std::size_t>(r)];
          fr.t = g0 * c.col(r).squaredNorm();
          fr.t12 = g0 * c1.col(r).dot(c2.col(r));
          for (const auto& [k, l] : tie_pairs_) {
            fr.t += 2.0 * c(k, r) * c(l, r) * g(k, l);
            fr.t12 += (c1(k, r) * c2(l, r) + c1(l, r) * c2(k, r)) * g(k, l);
          }
        }
      }
      forms.emplace(key, std::move(f));
    }
    auto get = [&](Kind kind, double h, Index r) -> const Forms& {
      return forms.at({static_cast<int>(kind), h})[static_cast<std::size_t>(r)];
    };

    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
      const BootstrapVariant& v = variants[vi];
      const EstimatorConfig& cfg = v.estimator;
      for (Index r = 0; r < m; ++r) {
        double value = 0.0;
        if (first_stage_fixed(v)) {
          value = 2.0 * c.col(r).dot(fhat) / nd - isd_orig;
          out(r0 + r, static_cast<Index>(vi)) = value;
          continue;
        }
        const double h = v.boot_h();
        const bool tilde = v.variant == Variant::TildeKernel;
        const Layout layout = needs_blocks(cfg.family) ? block_layout(cfg, n) : Layout::Full;

        auto plug = [&](Kind kind) { return get(kind, h, r).q / (nd * nd); };
        auto jack = [&](Kind kind) {
          const JackknifeWeights w = jackknife_weights(*cfg.gj_c, kernel_.dim());
          return w.near * get(kind, h, r).q / (nd * nd) + w.far * get(kind, *cfg.gj_c * h, r).q / (nd * nd);
        };
        auto ad_lo = [&]() {
          const Forms& f = get(Kind::Kernel, h, r);
          if (layout == Layout::Full) {
            const double off = tilde ? f.q - f.t : f.q - nd * (*jobs.at({static_cast<int>(Kind::Kernel), h}).gram)(0, 0);
            return off / (nd * (nd - 1.0));
          }
          const double q12 = tilde ? f.q12 - f.t12 : f.q12;
          return (1.0 / nd) * (1.0 / n1d + 1.0 / n2d) * q12;
        };
        auto isd_lo = [&]() {
          const Forms& f = get(Kind::Convolution, h, r);
          if (layout == Layout::Full) {
            const double t = 1.0 / ((nd - 1.0) * (nd - 1.0));
            const double s = nd * t;
            const double g0 = (*jobs.at({static_cast<int>(Kind::Convolution), h}).gram)(0, 0);
            return ((s - 2.0 * t) * f.q + t * nd * g0) / nd;
          }
          const double t1 = n1d / (n2d * n2d), t2 = n2d / (n1d * n1d);
          return (t2 * f.q11 + t1 * f.q22) / nd;
        };

        switch (cfg.family) {
          case Family::AD:
          case Family::AD_BC: value = plug(Kind::Kernel); break;
          case Family::AD_GJ: value = jack(Kind::Kernel); break;
          case Family::AD_LO: value = ad_lo(); break;
          case Family::ISD:
          case Family::ISD_BC: value = plug(Kind::Convolution); break;
          case Family::ISD_GJ: value = jack(Kind::Convolution); break;
          case Family::ISD_LO: value = isd_lo(); break;
          case Family::ISD_DCF: value = get(Kind::Convolution, h, r).q12 / (n1d * n2d); break;
          case Family::LR:
          case Family::LR_BC: value = 2.0 * plug(Kind::Kernel) - plug(Kind::Convolution); break;
          case Family::LR_GJ: value = 2.0 * jack(Kind::Kernel) - jack(Kind::Convolution); break;
          case Family::LR_LO: value = 2.0 * ad_lo() - isd_lo(); break;
        }
        out(r0 + r, static_cast<Index>(vi)) = value;
      }
    }
  });
  return out;
}

}  // namespace adboot
