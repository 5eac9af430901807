#include "adboot/harness.hpp"

#include "adboot/engine.hpp"
#include "adboot/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace adboot {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

// Sample variance with denominator m - 1 (0 for a single value).
double var_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  std::vector<double> sq(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) sq[k] = (v[k] - m) * (v[k] - m);
  return pairwise_sum(sq) / static_cast<double>(v.size() - 1);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace

std::string CellSpec::label() const {
  std::string out = family_label;
  if (needs_blocks(family) && family_label != "AD-CF" && family != Family::ISD_DCF) {
    const Index b = blocks.value_or(kBlocksN);
    out += b == kBlocksN ? "(B=n)" : "(B=" + std::to_string(b) + ")";
  }
  if (is_gj(family) && gj_c && *gj_c != kDefaultGjRatio) out += "(c=" + short_double(*gj_c) + ")";
  if (variant != Variant::Natural) out += "/" + std::string(variant_name(variant));
  if (scheme != Scheme::Standard) out += "/" + std::string(scheme_name(scheme));
  if (centering != CenteringRule::AtEstimate) out += "/" + std::string(centering_name(centering));
  return out;
}

EstimatorConfig CellSpec::estimator(const KernelSpec& kernel, double h) const {
  EstimatorConfig cfg;
  cfg.family = family;
  cfg.kernel = kernel;
  cfg.h = h;
  cfg.gj_c = gj_c;
  cfg.blocks = blocks;
  return cfg;
}

CellSpec make_cell(std::string_view family_label, Variant variant, Scheme scheme, std::optional<Index> blocks,
                   std::optional<double> gj_c) {
  CellSpec cell;
  std::string label(family_label);
  for (char& ch : label) ch = ch == '_' ? '-' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  cell.family_label = label;
  if (label == "AD-CF") {
    cell.family = Family::AD_LO;
    if (blocks && *blocks != 2) throw std::invalid_argument("AD-CF is the two-block leave-out estimator");
    blocks = 2;
  } else {
    cell.family = parse_family(label);
  }
  cell.variant = variant;
  cell.scheme = scheme;
  if (is_gj(cell.family)) cell.gj_c = gj_c.value_or(kDefaultGjRatio);
  if (is_leave_out(cell.family)) cell.blocks = blocks.value_or(cell.family == Family::LR_LO ? 2 : kBlocksN);
  else if (blocks) throw std::invalid_argument(label + " takes no block count");
  // family/variant compatibility does not depend on n or h
  BootstrapVariant{cell.estimator(KernelSpec(KernelFamily::Gaussian2, 1), 1.0), variant, 1.0}.validate(1 << 20);
  return cell;
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (boot_reps < 1) throw std::invalid_argument("boot_reps must be at least 1");
  if (cells.empty()) throw std::invalid_argument("no cells to run");
  if (ns.empty() || gammas.empty() || alphas.empty()) throw std::invalid_argument("n, gamma and alpha lists must be nonempty");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(c0 > 0.0)) throw std::invalid_argument("c0 must be positive");
  if (ks_replications < 0) throw std::invalid_argument("ks_replications must be nonnegative");
  const KernelSpec k = kernel_spec();
  for (Index n : ns) {
    for (double g : gammas) {
      const double h = BandwidthRule(c0, g).at(n);
      for (const auto& c : cells) {
        BootstrapVariant v{c.estimator(k, h), c.variant, boot_h_ratio};
        if (c.variant == Variant::FixedFirstStage || c.variant == Variant::FixedFirstStageBC) v.h_ratio = 1.0;
        v.validate(n);
        ResamplePlan{c.scheme, boot_reps, 0}.validate(n);
      }
    }
  }
}

const CellReport& MCReport::find(double gamma, std::string_view cell, Index n, double alpha) const {
  for (const auto& r : rows)
    if (std::abs(r.gamma - gamma) < 1e-12 && r.cell == cell && r.n == n && std::abs(r.alpha - alpha) < 1e-12) return r;
  throw std::out_of_range("no report row for cell " + std::string(cell) + " at n = " + std::to_string(n));
}

std::uint64_t replication_sample_seed(std::uint64_t master, Index n, Index r) {
  return derive_seed(derive_seed(master, Stream::Sample, static_cast<std::uint64_t>(n)), Stream::Derived,
                     static_cast<std::uint64_t>(r));
}

std::uint64_t replication_boot_seed(std::uint64_t master, Index n, Index r, Scheme scheme) {
  const Stream s = scheme == Scheme::Standard ? Stream::Bootstrap : Stream::CrossFitBootstrap;
  return derive_seed(derive_seed(master, s, static_cast<std::uint64_t>(n)), Stream::Derived,
                     static_cast<std::uint64_t>(r));
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS distance needs nonempty inputs");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_distance_normal(std::vector<double> a, double mean, double var) {
  if (a.empty()) throw std::invalid_argument("KS distance needs a nonempty sample");
  if (!(var > 0.0)) throw std::invalid_argument("normal reference needs positive variance");
  std::sort(a.begin(), a.end());
  const double m = static_cast<double>(a.size());
  const double sd = std::sqrt(var);
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double f = normal_cdf((a[k] - mean) / sd);
    d = std::max({d, static_cast<double>(k + 1) / m - f, f - static_cast<double>(k) / m});
  }
  return d;
}

namespace {

struct CellOutcome {
  double estimate = 0.0;
  double boot_var = 0.0;
  double median_estimate = 0.0;
  double residual = 0.0;
  std::vector<ConfidenceInterval> intervals;  // alpha-major, method-minor
  std::vector<double> draws;                  // kept for the KS replications only
  double center = 0.0;
};

struct Job {
  const ExperimentConfig& config;
  KernelSpec kernel;
  double theta0;
  Index n;
  double h;
  std::vector<BootstrapVariant> variants;
};

std::vector<CellOutcome> run_replication(const Job& job, Index r, bool keep_draws) {
  const ExperimentConfig& cfg = job.config;
  const Index n = job.n;
  const Sample sample = sample_from(cfg.model, n, replication_sample_seed(cfg.seed, n, r));
  std::vector<double> l0(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    l0[static_cast<std::size_t>(i)] = 2.0 * (cfg.model.density(sample.data().row(i).transpose()) - job.theta0);
  const double l0_sum = pairwise_sum(l0);
  const double rootn = std::sqrt(static_cast<double>(n));

  const std::size_t cells = cfg.cells.size();
  std::vector<std::vector<double>> raw(cells);
  for (Scheme scheme : {Scheme::Standard, Scheme::CrossFit2}) {
    const ResamplePlan plan{scheme, cfg.boot_reps, replication_boot_seed(cfg.seed, n, r, scheme)};
    std::vector<BootstrapVariant> batch;
    std::vector<std::size_t> where;
    for (std::size_t c = 0; c < cells; ++c) {
      if (cfg.cells[c].scheme != scheme) continue;
      const BootstrapVariant& v = job.variants[c];
      if (BootstrapEngine::supports(v, n)) {
        batch.push_back(v);
        where.push_back(c);
      } else {
        raw[c] = run_bootstrap(sample, v, plan, {CenteringRule::AtEstimate, 1, false}).raw;
      }
    }
    if (batch.empty()) continue;
    BootstrapEngine engine(sample, job.kernel);
    const Eigen::MatrixXd m = engine.raw_draws(batch, plan, 1);
    for (std::size_t k = 0; k < where.size(); ++k) {
      const Eigen::VectorXd col = m.col(static_cast<Index>(k));
      raw[where[k]].assign(col.data(), col.data() + col.size());
    }
  }

  // Several cells share an original-sample estimator; evaluate each once.
  std::map<std::string, double> cache;
  const EstimateFn cached = [&](const EstimatorConfig& e) {
    std::string key = std::string(family_name(e.family)) + "|" + format_double(e.h) + "|" +
                      (e.gj_c ? format_double(*e.gj_c) : "") + "|" + (e.blocks ? std::to_string(*e.blocks) : "");
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, estimate(sample, e).value).first;
    return it->second;
  };

  std::vector<CellOutcome> out(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const CellSpec& cell = cfg.cells[c];
    const BootstrapVariant& v = job.variants[c];
    const SplitValue center = variant_center(sample, v, cached);
    const BootstrapDistribution dist =
        make_distribution(sample, v, cell.scheme, cell.centering, std::move(raw[c]), center);
    CellOutcome& o = out[c];
    o.estimate = center.value();
    o.boot_var = dist.size() >= 2 ? bootstrap_variance(dist, n) : 0.0;
    o.median_estimate = percentile_point_estimate(dist);
    o.residual = rootn * (o.estimate - job.theta0) - l0_sum / rootn;
    for (double alpha : cfg.alphas) {
      for (IntervalMethod m : cfg.methods) {
        switch (m) {
          case IntervalMethod::Percentile: o.intervals.push_back(percentile_interval(dist, alpha)); break;
          case IntervalMethod::Efron: o.intervals.push_back(efron_interval(dist, alpha)); break;
          case IntervalMethod::Normal: o.intervals.push_back(normal_interval(o.estimate, o.boot_var, n, alpha)); break;
        }
      }
    }
    if (keep_draws) {
      o.center = dist.center();
      o.draws = dist.values();
    }
  }
  return out;
}

double family_theta_n(const CellSpec& cell, const GaussianMixtureTruth& truth, double h) {
  using Kind = KernelPairs::Kind;
  auto target = [&](Kind kind) {
    if (!is_gj(cell.family)) return truth.smoothed_target(kind, h);
    const JackknifeWeights w = jackknife_weights(*cell.gj_c, truth.kernel().dim());
    return w.near * truth.smoothed_target(kind, h) + w.far * truth.smoothed_target(kind, *cell.gj_c * h);
  };
  if (is_ad(cell.family)) return target(Kind::Kernel);
  if (is_isd(cell.family)) return target(Kind::Convolution);
  return 2.0 * target(Kind::Kernel) - target(Kind::Convolution);
}

std::string file_stem(const std::string& label) {
  std::string out;
  for (char ch : label) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '.') out += ch;
    else if (ch == '=') continue;
    else out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

}  // namespace

MCReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const KernelSpec kernel = config.kernel_spec();
  const GaussianMixtureTruth truth(config.model, kernel);
  const double th0 = truth.theta0();
  const double s0 = sigma0_sq(config.model);
  const int workers = resolve_workers(config.workers);
  const std::size_t cells = config.cells.size();
  const Index M = config.replications;
  const Index ks_reps = std::min(config.ks_replications, M);

  std::optional<std::filesystem::path> draws_dir;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    if (config.save_draws) {
      draws_dir = *options.out_dir / "draws";
      std::filesystem::create_directories(*draws_dir);
    }
  }

  MCReport report;
  for (double gamma : config.gammas) {
    const BandwidthRule rule(config.c0, gamma);
    const std::string regime(regime_name(classify_bandwidth_regime(rule, kernel.dim(), kernel.smoothness())));
    for (Index n : config.ns) {
      Job job{config, kernel, th0, n, rule.at(n), {}};
      for (const auto& cell : config.cells) {
        BootstrapVariant v{cell.estimator(kernel, job.h), cell.variant, config.boot_h_ratio};
        if (cell.variant == Variant::FixedFirstStage || cell.variant == Variant::FixedFirstStageBC) v.h_ratio = 1.0;
        job.variants.push_back(v);
      }
      std::vector<std::vector<CellOutcome>> results(static_cast<std::size_t>(M));
      std::vector<std::string> failures(static_cast<std::size_t>(M));
      parallel_for(M, workers, [&](Index r) {
        try {
          results[static_cast<std::size_t>(r)] = run_replication(job, r, r < ks_reps);
        } catch (const std::exception& e) {
          failures[static_cast<std::size_t>(r)] = e.what();
        }
        if (options.progress && (r + 1) % 100 == 0)
          std::cerr << "  gamma " << short_double(gamma) << " n " << n << ": replication " << (r + 1) << "\n";
      });
      for (Index r = 0; r < M; ++r)
        if (!failures[static_cast<std::size_t>(r)].empty())
          throw std::runtime_error("replication " + std::to_string(r) + " (gamma " + short_double(gamma) + ", n " +
                                   std::to_string(n) + ") failed: " + failures[static_cast<std::size_t>(r)]);

      const double nd = static_cast<double>(n);
      for (std::size_t c = 0; c < cells; ++c) {
        const CellSpec& cell = config.cells[c];
        std::vector<double> est, bvar, med, res;
        for (Index r = 0; r < M; ++r) {
          const CellOutcome& o = results[static_cast<std::size_t>(r)][c];
          est.push_back(o.estimate);
          bvar.push_back(o.boot_var);
          med.push_back(o.median_estimate - th0);
          res.push_back(o.residual);
        }
        // KS: sampling distribution of sqrt(n)(theta-hat - theta0) against bootstrap sqrt(n)(theta* - center).
        std::vector<double> sampling(est.size());
        for (std::size_t k = 0; k < est.size(); ++k) sampling[k] = std::sqrt(nd) * (est[k] - th0);
        std::vector<double> pooled, per_rep;
        for (Index r = 0; r < ks_reps; ++r) {
          const CellOutcome& o = results[static_cast<std::size_t>(r)][c];
          std::vector<double> z(o.draws.size());
          for (std::size_t k = 0; k < z.size(); ++k) z[k] = std::sqrt(nd) * (o.draws[k] - o.center);
          per_rep.push_back(ks_distance(sampling, z));
          pooled.insert(pooled.end(), z.begin(), z.end());
        }
        if (draws_dir) {
          std::ofstream f(*draws_dir / (file_stem(cell.label()) + "_g" + short_double(gamma) + "_n" +
                                        std::to_string(n) + ".csv"));
          f << "replication,center,draw\n";
          for (Index r = 0; r < ks_reps; ++r) {
            const CellOutcome& o = results[static_cast<std::size_t>(r)][c];
            for (double x : o.draws) f << r << ',' << format_double(o.center) << ',' << format_double(x) << '\n';
          }
        }
        for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
          CellReport row;
          row.gamma = gamma;
          row.regime = regime;
          row.cell = cell.label();
          row.family = cell.family_label;
          row.variant = variant_name(cell.variant);
          row.scheme = scheme_name(cell.scheme);
          row.centering = centering_name(cell.centering);
          row.n = n;
          row.h = job.h;
          row.alpha = config.alphas[ai];
          row.replications = M;
          row.boot_reps = config.boot_reps;
          row.theta0 = th0;
          row.theta_n = family_theta_n(cell, truth, job.h);
          row.sigma0_sq = s0;
          row.mc_mean = mean_of(est);
          row.mc_bias = row.mc_mean - th0;
          row.mc_bias_se = std::sqrt(var_of(est) / static_cast<double>(M));
          row.mc_var_times_n = nd * var_of(est);
          row.boot_var_mean = mean_of(bvar);
          row.median_estimate_bias = mean_of(med);
          row.median_estimate_bias_se = std::sqrt(var_of(med) / static_cast<double>(M));
          row.efficiency_residual_mean = mean_of(res);
          row.efficiency_residual_var = var_of(res);
          row.ks_pooled = pooled.empty() ? 0.0 : ks_distance(sampling, pooled);
          row.ks_median = per_rep.empty() ? 0.0 : median_of(per_rep);
          for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
            const std::size_t slot = ai * config.methods.size() + mi;
            Index hits = 0;
            std::vector<double> len;
            for (Index r = 0; r < M; ++r) {
              const ConfidenceInterval& ci = results[static_cast<std::size_t>(r)][c].intervals[slot];
              hits += ci.contains(th0) ? 1 : 0;
              len.push_back(ci.length());
            }
            row.methods[std::string(interval_method_name(config.methods[mi]))] = {
                static_cast<double>(hits) / static_cast<double>(M), mean_of(len)};
          }
          report.rows.push_back(std::move(row));
        }
      }
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (options.out_dir) {
    write_report_csv(report, *options.out_dir / "report.csv");
    write_report_json(report, *options.out_dir / "report.json");
  }
  return report;
}

void write_report_csv(const MCReport& report, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::vector<std::string> methods;
  for (const auto& row : report.rows)
    for (const auto& [name, _] : row.methods)
      if (std::find(methods.begin(), methods.end(), name) == methods.end()) methods.push_back(name);
  f << "gamma,regime,cell,family,variant,scheme,centering,n,h,alpha,replications,boot_reps,theta0,theta_n,sigma0_sq,"
       "mc_mean,mc_bias,mc_bias_se,mc_var_times_n,boot_var_mean,median_estimate_bias,median_estimate_bias_se,"
       "efficiency_residual_mean,efficiency_residual_var,ks_pooled,ks_median";
  for (const auto& m : methods) f << ",coverage_" << m << ",length_" << m;
  f << '\n';
  for (const auto& r : report.rows) {
    f << format_double(r.gamma) << ',' << r.regime << ',' << r.cell << ',' << r.family << ',' << r.variant << ','
      << r.scheme << ',' << r.centering << ',' << r.n << ',' << format_double(r.h) << ',' << format_double(r.alpha)
      << ',' << r.replications << ',' << r.boot_reps << ',' << format_double(r.theta0) << ','
      << format_double(r.theta_n) << ',' << format_double(r.sigma0_sq) << ',' << format_double(r.mc_mean) << ','
      << format_double(r.mc_bias) << ',' << format_double(r.mc_bias_se) << ',' << format_double(r.mc_var_times_n)
      << ',' << format_double(r.boot_var_mean) << ',' << format_double(r.median_estimate_bias) << ','
      << format_double(r.median_estimate_bias_se) << ',' << format_double(r.efficiency_residual_mean) << ','
      << format_double(r.efficiency_residual_var) << ',' << format_double(r.ks_pooled) << ','
      << format_double(r.ks_median);
    for (const auto& m : methods) {
      auto it = r.methods.find(m);
      if (it == r.methods.end()) f << ",,";
      else f << ',' << format_double(it->second.coverage) << ',' << format_double(it->second.mean_length);
    }
    f << '\n';
  }
}

std::string report_json(const MCReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["gamma"] = r.gamma;
    j["regime"] = r.regime;
    j["cell"] = r.cell;
    j["family"] = r.family;
    j["variant"] = r.variant;
    j["scheme"] = r.scheme;
    j["centering"] = r.centering;
    j["n"] = r.n;
    j["h"] = r.h;
    j["alpha"] = r.alpha;
    j["replications"] = r.replications;
    j["boot_reps"] = r.boot_reps;
    j["theta0"] = r.theta0;
    j["theta_n"] = r.theta_n;
    j["sigma0_sq"] = r.sigma0_sq;
    j["mc_mean"] = r.mc_mean;
    j["mc_bias"] = r.mc_bias;
    j["mc_bias_se"] = r.mc_bias_se;
    j["mc_var_times_n"] = r.mc_var_times_n;
    j["boot_var_mean"] = r.boot_var_mean;
    j["median_estimate_bias"] = r.median_estimate_bias;
    j["median_estimate_bias_se"] = r.median_estimate_bias_se;
    j["efficiency_residual_mean"] = r.efficiency_residual_mean;
    j["efficiency_residual_var"] = r.efficiency_residual_var;
    j["ks_pooled"] = r.ks_pooled;
    j["ks_median"] = r.ks_median;
    nlohmann::ordered_json m;
    for (const auto& [name, s] : r.methods) m[name] = {{"coverage", s.coverage}, {"mean_length", s.mean_length}};
    j["methods"] = m;
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["rows"] = rows;
  return out.dump(2);
}

void write_report_json(const MCReport& report, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << report_json(report) << '\n';
}

std::vector<EfficiencySummary> efficiency_check(const ExperimentConfig& config, const CellSpec& cell, double gamma) {
  const KernelSpec kernel = config.kernel_spec();
  const double th0 = theta0(config.model);
  const BandwidthRule rule(config.c0, gamma);
  const int workers = resolve_workers(config.workers);
  std::vector<EfficiencySummary> out;
  for (Index n : config.ns) {
    const EstimatorConfig est = cell.estimator(kernel, rule.at(n));
    est.validate(n);
    std::vector<double> res(static_cast<std::size_t>(config.replications));
    parallel_for(config.replications, workers, [&](Index r) {
      const Sample s = sample_from(config.model, n, replication_sample_seed(config.seed, n, r));
      std::vector<double> l0(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i)
        l0[static_cast<std::size_t>(i)] = 2.0 * (config.model.density(s.data().row(i).transpose()) - th0);
      const double rootn = std::sqrt(static_cast<double>(n));
      res[static_cast<std::size_t>(r)] = rootn * (estimate(s, est).value - th0) - pairwise_sum(l0) / rootn;
    });
    out.push_back({n, mean_of(res), var_of(res)});
  }
  return out;
}

}  // namespace adboot
