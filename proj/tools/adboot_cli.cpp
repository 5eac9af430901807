#include "adboot/bootstrap.hpp"
#include "adboot/harness.hpp"
#include "adboot/hoeffding.hpp"
#include "adboot/inference.hpp"
#include "adboot/oracles.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace adboot;
using json = nlohmann::ordered_json;

namespace {

struct Common {
  std::string kernel = "gauss2";
  int dim = 0;  // 0: from the input
  int workers = 0;
};

struct EstimatorArgs {
  std::string input;
  std::string family = "AD";
  double h = 0.0;
  std::optional<double> gj_c;
  std::string blocks;
};

struct BootArgs {
  std::string variant = "natural";
  std::string scheme = "standard";
  std::string centering = "estimate";
  Index boot_reps = 999;
  std::uint64_t seed = 1;
  double boot_h_ratio = 1.0;
  bool no_engine = false;
};

Sample read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw std::runtime_error("non-numeric value in " + path + ": " + line);
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) throw std::runtime_error("ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no data rows in " + path);
  Eigen::MatrixXd x(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return Sample(std::move(x));
}

std::optional<Index> parse_blocks(const std::string& b) {
  if (b.empty()) return std::nullopt;
  if (b == "n") return kBlocksN;
  return static_cast<Index>(std::stoll(b));
}

KernelSpec kernel_for(const Common& common, int data_dim) {
  if (common.dim != 0 && common.dim != data_dim)
    throw std::invalid_argument("--dim " + std::to_string(common.dim) + " does not match the data dimension " +
                                std::to_string(data_dim));
  return KernelSpec(parse_kernel_family(common.kernel), data_dim);
}

void add_estimator_options(CLI::App* app, EstimatorArgs& e) {
  app->add_option("--input", e.input, "CSV file, one observation per row")->required();
  app->add_option("--family", e.family, "estimator family, e.g. AD, ISD-LO, LR-GJ, AD-CF");
  app->add_option("--h", e.h, "bandwidth")->required();
  app->add_option("--gj-c", e.gj_c, "jackknife bandwidth ratio c");
  app->add_option("--blocks", e.blocks, "block count for leave-out families (integer or n)");
}

void add_boot_options(CLI::App* app, BootArgs& b) {
  app->add_option("--variant", b.variant, "natural|tilde-bc|tilde-kernel|fixed-first-stage|ffs-bc");
  app->add_option("--scheme", b.scheme, "standard|crossfit2");
  app->add_option("--centering", b.centering, "estimate|bootstrap-mean");
  app->add_option("--boot-reps", b.boot_reps, "bootstrap draws");
  app->add_option("--seed", b.seed, "seed");
  app->add_option("--boot-h-ratio", b.boot_h_ratio, "bootstrap bandwidth over original bandwidth");
  app->add_flag("--no-engine", b.no_engine, "evaluate every draw directly");
}

EstimatorConfig estimator_config(const EstimatorArgs& e, const KernelSpec& kernel) {
  const CellSpec cell = make_cell(e.family, Variant::Natural, Scheme::Standard, parse_blocks(e.blocks), e.gj_c);
  return cell.estimator(kernel, e.h);
}

BootstrapDistribution run_cli_bootstrap(const Sample& s, const EstimatorConfig& cfg, const BootArgs& b, int workers,
                                        BootstrapVariant& variant) {
  variant = BootstrapVariant{cfg, parse_variant(b.variant), b.boot_h_ratio};
  const ResamplePlan plan{parse_scheme(b.scheme), b.boot_reps, b.seed};
  BootstrapOptions opt;
  opt.centering = parse_centering(b.centering);
  opt.workers = resolve_workers(workers);
  opt.use_engine = !b.no_engine;
  return run_bootstrap(s, variant, plan, opt);
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Average-density estimators, bootstrap inference and Monte Carlo experiments"};
  app.set_help_flag("--help", "show help");
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Common common;
  app.add_option("--kernel", common.kernel, "gauss2|gauss4|gauss6");
  app.add_option("--dim", common.dim, "data dimension (checked against the input)");
  app.add_option("--workers", common.workers, "worker threads (default: ADBOOT_WORKERS or 1)");

  EstimatorArgs est;
  BootArgs boot;

  auto* estimate_cmd = app.add_subcommand("estimate", "evaluate one estimator");
  add_estimator_options(estimate_cmd, est);

  auto* decompose_cmd = app.add_subcommand("decompose", "bootstrap Hoeffding decomposition at the sample");
  add_estimator_options(decompose_cmd, est);

  auto* bootstrap_cmd = app.add_subcommand("bootstrap", "bootstrap distribution summary");
  add_estimator_options(bootstrap_cmd, est);
  add_boot_options(bootstrap_cmd, boot);

  std::string method = "percentile";
  double alpha = 0.05;
  auto* ci_cmd = app.add_subcommand("ci", "confidence interval");
  add_estimator_options(ci_cmd, est);
  add_boot_options(ci_cmd, boot);
  ci_cmd->add_option("--method", method, "percentile|efron|normal");
  ci_cmd->add_option("--alpha", alpha, "1 - coverage level");

  std::string model_path;
  std::vector<double> hs;
  auto* truth_cmd = app.add_subcommand("truth", "population quantities of a Gaussian mixture");
  truth_cmd->add_option("--model", model_path, "model file (default: standard normal)");
  truth_cmd->add_option("--h", hs, "bandwidths for the smoothed targets");

  std::string config_path, out_dir;
  bool progress = false;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo experiment");
  mc_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
  mc_cmd->add_option("--out", out_dir, "output directory")->required();
  mc_cmd->add_flag("--progress", progress, "progress on stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate_cmd->parsed() || decompose_cmd->parsed() || bootstrap_cmd->parsed() || ci_cmd->parsed()) {
      const Sample s = read_csv(est.input);
      const KernelSpec kernel = kernel_for(common, static_cast<int>(s.dim()));
      const EstimatorConfig cfg = estimator_config(est, kernel);
      const int workers = resolve_workers(common.workers);

      if (estimate_cmd->parsed()) {
        const EstimatorResult r = estimate(s, cfg, {false, workers});
        json j;
        j["value"] = r.value;
        j["family"] = est.family;
        j["n"] = r.n;
        j["d"] = r.d;
        j["h"] = cfg.h;
        print(j);
      } else if (decompose_cmd->parsed()) {
        const HoeffdingParts p = decompose_bootstrap(s, VRepresentation::for_estimator(s, cfg));
        json j;
        j["family"] = est.family;
        j["estimate"] = p.estimate;
        j["beta"] = p.beta;
        j["linear_summary"] = {{"mean", p.linear_mean()}, {"var", p.linear_var()}};
        j["quad_summary"] = {{"mean", p.quad_mean}, {"var", p.quad_var}};
        j["reconstruction_residual"] = p.reconstruction_residual;
        print(j);
      } else {
        BootstrapVariant variant;
        const BootstrapDistribution d = run_cli_bootstrap(s, cfg, boot, workers, variant);
        if (bootstrap_cmd->parsed()) {
          json j;
          j["family"] = est.family;
          j["variant"] = boot.variant;
          j["scheme"] = boot.scheme;
          j["boot_reps"] = d.size();
          j["center"] = d.center();
          j["mean"] = d.mean();
          const double nvar = d.size() >= 2 ? bootstrap_variance(d, s.n()) : 0.0;
          j["var"] = nvar / static_cast<double>(s.n());
          j["n_var"] = nvar;
          json q;
          for (double a : {0.025, 0.05, 0.25, 0.5, 0.75, 0.95, 0.975}) {
            char key[16];
            std::snprintf(key, sizeof key, "%g", a);
            q[key] = bootstrap_quantile(d, a);
          }
          j["quantiles"] = q;
          j["median_point_estimate"] = percentile_point_estimate(d);
          print(j);
        } else {
          ConfidenceInterval ci;
          switch (parse_interval_method(method)) {
            case IntervalMethod::Percentile: ci = percentile_interval(d, alpha); break;
            case IntervalMethod::Efron: ci = efron_interval(d, alpha); break;
            case IntervalMethod::Normal: {
              if (d.size() < 2) throw std::invalid_argument("the normal interval needs at least two draws");
              ci = normal_interval(variant_center(s, variant).value(), bootstrap_variance(d, s.n()), s.n(), alpha);
              break;
            }
          }
          json j;
          j["lo"] = ci.lo;
          j["hi"] = ci.hi;
          j["method"] = std::string(interval_method_name(ci.method));
          j["alpha"] = ci.alpha;
          print(j);
        }
      }
    } else if (truth_cmd->parsed()) {
      const DensityModel model =
          model_path.empty() ? DensityModel::standard_normal(common.dim == 0 ? 1 : common.dim) : load_model(model_path);
      const KernelSpec kernel = kernel_for(common, model.dim());
      json j;
      j["theta0"] = theta0(model);
      j["sigma0_sq"] = sigma0_sq(model);
      j["S"] = kernel.smoothness();
      json rows = json::array();
      for (double h : hs) {
        const TruthValues t = truth_values(model, kernel, h);
        rows.push_back({{"h", h}, {"theta_n_ad", t.theta_n}, {"theta_n_isd", t.theta_n_isd}});
      }
      j["theta_n"] = rows;
      print(j);
    } else if (mc_cmd->parsed()) {
      ExperimentConfig cfg = load_experiment_config(config_path);
      if (common.workers > 0) cfg.workers = common.workers;
      RunOptions opt;
      opt.out_dir = out_dir;
      opt.progress = progress;
      const MCReport report = run_experiment(cfg, opt);
      json j;
      j["rows"] = report.rows.size();
      j["report_csv"] = (std::filesystem::path(out_dir) / "report.csv").string();
      j["report_json"] = (std::filesystem::path(out_dir) / "report.json").string();
      print(j);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
