#pragma once

#include "adboot/inference.hpp"
#include "adboot/oracles.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adboot {

// One column of the regime matrix: an estimator, how it is bootstrapped and
// how the bootstrap distribution is centered.
struct CellSpec {
  std::string family_label;  // as written in the config ("AD-CF" is AD-LO with two blocks)
  Family family = Family::AD;
  std::optional<double> gj_c;
  std::optional<Index> blocks;
  Variant variant = Variant::Natural;
  Scheme scheme = Scheme::Standard;
  CenteringRule centering = CenteringRule::AtEstimate;

  std::string label() const;
  EstimatorConfig estimator(const KernelSpec& kernel, double h) const;
};

// Parses a family label, resolving the AD-CF alias and the default block counts.
CellSpec make_cell(std::string_view family_label, Variant variant = Variant::Natural,
                   Scheme scheme = Scheme::Standard, std::optional<Index> blocks = std::nullopt,
                   std::optional<double> gj_c = std::nullopt);

inline constexpr double kDefaultGjRatio = 2.0;

struct ExperimentConfig {
  DensityModel model = DensityModel::standard_normal(1);
  KernelFamily kernel = KernelFamily::Gaussian2;
  double c0 = 0.5;
  std::vector<double> gammas{1.0 / 3.0};
  std::vector<CellSpec> cells;
  std::vector<Index> ns{250};
  Index replications = 1000;
  Index boot_reps = 999;
  std::vector<double> alphas{0.05};
  std::vector<IntervalMethod> methods{IntervalMethod::Percentile, IntervalMethod::Efron, IntervalMethod::Normal};
  std::uint64_t seed = 1;
  int workers = 0;  // 0: ADBOOT_WORKERS or 1
  double boot_h_ratio = 1.0;
  Index ks_replications = 50;  // replications whose draws are pooled for the KS comparison
  bool save_draws = false;

  KernelSpec kernel_spec() const { return KernelSpec(kernel, model.dim()); }
  void validate() const;
};

// Model files: {"components": [{"weight": w, "mean": [...], "var": [...]}, ...]}.
DensityModel parse_model(const std::string& json_text);
DensityModel load_model(const std::filesystem::path& path);

// Accepts a number or a ratio string such as "1/3".
double parse_ratio(const std::string& text);

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

struct MethodSummary {
  double coverage = 0.0;
  double mean_length = 0.0;
};

// One row of the report: a (gamma, cell, n, alpha) combination.
struct CellReport {
  double gamma = 0.0;
  std::string regime;
  std::string cell;
  std::string family;
  std::string variant;
  std::string scheme;
  std::string centering;
  Index n = 0;
  double h = 0.0;
  double alpha = 0.05;
  Index replications = 0;
  Index boot_reps = 0;
  double theta0 = 0.0;
  double theta_n = 0.0;
  double sigma0_sq = 0.0;
  double mc_mean = 0.0;
  double mc_bias = 0.0;
  double mc_bias_se = 0.0;
  double mc_var_times_n = 0.0;
  std::map<std::string, MethodSummary> methods;
  double boot_var_mean = 0.0;
  double median_estimate_bias = 0.0;  // of 2 theta-hat - median*
  double median_estimate_bias_se = 0.0;
  double efficiency_residual_mean = 0.0;
  double efficiency_residual_var = 0.0;
  double ks_pooled = 0.0;
  double ks_median = 0.0;
};

struct MCReport {
  std::vector<CellReport> rows;
  double wall_seconds = 0.0;  // not written to the report files

  const CellReport& find(double gamma, std::string_view cell, Index n, double alpha = 0.05) const;
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // report.csv, report.json, draws/
  bool progress = false;
};

MCReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

void write_report_csv(const MCReport& report, const std::filesystem::path& path);
void write_report_json(const MCReport& report, const std::filesystem::path& path);
std::string report_json(const MCReport& report);

// Sample seed and bootstrap plan seed for replication r at sample size n.
std::uint64_t replication_sample_seed(std::uint64_t master, Index n, Index r);
std::uint64_t replication_boot_seed(std::uint64_t master, Index n, Index r, Scheme scheme);

struct EfficiencySummary {
  Index n = 0;
  double residual_mean = 0.0;
  double residual_var = 0.0;
};

// sqrt(n)(theta-hat - theta0) - n^{-1/2} sum L0(X_i) across replications, per n.
std::vector<EfficiencySummary> efficiency_check(const ExperimentConfig& config, const CellSpec& cell, double gamma);

// Kolmogorov-Smirnov sup distance.
double ks_distance(std::vector<double> a, std::vector<double> b);
double ks_distance_normal(std::vector<double> a, double mean, double var);

}  // namespace adboot
