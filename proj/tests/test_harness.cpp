#include "adboot/harness.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace adboot;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.gammas = {1.0 / 3.0, 0.5};
  cfg.ns = {40, 60};
  cfg.replications = 6;
  cfg.boot_reps = 49;
  cfg.ks_replications = 3;
  cfg.seed = 11;
  cfg.workers = 1;
  for (const char* f : {"AD", "AD-BC", "ISD-LO", "LR-GJ", "AD-CF"}) cfg.cells.push_back(make_cell(f));
  cfg.cells.push_back(make_cell("AD-BC", Variant::TildeBC));
  cfg.cells.push_back(make_cell("AD-CF", Variant::Natural, Scheme::CrossFit2));
  cfg.cells.push_back(make_cell("LR", Variant::FixedFirstStage));
  cfg.cells.push_back(make_cell("ISD-LO", Variant::TildeKernel, Scheme::Standard, 2));
  return cfg;
}

}  // namespace

TEST_CASE("cell labels and defaults") {
  const CellSpec cf = make_cell("AD-CF");
  CHECK(cf.family == Family::AD_LO);
  CHECK(cf.blocks == 2);
  CHECK(make_cell("AD-LO").blocks == kBlocksN);
  CHECK(make_cell("LR-LO").blocks == 2);
  CHECK(make_cell("AD-GJ").gj_c == kDefaultGjRatio);
  CHECK(make_cell("ISD-LO", Variant::Natural, Scheme::Standard, 2).label() == "ISD-LO(B=2)");
  CHECK(make_cell("AD-BC", Variant::TildeBC).label() == "AD-BC/tilde-bc");
  CHECK(make_cell("AD-CF", Variant::Natural, Scheme::CrossFit2).label() == "AD-CF/crossfit2");
  CHECK_THROWS_AS(make_cell("AD", Variant::TildeKernel), std::invalid_argument);
  CHECK_THROWS_AS(make_cell("nope"), std::invalid_argument);
}

TEST_CASE("ratios and configs") {
  CHECK(parse_ratio("1/3") == 1.0 / 3.0);
  CHECK(parse_ratio("0.5") == 0.5);
  CHECK_THROWS_AS(parse_ratio("1/0"), std::invalid_argument);

  const ExperimentConfig cfg = parse_experiment_config(R"({
    "model": {"components": [{"weight": 1.0, "mean": [0.0], "var": [1.0]}]},
    "kernel": "gauss4",
    "bandwidth": {"c0": 0.8, "gamma": ["1/3", 0.45]},
    "cells": [{"family": "AD"}, {"family": "ISD-LO", "blocks": 2}, {"family": "AD-BC", "variant": "tilde-bc"},
              {"family": "AD-CF", "scheme": "crossfit2"}, {"family": "AD-GJ", "gj_c": 1.5}],
    "n": [100, 200], "replications": 10, "boot_reps": 99, "alpha": [0.05, 0.1],
    "methods": ["percentile", "normal"], "seed": 3
  })");
  CHECK(cfg.kernel == KernelFamily::Gaussian4);
  CHECK(cfg.c0 == 0.8);
  CHECK(cfg.gammas.size() == 2);
  CHECK(cfg.cells.size() == 5);
  CHECK(cfg.cells[1].blocks == 2);
  CHECK(cfg.cells[4].gj_c == 1.5);
  CHECK(cfg.alphas.size() == 2);
  CHECK(cfg.methods.size() == 2);
  CHECK_THROWS(parse_experiment_config(R"({"cells": [{"family": "AD"}], "replications": 0})"));
  CHECK_THROWS(parse_experiment_config(R"({"cells": [{"family": "AD"}], "n": [10], "bogus": 1})"));

  const DensityModel m = parse_model(R"({"components": [{"weight": 0.4, "mean": [0, 1], "var": [1, 2]},
                                                         {"weight": 0.6, "mean": [1, 0], "var": [0.5, 0.5]}]})");
  CHECK(m.dim() == 2);
}

TEST_CASE("smoke run echoes the regime") {
  ExperimentConfig cfg;
  cfg.cells = {make_cell("AD")};
  cfg.replications = 1;
  cfg.boot_reps = 1;
  cfg.ns = {30};
  cfg.gammas = {0.5};
  cfg.ks_replications = 1;
  const MCReport r = run_experiment(cfg);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].regime == "B");
  CHECK(r.rows[0].replications == 1);
}

TEST_CASE("reports are reproducible across runs and worker counts") {
  ExperimentConfig cfg = small_config();
  const MCReport a = run_experiment(cfg);
  cfg.workers = 4;
  const MCReport b = run_experiment(cfg);
  CHECK(report_json(a) == report_json(b));
  CHECK(a.rows.size() == cfg.gammas.size() * cfg.ns.size() * cfg.cells.size());
  for (const CellReport& row : a.rows) {
    for (const auto& [name, m] : row.methods) {
      CHECK(m.coverage >= 0.0);
      CHECK(m.coverage <= 1.0);
    }
    CHECK(row.mc_bias_se > 0.0);
  }
}

TEST_CASE("shared resamples make the corrected analog match AD") {
  const MCReport r = run_experiment(small_config());
  for (double g : {1.0 / 3.0, 0.5})
    for (Index n : {40, 60}) {
      const CellReport& ad = r.find(g, "AD", n);
      const CellReport& tilde = r.find(g, "AD-BC/tilde-bc", n);
      CHECK(ad.methods.at("percentile").coverage == tilde.methods.at("percentile").coverage);
      CHECK(ad.methods.at("percentile").mean_length == tilde.methods.at("percentile").mean_length);
    }
}

TEST_CASE("report files") {
  const auto dir = std::filesystem::temp_directory_path() / "adboot_harness_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig cfg = small_config();
  cfg.save_draws = true;
  RunOptions opt;
  opt.out_dir = dir;
  const MCReport r = run_experiment(cfg, opt);
  CHECK(std::filesystem::exists(dir / "report.csv"));
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "draws"));
  std::ifstream csv(dir / "report.csv");
  std::string line;
  Index lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == Index(r.rows.size()) + 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("efficiency residuals") {
  // the oracle linear term compared with itself leaves nothing
  ExperimentConfig cfg;
  cfg.ns = {100, 400};
  cfg.replications = 40;
  cfg.c0 = 1.0;
  const auto s = efficiency_check(cfg, make_cell("AD-BC"), 1.0 / 3.0);
  REQUIRE(s.size() == 2);
  CHECK(s[1].residual_var < s[0].residual_var);

  // plug-in at gamma = 1/2: the residual mean sits near K(0)/c0
  cfg.ns = {2000};
  cfg.replications = 60;
  const auto p = efficiency_check(cfg, make_cell("AD"), 0.5);
  CHECK(p[0].residual_mean == doctest::Approx(0.3989).epsilon(0.25));
}

TEST_CASE("Kolmogorov-Smirnov distances") {
  CHECK(ks_distance({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(ks_distance({0.0, 0.0}, {1.0, 1.0}) == 1.0);
  CHECK(ks_distance({1.0, 2.0}, {2.0, 3.0}) == 0.5);
  CounterStream rng(1, 0);
  std::vector<double> z(10000);
  for (double& x : z) x = rng.next_normal();
  CHECK(ks_distance_normal(z, 0.0, 1.0) < 0.02);
  CHECK(ks_distance_normal(z, 1.0, 1.0) > 0.3);
  CHECK_THROWS_AS(ks_distance({}, {1.0}), std::invalid_argument);
}

TEST_CASE("seeds") {
  CHECK(replication_sample_seed(1, 100, 3) == replication_sample_seed(1, 100, 3));
  CHECK(replication_sample_seed(1, 100, 3) != replication_sample_seed(1, 100, 4));
  CHECK(replication_sample_seed(1, 100, 3) != replication_sample_seed(1, 200, 3));
  CHECK(replication_boot_seed(1, 100, 3, Scheme::Standard) != replication_boot_seed(1, 100, 3, Scheme::CrossFit2));
}
