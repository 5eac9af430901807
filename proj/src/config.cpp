#include "adboot/harness.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace adboot {

namespace {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json parse_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed ") + what + ": " + e.what());
  }
}

Eigen::VectorXd to_vector(const json& j, const char* field) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument(std::string("'") + field + "' must be a nonempty array");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Index>(k)) = j[k].get<double>();
  return v;
}

DensityModel model_from(const json& j) {
  if (!j.contains("components")) throw std::invalid_argument("model needs a 'components' list");
  std::vector<MixtureComponent> comps;
  for (const auto& c : j.at("components"))
    comps.push_back({c.value("weight", 1.0), to_vector(c.at("mean"), "mean"), to_vector(c.at("var"), "var")});
  return DensityModel(std::move(comps));
}

double ratio_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_ratio(j.get<std::string>());
  throw std::invalid_argument("expected a number or a ratio string");
}

template <class T, class F>
std::vector<T> list_of(const json& j, F convert) {
  std::vector<T> out;
  if (j.is_array())
    for (const auto& e : j) out.push_back(convert(e));
  else
    out.push_back(convert(j));
  return out;
}

std::optional<Index> blocks_from(const json& cell) {
  if (!cell.contains("blocks")) return std::nullopt;
  const json& b = cell.at("blocks");
  if (b.is_string()) {
    if (b.get<std::string>() == "n") return kBlocksN;
    throw std::invalid_argument("blocks must be an integer or \"n\"");
  }
  return b.get<Index>();
}

}  // namespace

double parse_ratio(const std::string& text) {
  const auto slash = text.find('/');
  std::size_t used = 0;
  try {
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } else {
      const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
      std::size_t ua = 0, ub = 0;
      const double num = std::stod(a, &ua), den = std::stod(b, &ub);
      if (ua == a.size() && ub == b.size() && den != 0.0) return num / den;
    }
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("cannot read '" + text + "' as a number or ratio");
}

DensityModel parse_model(const std::string& json_text) { return model_from(parse_text(json_text, "model file")); }

DensityModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json j = parse_text(json_text, "experiment config");
  static const std::set<std::string> known{
      "model", "dim",     "kernel", "bandwidth", "cells",        "n",               "replications", "boot_reps",
      "alpha", "methods", "seed",   "workers",   "boot_h_ratio", "ks_replications", "save_draws"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw std::invalid_argument("unknown config key '" + item.key() + "'");
  ExperimentConfig cfg;
  const int dim = j.value("dim", 1);
  cfg.model = j.contains("model") ? model_from(j.at("model")) : DensityModel::standard_normal(dim);
  if (j.contains("dim") && cfg.model.dim() != dim) throw std::invalid_argument("'dim' does not match the model");
  if (j.contains("kernel")) cfg.kernel = parse_kernel_family(j.at("kernel").get<std::string>());
  if (j.contains("bandwidth")) {
    const json& b = j.at("bandwidth");
    cfg.c0 = b.value("c0", cfg.c0);
    if (b.contains("gamma")) cfg.gammas = list_of<double>(b.at("gamma"), ratio_from);
  }
  if (!j.contains("cells")) throw std::invalid_argument("experiment config needs a 'cells' list");
  for (const auto& c : j.at("cells")) {
    std::optional<double> gj;
    if (c.contains("gj_c")) gj = c.at("gj_c").get<double>();
    CellSpec cell = make_cell(c.at("family").get<std::string>(), parse_variant(c.value("variant", "natural")),
                              parse_scheme(c.value("scheme", "standard")), blocks_from(c), gj);
    cell.centering = parse_centering(c.value("centering", "estimate"));
    cfg.cells.push_back(std::move(cell));
  }
  if (j.contains("n")) cfg.ns = list_of<Index>(j.at("n"), [](const json& e) { return e.get<Index>(); });
  cfg.replications = j.value("replications", cfg.replications);
  cfg.boot_reps = j.value("boot_reps", cfg.boot_reps);
  if (j.contains("alpha")) cfg.alphas = list_of<double>(j.at("alpha"), ratio_from);
  if (j.contains("methods"))
    cfg.methods = list_of<IntervalMethod>(j.at("methods"),
                                          [](const json& e) { return parse_interval_method(e.get<std::string>()); });
  cfg.seed = j.value("seed", cfg.seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.boot_h_ratio = j.contains("boot_h_ratio") ? ratio_from(j.at("boot_h_ratio")) : cfg.boot_h_ratio;
  cfg.ks_replications = j.value("ks_replications", cfg.ks_replications);
  cfg.save_draws = j.value("save_draws", cfg.save_draws);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_file(path));
}

}  // namespace adboot
