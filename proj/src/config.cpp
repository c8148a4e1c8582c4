#include "poicalib/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <iostream>
#include <sstream>

#include "poicalib/calibration.hpp"
#include "poicalib/error.hpp"
#include "poicalib/io.hpp"

extern char** environ;

namespace poicalib {
namespace {

constexpr const char* kStage = "config";

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T value{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    throw config_error(kStage, "bad value for " + key + ": '" + text + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw config_error(kStage, "bad value for " + key);
  }
  return value;
}

template <class T>
std::vector<T> parse_numbers(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw config_error(kStage, "bad boolean for " + key + ": '" + text + "'");
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, std::string>) out += values[i];
    else if constexpr (std::is_floating_point_v<T>) out += format_double(values[i]);
    else out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> RunConfig::defaults() {
  const RunConfig d{};
  const SyntheticConfig& s = d.synthetic;
  return {
      {"data.name", d.dataset},
      {"data.format", d.data_format},
      {"data.path", ""},
      {"synthetic.users", std::to_string(s.users)},
      {"synthetic.items", std::to_string(s.items)},
      {"synthetic.zipf_exponent", format_double(s.zipf_exponent)},
      {"synthetic.clusters", std::to_string(s.clusters)},
      {"synthetic.min_checkins", std::to_string(s.min_checkins)},
      {"synthetic.max_checkins", std::to_string(s.max_checkins)},
      {"synthetic.seed", std::to_string(s.seed)},
      {"sample.enabled", d.sample ? "true" : "false"},
      {"sample.users", std::to_string(d.sample_users)},
      {"sample.min_interactions", std::to_string(d.min_interactions)},
      {"sample.seed", std::to_string(d.sample_seed)},
      {"split.train", format_double(d.fractions.train)},
      {"split.validation", format_double(d.fractions.validation)},
      {"split.test", format_double(d.fractions.test)},
      {"models.models", join(d.models)},
      {"models.seed", std::to_string(d.model_seed)},
      {"bpr.learning_rates", join(d.bpr_learning_rates)},
      {"bpr.dims", join(d.bpr_dims)},
      {"bpr.batch_sizes", join(d.bpr_batch_sizes)},
      {"bpr.epochs", std::to_string(d.bpr_epochs)},
      {"bpr.regularization", format_double(d.bpr_regularization)},
      {"bpr.objective_every", std::to_string(d.bpr_objective_every)},
      {"usg.betas", join(d.usg_betas)},
      {"usg.neighbors", std::to_string(d.usg_neighbors)},
      {"lore.decay", format_double(d.lore_decay)},
      {"calibration.methods", join(d.methods)},
      {"calibration.lambda_step", format_double(d.lambda_step)},
      {"calibration.base_size", std::to_string(d.base_size)},
      {"calibration.final_size", std::to_string(d.final_size)},
      {"evaluate.k", std::to_string(d.k)},
      {"evaluate.bonferroni_k", std::to_string(d.bonferroni_k)},
      {"evaluate.alpha", format_double(d.alpha)},
      {"run.out", d.out.string()},
      {"run.threads", std::to_string(d.threads)},
  };
}

RunConfig RunConfig::from_settings(const std::map<std::string, std::string>& settings,
                                   const std::filesystem::path& base_dir) {
  auto effective = defaults();
  for (const auto& [key, value] : settings) {
    if (!effective.contains(key)) throw config_error(kStage, "unknown setting '" + key + "'");
    effective[key] = trim(value);
  }
  const auto& e = effective;
  auto get = [&](const char* key) -> const std::string& { return e.at(key); };

  RunConfig c;
  c.settings = effective;
  c.dataset = get("data.name");
  c.data_format = get("data.format");
  if (!get("data.path").empty()) {
    std::filesystem::path p = get("data.path");
    c.data_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  c.synthetic.users = parse_number<std::size_t>("synthetic.users", get("synthetic.users"));
  c.synthetic.items = parse_number<std::size_t>("synthetic.items", get("synthetic.items"));
  c.synthetic.zipf_exponent =
      parse_number<double>("synthetic.zipf_exponent", get("synthetic.zipf_exponent"));
  c.synthetic.clusters = parse_number<std::size_t>("synthetic.clusters", get("synthetic.clusters"));
  c.synthetic.min_checkins =
      parse_number<std::size_t>("synthetic.min_checkins", get("synthetic.min_checkins"));
  c.synthetic.max_checkins =
      parse_number<std::size_t>("synthetic.max_checkins", get("synthetic.max_checkins"));
  c.synthetic.seed = parse_number<std::uint64_t>("synthetic.seed", get("synthetic.seed"));
  c.sample = parse_bool("sample.enabled", get("sample.enabled"));
  c.sample_users = parse_number<std::size_t>("sample.users", get("sample.users"));
  c.min_interactions =
      parse_number<std::size_t>("sample.min_interactions", get("sample.min_interactions"));
  c.sample_seed = parse_number<std::uint64_t>("sample.seed", get("sample.seed"));
  c.fractions.train = parse_number<double>("split.train", get("split.train"));
  c.fractions.validation = parse_number<double>("split.validation", get("split.validation"));
  c.fractions.test = parse_number<double>("split.test", get("split.test"));
  c.models = split_list(get("models.models"));
  c.model_seed = parse_number<std::uint64_t>("models.seed", get("models.seed"));
  c.bpr_learning_rates = parse_numbers<double>("bpr.learning_rates", get("bpr.learning_rates"));
  c.bpr_dims = parse_numbers<std::size_t>("bpr.dims", get("bpr.dims"));
  c.bpr_batch_sizes = parse_numbers<std::size_t>("bpr.batch_sizes", get("bpr.batch_sizes"));
  c.bpr_epochs = parse_number<std::size_t>("bpr.epochs", get("bpr.epochs"));
  c.bpr_regularization = parse_number<double>("bpr.regularization", get("bpr.regularization"));
  c.bpr_objective_every =
      parse_number<std::size_t>("bpr.objective_every", get("bpr.objective_every"));
  c.usg_betas = parse_numbers<double>("usg.betas", get("usg.betas"));
  c.usg_neighbors = parse_number<std::size_t>("usg.neighbors", get("usg.neighbors"));
  c.lore_decay = parse_number<double>("lore.decay", get("lore.decay"));
  c.methods = split_list(get("calibration.methods"));
  c.lambda_step = parse_number<double>("calibration.lambda_step", get("calibration.lambda_step"));
  c.base_size = parse_number<std::size_t>("calibration.base_size", get("calibration.base_size"));
  c.final_size = parse_number<std::size_t>("calibration.final_size", get("calibration.final_size"));
  c.k = parse_number<std::size_t>("evaluate.k", get("evaluate.k"));
  c.bonferroni_k = parse_number<std::size_t>("evaluate.bonferroni_k", get("evaluate.bonferroni_k"));
  c.alpha = parse_number<double>("evaluate.alpha", get("evaluate.alpha"));
  c.out = get("run.out");
  c.threads = parse_number<int>("run.threads", get("run.threads"));
  return c;
}

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> out;
  const auto known = RunConfig::defaults();
  constexpr std::string_view prefix = "POICALIB_";
  for (char** env = environ; env && *env; ++env) {
    std::string_view entry(*env);
    if (!entry.starts_with(prefix)) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    std::string name(entry.substr(prefix.size(), eq - prefix.size()));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    const auto us = name.find('_');
    if (us == std::string::npos) continue;
    const std::string key = name.substr(0, us) + "." + name.substr(us + 1);
    if (!known.contains(key)) {
      std::cerr << "warning: ignoring unknown environment override " << entry.substr(0, eq)
                << "\n";
      continue;
    }
    out[key] = std::string(entry.substr(eq + 1));
  }
  return out;
}

RunConfig RunConfig::load(const std::filesystem::path& path,
                          const std::map<std::string, std::string>& overrides) {
  if (!std::filesystem::exists(path))
    throw config_error(kStage, "config file not found: " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw config_error(kStage, e.what());
  }
  std::map<std::string, std::string> settings;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw config_error(kStage, "setting '" + section + "' outside a section");
    for (const auto& [key, value] : body) settings[section + "." + key] = value.data();
  }
  for (const auto& [k, v] : environment_overrides()) settings[k] = v;
  for (const auto& [k, v] : overrides) settings[k] = v;
  return from_settings(settings, path.parent_path());
}

RunConfig RunConfig::from_overrides(const std::map<std::string, std::string>& overrides) {
  auto settings = environment_overrides();
  for (const auto& [k, v] : overrides) settings[k] = v;
  return from_settings(settings);
}

void RunConfig::validate() const {
  const double total = fractions.train + fractions.validation + fractions.test;
  if (std::fabs(total - 1.0) > 1e-9)
    throw config_error(kStage, "split fractions must sum to 1 (got " + format_double(total) + ")");
  if (!(fractions.train > 0 && fractions.validation > 0 && fractions.test > 0))
    throw config_error(kStage, "split fractions must be positive");
  if (data_format != "synthetic") {
    parse_input_format(data_format);
    if (data_path.empty()) throw config_error(kStage, "data.path is required");
    if (!std::filesystem::exists(data_path))
      throw config_error(kStage, "input file not found: " + data_path.string());
  }
  if (models.empty()) throw config_error(kStage, "no models selected");
  for (const auto& m : models)
    if (m != "bpr" && m != "usg" && m != "lore")
      throw config_error(kStage, "unknown model '" + m + "'");
  for (const auto& m : methods) parse_calibration_method(m);
  if (bpr_learning_rates.empty() || bpr_dims.empty() || bpr_batch_sizes.empty() ||
      usg_betas.empty())
    throw config_error(kStage, "hyperparameter grids must not be empty");
  for (auto d : bpr_dims)
    if (d == 0) throw config_error(kStage, "bpr.dims must be positive");
  for (auto b : bpr_batch_sizes)
    if (b == 0) throw config_error(kStage, "bpr.batch_sizes must be positive");
  for (double b : usg_betas)
    if (!(b >= 0.0 && b <= 1.0)) throw config_error(kStage, "usg.betas must lie in [0, 1]");
  if (final_size == 0 || final_size > base_size)
    throw config_error(kStage, "calibration.final_size must be in [1, base_size]");
  CalibrationConfig::default_lambda_grid(lambda_step);
  if (k == 0) throw config_error(kStage, "evaluate.k must be positive");
  if (sample && sample_users == 0) throw config_error(kStage, "sample.users must be positive");
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [key, value] : settings) {
    if (key == "run.out" || key == "run.threads") continue;
    out += key + " = " + value + "\n";
  }
  return out;
}

}  // namespace poicalib
