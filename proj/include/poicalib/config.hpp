#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "poicalib/ingest.hpp"
#include "poicalib/synthetic.hpp"

namespace poicalib {

/// Effective settings of one run.
///
/// Sources, later wins: built-in defaults, the INI file, POICALIB_<SECTION>_<KEY>
/// environment variables, explicit overrides (CLI flags). Keys are
/// `section.key`; the full list with defaults is `RunConfig::defaults()`.
struct RunConfig {
  // [data]
  std::string dataset = "dataset";
  std::string data_format = "synthetic";  // an InputFormat name or "synthetic"
  std::filesystem::path data_path;
  SyntheticConfig synthetic;

  // [sample]
  bool sample = false;
  std::size_t sample_users = 1500;
  std::size_t min_interactions = 10;
  std::uint64_t sample_seed = 42;

  // [split]
  SplitFractions fractions;

  // [models]
  std::vector<std::string> models = {"bpr", "usg", "lore"};
  std::uint64_t model_seed = 7;

  // [bpr]
  std::vector<double> bpr_learning_rates = {0.01, 0.05};
  std::vector<std::size_t> bpr_dims = {32, 64};
  std::vector<std::size_t> bpr_batch_sizes = {256, 1024};
  std::size_t bpr_epochs = 200;
  double bpr_regularization = 0.01;
  std::size_t bpr_objective_every = 0;

  // [usg]
  std::vector<double> usg_betas = {0.05, 0.1, 0.2};
  std::size_t usg_neighbors = 50;

  // [lore]
  double lore_decay = 0.5;

  // [calibration]
  std::vector<std::string> methods = {"cp_h", "cp_jsd"};
  double lambda_step = 0.05;
  std::size_t base_size = 150;
  std::size_t final_size = 10;

  // [evaluate]
  std::size_t k = 10;
  std::size_t bonferroni_k = 0;  // 0: treatment columns x 4 group rows
  double alpha = 0.05;

  // [run]
  std::filesystem::path out = "results";
  int threads = 1;

  /// Every key with its default value, as text.
  static std::map<std::string, std::string> defaults();

  /// Builds from key/value settings on top of the defaults. Unknown keys
  /// and unparseable values are config errors. Relative data paths are
  /// resolved against `base_dir`.
  static RunConfig from_settings(const std::map<std::string, std::string>& settings,
                                 const std::filesystem::path& base_dir = {});

  /// Reads an INI file, then applies environment overrides and `overrides`.
  static RunConfig load(const std::filesystem::path& path,
                        const std::map<std::string, std::string>& overrides = {});

  /// Defaults + environment + overrides, no file.
  static RunConfig from_overrides(const std::map<std::string, std::string>& overrides);

  /// Throws a config error when fractions do not sum to 1, lists are empty,
  /// names are unknown or the input file is missing.
  void validate() const;

  /// Settings that determine results (everything except run.out and
  /// run.threads), one `key = value` per line in key order. Hashed into
  /// the manifest.
  std::string canonical() const;

  std::map<std::string, std::string> settings;  // effective, as text
};

/// POICALIB_<SECTION>_<KEY> variables mapped to `section.key`.
std::map<std::string, std::string> environment_overrides();

}  // namespace poicalib
