#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "poicalib/config.hpp"

namespace poicalib {

inline constexpr std::string_view kToolVersion = "poicalib 1.0.0";

/// manifest.json in the output directory. Every artifact is listed with its
/// SHA-256; wall-clock timings live in timings.json so that the manifest of
/// two identical runs is byte-identical.
class RunManifest {
 public:
  static RunManifest load(const std::filesystem::path& out_dir);
  void save(const std::filesystem::path& out_dir) const;

  void record_artifact(const std::filesystem::path& out_dir, const std::string& name,
                       std::string_view stage);
  void mark_stage(std::string_view stage, bool ok);
  bool partial() const;

  /// Names of listed artifacts whose content no longer matches.
  std::vector<std::string> verify(const std::filesystem::path& out_dir) const;
  std::size_t artifact_count() const;

  nlohmann::json& doc() noexcept { return doc_; }
  const nlohmann::json& doc() const noexcept { return doc_; }

 private:
  nlohmann::json doc_ = nlohmann::json::object();
};

/// Stage runner over one output directory. Every stage reads its inputs from
/// files written by earlier stages, so each can be invoked on its own.
class Pipeline {
 public:
  explicit Pipeline(RunConfig config);

  void ingest();
  void split();
  void train(const std::string& model);
  void recommend(const std::string& model);
  void rerank(const std::string& model, const std::string& method);  // base | cp_h | cp_jsd
  void evaluate();
  void report();

  /// All stages for every configured model and method.
  void run();

  const RunConfig& config() const noexcept { return config_; }
  const std::filesystem::path& out_dir() const noexcept { return config_.out; }

 private:
  template <class F>
  void stage(std::string_view name, F&& body);

  RunConfig config_;
};

/// Validates, then runs every stage. Returns the process exit status.
int run_pipeline(const RunConfig& config);

}  // namespace poicalib
