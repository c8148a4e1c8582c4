#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poicalib/config.hpp"
#include "poicalib/error.hpp"
#include "poicalib/io.hpp"
#include "poicalib/pipeline.hpp"
#include "poicalib/synthetic.hpp"

using namespace poicalib;

namespace {

std::string defaults_footer() {
  std::string text = "Configuration keys (INI sections; env override POICALIB_<SECTION>_<KEY>):\n";
  for (const auto& [key, value] : RunConfig::defaults())
    text += "  " + key + " = " + value + "\n";
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"POI recommendation popularity-bias pipeline", "poicalib"};
  app.footer(defaults_footer());
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string config_path, out_dir, dataset, model, method;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--out", out_dir, "Output directory (run.out)");
  app.add_option("--threads", threads, "Thread cap for parallel kernels (run.threads)");
  app.add_option("--seed", seed, "Override every seed (sampling, model, synthetic)");
  app.add_option("--dataset", dataset, "Dataset name used in artifact names (data.name)");
  app.add_option("--set", sets, "Extra override, section.key=value (repeatable)");

  auto* ingest = app.add_subcommand("ingest", "Parse, deduplicate and optionally sample check-ins");
  auto* split = app.add_subcommand("split", "Temporal 65/15/20 split, statistics and popularity");
  auto* train = app.add_subcommand("train", "Fit a model with validation grid search");
  auto* recommend = app.add_subcommand("recommend", "Write top-150 base lists");
  auto* rerank = app.add_subcommand("rerank", "Cut or calibrate base lists to top-10");
  auto* evaluate = app.add_subcommand("evaluate", "Per-group metrics, tests and ratio tables");
  auto* report = app.add_subcommand("report", "Verify digests and write the markdown report");
  auto* run = app.add_subcommand("run", "All stages in order");
  auto* synth = app.add_subcommand("synth", "Write a synthetic check-in log as canonical TSV");

  for (auto* sub : {train, recommend, rerank})
    sub->add_option("--model", model, "bpr, usg or lore")
        ->required()
        ->check(CLI::IsMember({"bpr", "usg", "lore"}));
  for (auto* sub : {evaluate, report, run})
    sub->add_option("--model", model, "Restrict to one model (models.models)")
        ->check(CLI::IsMember({"bpr", "usg", "lore"}));
  rerank->add_option("--method", method, "base, cp_h or cp_jsd")
      ->required()
      ->check(CLI::IsMember({"base", "cp_h", "cp_jsd"}));
  for (auto* sub : {evaluate, report, run})
    sub->add_option("--method", method, "Restrict calibration to one method (base: none)")
        ->check(CLI::IsMember({"base", "cp_h", "cp_jsd"}));

  std::string synth_output;
  synth->add_option("--output", synth_output, "Destination TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::config);
  }

  try {
    std::map<std::string, std::string> overrides;
    if (!out_dir.empty()) overrides["run.out"] = out_dir;
    if (threads) overrides["run.threads"] = std::to_string(*threads);
    if (!dataset.empty()) overrides["data.name"] = dataset;
    if (seed) {
      for (const char* key : {"sample.seed", "models.seed", "synthetic.seed"})
        overrides[key] = std::to_string(*seed);
    }
    if (!model.empty() && !train->parsed() && !recommend->parsed() && !rerank->parsed())
      overrides["models.models"] = model;
    if (!method.empty() && !rerank->parsed())
      overrides["calibration.methods"] = method == "base" ? "" : method;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw config_error("config", "--set expects key=value: " + s);
      overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }

    const auto config = config_path.empty() ? RunConfig::from_overrides(overrides)
                                            : RunConfig::load(config_path, overrides);

    if (synth->parsed()) {
      std::ofstream out(synth_output);
      if (!out) throw data_error("synth", "cannot write " + synth_output);
      write_canonical(out, generate_synthetic(config.synthetic));
      return 0;
    }

    config.validate();
    Pipeline pipeline(config);
    if (ingest->parsed()) pipeline.ingest();
    if (split->parsed()) pipeline.split();
    if (train->parsed()) pipeline.train(model);
    if (recommend->parsed()) pipeline.recommend(model);
    if (rerank->parsed()) pipeline.rerank(model, method);
    if (evaluate->parsed()) pipeline.evaluate();
    if (report->parsed()) pipeline.report();
    if (run->parsed()) pipeline.run();
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::data);
  }
}
