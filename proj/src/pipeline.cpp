#include "poicalib/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "poicalib/batch.hpp"
#include "poicalib/calibration.hpp"
#include "poicalib/digest.hpp"
#include "poicalib/error.hpp"
#include "poicalib/io.hpp"
#include "poicalib/metrics.hpp"
#include "poicalib/model_io.hpp"
#include "poicalib/popularity.hpp"

namespace poicalib {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 3> kVariants = {"base", "cp_h", "cp_jsd"};

json read_json(const fs::path& path, const std::string& stage) {
  require_file(path, stage);
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw data_error(stage, "cannot parse " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

InteractionLog read_split(const fs::path& path, const std::string& stage) {
  require_file(path, stage);
  return read_log(path, InputFormat::canonical_tsv).log;
}

void write_log(const fs::path& path, const InteractionLog& log) {
  std::ostringstream out;
  write_canonical(out, log);
  write_text(path, out.str());
}

void write_lists(const fs::path& path, const std::vector<ScoredList>& lists, bool with_origin) {
  std::ostringstream out;
  write_scored_lists(out, lists, with_origin);
  write_text(path, out.str());
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

// user id -> distinct item ids, in first-visit order
std::map<std::string, std::vector<std::string>> items_by_user(const InteractionLog& log) {
  std::map<std::string, std::vector<std::string>> out;
  std::map<std::string, std::set<std::string>> seen;
  for (const auto& row : log.interactions())
    if (seen[row.user_id].insert(row.item_id).second) out[row.user_id].push_back(row.item_id);
  return out;
}

std::string upper(std::string_view name) {
  if (name == "cp_h") return "CP_H";
  if (name == "cp_jsd") return "CP_JSD";
  std::string s(name);
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string display_variant(std::string_view variant) {
  return variant == "base" ? "Base" : upper(variant);
}

std::string na_or(const std::optional<double>& v, int decimals) {
  return v ? format_fixed(*v, decimals) : "n/a";
}

std::string p_text(const std::optional<double>& p) {
  if (!p) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", *p);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct CsvRow {
  std::string mean, delta, significant;
};

// (group, metric) -> row
std::map<std::pair<std::string, std::string>, CsvRow> read_metrics_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("report", "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::map<std::pair<std::string, std::string>, CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() < 8) throw data_error("report", "malformed row in " + path.string());
    rows[{f[0], f[1]}] = CsvRow{f[2], f[4], f[7]};
  }
  return rows;
}

std::string metric_label(std::string_view m) {
  if (m == "ndcg") return "nDCG";
  if (m == "arp") return "ARP";
  if (m == "poplift") return "PopLift";
  return "JSD";
}

std::string delta_cell(const CsvRow& row) {
  if (row.delta == "n/a") return "n/a";
  std::string s = row.delta.front() == '-' ? row.delta : "+" + row.delta;
  s += "%";
  if (row.significant == "1") s += "**";
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

RunManifest RunManifest::load(const fs::path& out_dir) {
  RunManifest m;
  const auto path = out_dir / "manifest.json";
  if (fs::exists(path)) m.doc_ = read_json(path, "manifest");
  return m;
}

void RunManifest::save(const fs::path& out_dir) const { write_json(out_dir / "manifest.json", doc_); }

void RunManifest::record_artifact(const fs::path& out_dir, const std::string& name,
                                  std::string_view stage) {
  doc_["artifacts"][name] = {{"sha256", sha256_file(out_dir / name)}, {"stage", stage}};
}

void RunManifest::mark_stage(std::string_view stage, bool ok) {
  doc_["stages"][std::string(stage)] = ok ? "ok" : "failed";
  doc_["partial"] = partial();
}

bool RunManifest::partial() const {
  if (!doc_.contains("stages")) return false;
  for (const auto& [name, status] : doc_["stages"].items())
    if (status != "ok") return true;
  return false;
}

std::vector<std::string> RunManifest::verify(const fs::path& out_dir) const {
  std::vector<std::string> bad;
  if (!doc_.contains("artifacts")) return bad;
  for (const auto& [name, entry] : doc_["artifacts"].items()) {
    const auto path = out_dir / name;
    if (!fs::exists(path) || sha256_file(path) != entry.at("sha256").get<std::string>())
      bad.push_back(name);
  }
  return bad;
}

std::size_t RunManifest::artifact_count() const {
  return doc_.contains("artifacts") ? doc_["artifacts"].size() : 0;
}

// ---------------------------------------------------------------------------

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {
  set_thread_count(config_.threads);
}

template <class F>
void Pipeline::stage(std::string_view name, F&& body) {
  const std::string label(name);
  const auto base_stage = label.substr(0, label.find(':'));
  fs::create_directories(out_dir());
  auto manifest = RunManifest::load(out_dir());
  auto& doc = manifest.doc();
  doc["tool"] = kToolVersion;
  doc["config_digest"] = sha256_hex(config_.canonical());
  json settings = json::object();
  for (const auto& [k, v] : config_.settings)
    if (k != "run.out" && k != "run.threads") settings[k] = v;
  doc["config"] = settings;

  const auto start = std::chrono::steady_clock::now();
  try {
    body(manifest);
  } catch (const Error&) {
    manifest.mark_stage(label, false);
    manifest.save(out_dir());
    throw;
  } catch (const std::exception& e) {
    manifest.mark_stage(label, false);
    manifest.save(out_dir());
    if (base_stage == "train") throw training_error(label, e.what());
    if (base_stage == "evaluate") throw evaluation_error(label, e.what());
    throw data_error(label, e.what());
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  const auto timings_path = out_dir() / "timings.json";
  json timings = fs::exists(timings_path) ? read_json(timings_path, label) : json::object();
  timings[label] = elapsed.count();
  write_json(timings_path, timings);

  manifest.mark_stage(label, true);
  manifest.save(out_dir());
}

void Pipeline::ingest() {
  stage("ingest", [&](RunManifest& manifest) {
    ParseResult parsed;
    json inputs = json::object();
    std::string format = config_.data_format;
    if (format == "synthetic") {
      parsed.log = generate_synthetic(config_.synthetic);
    } else {
      require_file(config_.data_path, "ingest");
      parsed = read_log(config_.data_path, parse_input_format(format));
      inputs[config_.data_path.filename().string()] = sha256_file(config_.data_path);
    }
    const auto raw_rows = parsed.log.size();
    auto log = deduplicate(parsed.log);
    const auto unique_rows = log.size();
    if (config_.sample)
      log = sample_users(log, config_.sample_users, config_.min_interactions, config_.sample_seed);

    write_log(out_dir() / "log.tsv", log);
    if (format == "synthetic") inputs["synthetic"] = sha256_file(out_dir() / "log.tsv");

    json info = {{"format", format},
                 {"raw_rows", raw_rows},
                 {"duplicates_removed", raw_rows - unique_rows},
                 {"dropped", {{"malformed", parsed.dropped.malformed},
                              {"bad_timestamp", parsed.dropped.bad_timestamp},
                              {"bad_coordinates", parsed.dropped.bad_coordinates}}},
                 {"n_users", log.n_users()},
                 {"n_items", log.n_items()},
                 {"checkins", log.size()},
                 {"sparsity", round_to(compute_sparsity(log), 6)}};
    write_json(out_dir() / "ingest.json", info);

    manifest.doc()["inputs"] = inputs;
    manifest.record_artifact(out_dir(), "log.tsv", "ingest");
    manifest.record_artifact(out_dir(), "ingest.json", "ingest");
  });
}

void Pipeline::split() {
  stage("split", [&](RunManifest& manifest) {
    const auto log = read_split(out_dir() / "log.tsv", "split");
    const auto parts = temporal_split(log, config_.fractions);
    write_log(out_dir() / "train.tsv", parts.train);
    write_log(out_dir() / "valid.tsv", parts.validation);
    write_log(out_dir() / "test.tsv", parts.test);

    const auto index = PopularityIndex::build(parts.train);
    write_text(out_dir() / "popularity.json", index.to_json());

    std::set<std::string> items;
    for (const auto* part : {&parts.train, &parts.validation, &parts.test})
      for (const auto& [id, _] : part->item_coords()) items.insert(id);
    const auto checkins = parts.train.size() + parts.validation.size() + parts.test.size();
    const auto users = parts.train.n_users();

    json dropped_rows = json::object();
    const auto ingest_info = out_dir() / "ingest.json";
    if (fs::exists(ingest_info)) dropped_rows = read_json(ingest_info, "split").at("dropped");

    json stats = {{"n_users", users},
                  {"n_items", items.size()},
                  {"unique_checkins", checkins},
                  {"sparsity", round_to(compute_sparsity(users, items.size(), checkins), 6)},
                  {"dropped_rows", dropped_rows},
                  {"dropped_users", parts.dropped_users},
                  {"rows", {{"train", parts.train.size()},
                            {"validation", parts.validation.size()},
                            {"test", parts.test.size()}}}};
    write_json(out_dir() / "stats.json", stats);

    for (const char* name : {"train.tsv", "valid.tsv", "test.tsv", "popularity.json", "stats.json"})
      manifest.record_artifact(out_dir(), name, "split");
  });
}

namespace {

double validation_ndcg(const Recommender& model,
                       const std::map<std::string, std::vector<std::string>>& relevant,
                       std::size_t k) {
  const auto lists = recommend_all(model, k);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& list : lists) {
    auto it = relevant.find(list.user_id);
    if (it == relevant.end()) continue;
    const auto items = list.item_ids();
    sum += ndcg_at_k(items, it->second, k);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace

void Pipeline::train(const std::string& model_name) {
  stage("train:" + model_name, [&](RunManifest& manifest) {
    const auto train_path = out_dir() / "train.tsv";
    const auto train_log = read_split(train_path, "train");
    const auto valid = items_by_user(read_split(out_dir() / "valid.tsv", "train"));
    const auto data = TrainData::from_log(train_log);
    const auto digest = sha256_file(train_path);

    std::unique_ptr<Recommender> best;
    double best_ndcg = -1.0;
    json table = json::array();
    auto consider = [&](std::unique_ptr<Recommender> candidate) {
      const double score = validation_ndcg(*candidate, valid, config_.k);
      table.push_back({{"hyperparameters", hyperparameters(*candidate)}, {"validation_ndcg", score}});
      if (score > best_ndcg) {
        best_ndcg = score;
        best = std::move(candidate);
      }
    };

    if (model_name == "bpr") {
      for (double lr : config_.bpr_learning_rates)
        for (auto dim : config_.bpr_dims)
          for (auto batch : config_.bpr_batch_sizes) {
            BprConfig c;
            c.learning_rate = lr;
            c.dim = dim;
            c.batch_size = batch;
            c.epochs = config_.bpr_epochs;
            c.regularization = config_.bpr_regularization;
            c.objective_every = config_.bpr_objective_every;
            consider(std::make_unique<BprModel>(BprModel::fit(data, c, config_.model_seed)));
          }
    } else if (model_name == "usg") {
      for (double beta : config_.usg_betas) {
        UsgConfig c;
        c.beta = beta;
        c.neighbors = config_.usg_neighbors;
        consider(std::make_unique<UsgModel>(UsgModel::fit(data, c)));
      }
    } else if (model_name == "lore") {
      LoreConfig c;
      c.decay = config_.lore_decay;
      consider(std::make_unique<LoreModel>(LoreModel::fit(data, c)));
    } else {
      throw config_error("train", "unknown model '" + model_name + "'");
    }

    auto doc = save_model(*best, digest);
    doc["selection"] = table;
    const auto file = "model_" + model_name + ".json";
    write_json(out_dir() / file, doc);
    manifest.doc()["hyperparameters"][model_name] = hyperparameters(*best);
    manifest.record_artifact(out_dir(), file, "train");
  });
}

void Pipeline::recommend(const std::string& model_name) {
  stage("recommend:" + model_name, [&](RunManifest& manifest) {
    const auto train_path = out_dir() / "train.tsv";
    const auto doc = read_json(out_dir() / ("model_" + model_name + ".json"), "recommend");
    const auto data = TrainData::from_log(read_split(train_path, "recommend"));
    const auto valid = read_split(out_dir() / "valid.tsv", "recommend");
    const auto model = load_model(doc, data, sha256_file(train_path));

    const auto excluded = data->project(valid);
    const auto test_lists = recommend_all(*model, config_.base_size, &excluded);
    const auto valid_lists = recommend_all(*model, config_.base_size);

    const auto test_file = "recs_" + model_name + ".tsv";
    const auto valid_file = "recs_" + model_name + "_valid.tsv";
    write_lists(out_dir() / test_file, test_lists, false);
    write_lists(out_dir() / valid_file, valid_lists, false);
    manifest.record_artifact(out_dir(), test_file, "recommend");
    manifest.record_artifact(out_dir(), valid_file, "recommend");
  });
}

void Pipeline::rerank(const std::string& model_name, const std::string& method) {
  if (method != "base") parse_calibration_method(method);
  stage("rerank:" + model_name + ":" + method, [&](RunManifest& manifest) {
    const auto out_file = "reranked_" + model_name + "_" + method + ".tsv";
    auto test_lists = read_scored_lists([&] {
      const auto p = out_dir() / ("recs_" + model_name + ".tsv");
      require_file(p, "rerank");
      return p;
    }());

    if (method == "base") {
      for (auto& list : test_lists) {
        if (list.entries.size() > config_.final_size) list.entries.resize(config_.final_size);
        list.origin = "base";
      }
      write_lists(out_dir() / out_file, test_lists, true);
      manifest.record_artifact(out_dir(), out_file, "rerank");
      return;
    }

    const auto calibration = parse_calibration_method(method);
    const auto valid_path = out_dir() / ("recs_" + model_name + "_valid.tsv");
    require_file(valid_path, "rerank");
    const auto valid_lists = read_scored_lists(valid_path);
    const auto train = read_split(out_dir() / "train.tsv", "rerank");
    const auto relevant = items_by_user(read_split(out_dir() / "valid.tsv", "rerank"));
    const auto index = PopularityIndex::build(train);
    const auto profiles = profile_distributions(train, index);
    auto profile_of = [&](const std::string& user) {
      return profiles[index.users().at(user, "user")];
    };

    const auto grid = CalibrationConfig::default_lambda_grid(config_.lambda_step);
    std::map<UserGroup, double> lambdas;
    json group_doc = json::object();
    for (auto group : kUserGroups) {
      std::vector<ValidationCase> cases;
      for (const auto& list : valid_lists) {
        if (index.user_group(list.user_id) != group) continue;
        auto it = relevant.find(list.user_id);
        cases.push_back({&list, profile_of(list.user_id),
                         it == relevant.end() ? std::vector<std::string>{} : it->second});
      }
      if (cases.empty()) continue;
      const auto selection = select_lambda(calibration, grid, cases, index, config_.final_size);
      lambdas[group] = selection.lambda;
      json table = json::array();
      for (const auto& row : selection.table)
        table.push_back({{"lambda", row.lambda},
                         {"accuracy", row.accuracy},
                         {"calibration", row.calibration},
                         {"harmonic", row.harmonic}});
      group_doc[std::string(to_string(group))] = {{"lambda", selection.lambda}, {"grid", table}};
      manifest.doc()["lambdas"][model_name][method][std::string(to_string(group))] =
          selection.lambda;
    }

    std::vector<PopularityDistribution> targets;
    std::vector<double> list_lambdas;
    for (const auto& list : test_lists) {
      targets.push_back(profile_of(list.user_id));
      list_lambdas.push_back(lambdas.at(index.user_group(list.user_id)));
    }
    const auto reranked =
        rerank_all(test_lists, targets, list_lambdas, config_.final_size, index, method);
    write_lists(out_dir() / out_file, reranked, true);

    const auto lambda_path = out_dir() / "lambda.json";
    json lambda_doc = fs::exists(lambda_path) ? read_json(lambda_path, "rerank") : json::object();
    lambda_doc[config_.dataset][model_name][method] = group_doc;
    write_json(lambda_path, lambda_doc);

    manifest.record_artifact(out_dir(), out_file, "rerank");
    manifest.record_artifact(out_dir(), "lambda.json", "rerank");
  });
}

void Pipeline::evaluate() {
  stage("evaluate", [&](RunManifest& manifest) {
    struct Column {
      std::string model, variant;
      std::vector<ScoredList> lists;
      std::vector<UserMetrics> metrics;
      const Column* baseline = nullptr;
    };
    std::vector<std::string> variants = {"base"};
    for (const auto& m : config_.methods) variants.push_back(m);

    std::vector<Column> columns;
    for (const auto& model : config_.models)
      for (const auto& variant : variants) {
        const auto path = out_dir() / ("reranked_" + model + "_" + variant + ".tsv");
        require_file(path, "evaluate");
        columns.push_back({model, variant, read_scored_lists(path), {}, nullptr});
      }

    const auto train = read_split(out_dir() / "train.tsv", "evaluate");
    const auto test = items_by_user(read_split(out_dir() / "test.tsv", "evaluate"));
    const auto index = PopularityIndex::build(train);

    std::size_t without_test = 0;
    for (auto& col : columns) {
      std::vector<EvaluationCase> cases;
      for (const auto& list : col.lists) {
        auto it = test.find(list.user_id);
        cases.push_back({list.user_id, list.item_ids(),
                         it == test.end() ? std::vector<std::string>{} : it->second});
      }
      col.metrics = evaluate_users(cases, train, index, config_.k);
      without_test = cases.size() - col.metrics.size();
    }

    auto find = [&](std::string_view model, std::string_view variant) -> const Column* {
      for (const auto& c : columns)
        if (c.model == model && c.variant == variant) return &c;
      return nullptr;
    };
    std::size_t treatments = 0;
    json comparisons = json::object();
    for (auto& col : columns) {
      if (col.variant != "base")
        col.baseline = find(col.model, "base");
      else if (col.model != "bpr")
        col.baseline = find("bpr", "base");
      if (col.baseline) {
        ++treatments;
        comparisons[col.model + "_" + col.variant] =
            col.baseline->model + "_" + col.baseline->variant;
      }
    }
    const std::size_t k_family =
        config_.bonferroni_k > 0 ? config_.bonferroni_k
                                 : std::max<std::size_t>(1, treatments) * kGroupRows.size();

    for (const auto& col : columns) {
      const auto summary = summarize(col.metrics, col.baseline ? &col.baseline->metrics : nullptr,
                                     k_family, config_.alpha);
      std::ostringstream csv;
      csv << "group,metric,mean,n_users,delta_pct,p_raw,p_adjusted,significant,baseline\n";
      const std::string baseline =
          col.baseline ? col.baseline->model + "_" + col.baseline->variant : "";
      for (const auto& row : summary)
        csv << row.group << ',' << row.metric << ',' << format_fixed(row.mean, 6) << ','
            << row.n_users << ',' << na_or(row.delta_pct, 4) << ',' << p_text(row.p_raw) << ','
            << p_text(row.p_adjusted) << ',' << (row.significant ? 1 : 0) << ',' << baseline
            << '\n';
      const auto file = "metrics_" + config_.dataset + "_" + col.model + "_" + col.variant + ".csv";
      write_text(out_dir() / file, csv.str());
      manifest.record_artifact(out_dir(), file, "evaluate");
    }

    // Item group ratios per user group: profile plus every evaluated column.
    const auto profiles = items_by_user(train);
    auto in_row = [&](const std::string& user, std::string_view row) {
      return row == "All" || to_string(index.user_group(user)) == row;
    };
    std::ostringstream csv, dat;
    csv << "group,source,T,M,H\n";
    dat << "# group source T M H\n";
    auto emit = [&](std::string_view row, const std::string& source,
                    const std::vector<std::vector<std::string>>& lists) {
      if (lists.empty()) return;
      const auto s = item_group_ratios(lists, index);
      const auto t = format_fixed(s.tail, 6), m = format_fixed(s.mid, 6),
                 h = format_fixed(s.head, 6);
      csv << row << ',' << source << ',' << t << ',' << m << ',' << h << '\n';
      dat << row << ' ' << source << ' ' << t << ' ' << m << ' ' << h << '\n';
    };
    for (auto row : kGroupRows) {
      std::vector<std::vector<std::string>> lists;
      for (const auto& [user, items] : profiles)
        if (in_row(user, row)) lists.push_back(items);
      emit(row, "profile", lists);
      for (const auto& col : columns) {
        lists.clear();
        for (const auto& list : col.lists)
          if (in_row(list.user_id, row)) lists.push_back(list.item_ids());
        emit(row, col.model + "_" + col.variant, lists);
      }
    }
    const auto ratios = "ratios_" + config_.dataset + ".csv";
    const auto plot = "ratios_" + config_.dataset + ".dat";
    write_text(out_dir() / ratios, csv.str());
    write_text(out_dir() / plot, dat.str());
    manifest.record_artifact(out_dir(), ratios, "evaluate");
    manifest.record_artifact(out_dir(), plot, "evaluate");

    manifest.doc()["evaluation"] = {{"bonferroni_k", k_family},
                                    {"alpha", config_.alpha},
                                    {"k", config_.k},
                                    {"users_without_test", without_test},
                                    {"comparisons", comparisons}};
  });
}

void Pipeline::report() {
  stage("report", [&](RunManifest& manifest) {
    if (!fs::exists(out_dir() / "manifest.json"))
      throw data_error("report", "missing upstream artifact: expected " +
                                     (out_dir() / "manifest.json").string());
    const auto tampered = manifest.verify(out_dir());
    if (!tampered.empty()) {
      std::string names;
      for (const auto& n : tampered) names += (names.empty() ? "" : ", ") + n;
      throw data_error("report", "artifact digest mismatch: " + names);
    }

    // model -> variant -> rows, in configured order
    const std::string prefix = "metrics_" + config_.dataset + "_";
    std::vector<std::string> models;
    std::map<std::string, std::map<std::string, std::map<std::pair<std::string, std::string>, CsvRow>>>
        tables;
    for (const auto& model : config_.models)
      for (auto variant : kVariants) {
        const auto name = prefix + model + "_" + std::string(variant) + ".csv";
        if (!manifest.doc()["artifacts"].contains(name)) continue;
        if (tables.find(model) == tables.end()) models.push_back(model);
        tables[model][std::string(variant)] = read_metrics_csv(out_dir() / name);
      }
    if (models.empty())
      throw data_error("report", "missing upstream artifact: expected " +
                                     (out_dir() / (prefix + "<model>_<variant>.csv")).string());

    const auto& anchor = models.front();
    std::ostringstream md;
    md << "# Results: " << config_.dataset << "\n\n";
    md << "## Accuracy and popularity bias relative to " << upper(anchor) << "\n\n";
    md << "Base values are absolute; other columns are relative changes. ** marks p < "
       << format_double(config_.alpha) << " after Bonferroni correction.\n\n";

    std::vector<std::pair<std::string, std::string>> cols;  // model, variant
    cols.emplace_back(anchor, "base");
    for (std::size_t m = 1; m < models.size(); ++m)
      if (tables[models[m]].count("base")) cols.emplace_back(models[m], "base");
    for (const auto& [variant, _] : tables[anchor])
      if (variant != "base") cols.emplace_back(anchor, variant);

    md << "| Group | Metric |";
    for (const auto& [model, variant] : cols)
      md << ' ' << upper(model) << ' ' << display_variant(variant)
         << (model == anchor && variant == "base" ? "" : " Δ%") << " |";
    md << "\n|---|---|";
    for (std::size_t c = 0; c < cols.size(); ++c) md << "---|";
    md << '\n';
    for (auto group : kGroupRows)
      for (auto metric : kMetricNames) {
        const std::pair<std::string, std::string> key{std::string(group), std::string(metric)};
        md << "| " << group << " | " << metric_label(metric) << " |";
        for (const auto& [model, variant] : cols) {
          const auto& rows = tables[model][variant];
          auto it = rows.find(key);
          std::string cell = "n/a";
          if (it != rows.end()) {
            if (model == anchor && variant == "base") {
              cell = it->second.mean;
            } else if (model != anchor) {
              // cross-model: relative to the anchor base
              const auto& base_rows = tables[anchor]["base"];
              auto b = base_rows.find(key);
              if (b != base_rows.end()) {
                const auto d = delta_percent(std::stod(b->second.mean), std::stod(it->second.mean));
                CsvRow row = it->second;
                row.delta = d ? format_fixed(*d, 4) : "n/a";
                cell = delta_cell(row);
              }
            } else {
              cell = delta_cell(it->second);
            }
          }
          md << ' ' << cell << " |";
        }
        md << '\n';
      }

    for (std::size_t m = 1; m < models.size(); ++m) {
      const auto& model = models[m];
      md << "\n## " << upper(model) << " with calibrated re-ranking\n\n";
      md << "| Group | Metric |";
      for (const auto& [variant, _] : tables[model]) md << ' ' << display_variant(variant) << " |";
      md << "\n|---|---|";
      for (std::size_t c = 0; c < tables[model].size(); ++c) md << "---|";
      md << '\n';
      for (auto group : kGroupRows)
        for (auto metric : kMetricNames) {
          const std::pair<std::string, std::string> key{std::string(group), std::string(metric)};
          md << "| " << group << " | " << metric_label(metric) << " |";
          for (const auto& [variant, rows] : tables[model]) {
            auto it = rows.find(key);
            std::string cell = "n/a";
            if (it != rows.end()) {
              cell = it->second.mean;
              if (variant != "base") cell += " (" + delta_cell(it->second) + ")";
            }
            md << ' ' << cell << " |";
          }
          md << '\n';
        }
    }

    const auto ratios = out_dir() / ("ratios_" + config_.dataset + ".csv");
    if (fs::exists(ratios)) {
      md << "\n## Item group ratios (T / M / H)\n\n| Group | Source | T | M | H |\n|---|---|---|---|---|\n";
      std::ifstream in(ratios);
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        const auto f = split_csv(line);
        if (f.size() != 5) continue;
        md << "| " << f[0] << " | " << f[1] << " | " << f[2] << " | " << f[3] << " | " << f[4]
           << " |\n";
      }
    }

    const auto file = "report_" + config_.dataset + ".md";
    write_text(out_dir() / file, md.str());
    manifest.record_artifact(out_dir(), file, "report");
  });
}

void Pipeline::run() {
  ingest();
  split();
  for (const auto& model : config_.models) {
    train(model);
    recommend(model);
    rerank(model, "base");
    for (const auto& method : config_.methods) rerank(model, method);
  }
  evaluate();
  report();
}

int run_pipeline(const RunConfig& config) {
  try {
    config.validate();
    Pipeline(config).run();
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  }
}

}  // namespace poicalib
