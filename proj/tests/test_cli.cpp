#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = POICALIB_TEST_DATA;
const fs::path kWork = POICALIB_TEST_WORK;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Result {
  int status = -1;
  std::string err;
};

// Runs the CLI with the fixture config; stderr is captured.
Result cli(const std::string& args, bool with_config = true) {
  fs::create_directories(kWork);
  const fs::path err = kWork / "stderr.txt";
  std::string cmd = std::string("\"") + POICALIB_CLI + "\" ";
  if (with_config) cmd += "--config \"" + (kData / "smoke.ini").string() + "\" ";
  cmd += args + " > /dev/null 2> \"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err)};
}

fs::path fresh(const std::string& name) {
  const fs::path dir = kWork / name;
  fs::remove_all(dir);
  return dir;
}

std::string out(const fs::path& dir) { return "--out \"" + dir.string() + "\" "; }

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

}  // namespace

TEST_CASE("full run on the fixture") {
  const auto dir = fresh("full");
  auto r = cli(out(dir) + "run");
  REQUIRE(r.status == 0);
  auto m = manifest(dir);
  CHECK(m["artifacts"].size() >= 8);
  CHECK(m["partial"] == false);
  for (const auto& [stage, state] : m["stages"].items()) CHECK(state == "ok");
  for (const char* f : {"stats.json", "popularity.json", "lambda.json", "report_fixture.md",
                        "ratios_fixture.csv", "metrics_fixture_usg_cp_h.csv"})
    CHECK(fs::exists(dir / f));
  CHECK(m["tool"] == "poicalib 1.0.0");
  CHECK(m["config"]["data.name"] == "fixture");
  CHECK_FALSE(m["config"].contains("run.out"));
  CHECK(m["hyperparameters"].contains("bpr"));

  auto stats = json::parse(slurp(dir / "stats.json"));
  CHECK(stats["n_users"] == 50);
  const auto& rows = stats["rows"];
  CHECK(rows["train"].get<int>() + rows["validation"].get<int>() + rows["test"].get<int>() ==
        stats["unique_checkins"].get<int>());

  auto lambdas = json::parse(slurp(dir / "lambda.json"));
  for (const char* model : {"bpr", "usg", "lore"})
    for (const auto& [group, sel] : lambdas["fixture"][model]["cp_jsd"].items())
      CHECK(sel["lambda"] == 1.0);
  for (const auto& [group, sel] : lambdas["fixture"]["bpr"]["cp_h"].items())
    CHECK(sel["grid"].size() == 11);
}

TEST_CASE("two runs produce identical artifacts") {
  const auto a = fresh("det_a"), b = fresh("det_b");
  REQUIRE(cli(out(a) + "--threads 1 run").status == 0);
  REQUIRE(cli(out(b) + "--threads 3 run").status == 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    if (name == "timings.json") continue;
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b / name), name.string());
    ++compared;
  }
  CHECK(compared >= 30);
}

TEST_CASE("stages run one by one match the one-shot run") {
  const auto whole = fresh("whole"), steps = fresh("steps");
  REQUIRE(cli(out(whole) + "run --model lore").status == 0);
  const std::string o = out(steps) + "--set models.models=lore ";
  REQUIRE(cli(o + "ingest").status == 0);
  REQUIRE(cli(o + "split").status == 0);
  REQUIRE(cli(o + "train --model lore").status == 0);
  REQUIRE(cli(o + "recommend --model lore").status == 0);
  for (const char* m : {"base", "cp_h", "cp_jsd"})
    REQUIRE(cli(o + "rerank --model lore --method " + m).status == 0);
  REQUIRE(cli(o + "evaluate").status == 0);
  REQUIRE(cli(o + "report").status == 0);
  for (const char* f : {"metrics_fixture_lore_base.csv", "metrics_fixture_lore_cp_h.csv",
                        "reranked_lore_cp_jsd.tsv", "lambda.json", "report_fixture.md"})
    CHECK_MESSAGE(slurp(whole / f) == slurp(steps / f), f);
  CHECK(manifest(whole)["artifacts"] == manifest(steps)["artifacts"]);
}

TEST_CASE("rerunning a stage reproduces its artifacts") {
  const auto dir = fresh("rerun");
  REQUIRE(cli(out(dir) + "ingest").status == 0);
  REQUIRE(cli(out(dir) + "split").status == 0);
  const auto first = manifest(dir)["artifacts"];
  REQUIRE(cli(out(dir) + "split").status == 0);
  CHECK(manifest(dir)["artifacts"] == first);
}

TEST_CASE("fractions that do not sum to one are rejected") {
  const auto dir = fresh("fractions");
  auto r = cli(out(dir) +
               "--set split.train=0.7 --set split.validation=0.2 --set split.test=0.2 run");
  CHECK(r.status == 2);
  CHECK_FALSE(fs::exists(dir));
  CHECK(r.err.find("config") != std::string::npos);
}

TEST_CASE("bad settings are config errors") {
  CHECK(cli(out(fresh("bad1")) + "--set bpr.nope=1 run").status == 2);
  CHECK(cli(out(fresh("bad2")) + "--set bpr.epochs=many run").status == 2);
  CHECK(cli(out(fresh("bad3")) + "--set models.models=svd run").status == 2);
  CHECK(cli(out(fresh("bad4")) + "--set data.path=missing.tsv run").status == 2);
  CHECK(cli(out(fresh("bad5")) + "rerank --model bpr --method other").status != 0);
  CHECK(cli(out(fresh("bad6")) + "train").status == 2);
  CHECK(cli("--config /nonexistent.ini run", false).status == 2);
}

TEST_CASE("missing upstream artifacts are named") {
  const auto dir = fresh("missing");
  REQUIRE(cli(out(dir) + "ingest").status == 0);
  REQUIRE(cli(out(dir) + "split").status == 0);
  auto r = cli(out(dir) + "evaluate");
  CHECK(r.status == 3);
  CHECK(r.err.find("reranked_bpr_base.tsv") != std::string::npos);
  CHECK(manifest(dir)["stages"]["evaluate"] == "failed");
  CHECK(manifest(dir)["partial"] == true);

  auto r2 = cli(out(fresh("missing2")) + "split");
  CHECK(r2.status == 3);
  CHECK(r2.err.find("log.tsv") != std::string::npos);
}

TEST_CASE("tampered artifacts are detected") {
  const auto dir = fresh("tamper");
  REQUIRE(cli(out(dir) + "run --model bpr").status == 0);
  {
    std::ofstream f(dir / "train.tsv", std::ios::app);
    f << "x\ty\t0\t0\t0\n";
  }
  auto r = cli(out(dir) + "report");
  CHECK(r.status == 3);
  CHECK(r.err.find("artifact digest mismatch: train.tsv") != std::string::npos);
}

TEST_CASE("a model fitted on another split is refused") {
  const auto a = fresh("model_a"), b = fresh("model_b");
  REQUIRE(cli(out(a) + "--set models.models=lore ingest").status == 0);
  REQUIRE(cli(out(a) + "--set models.models=lore split").status == 0);
  REQUIRE(cli(out(a) + "train --model lore").status == 0);
  const std::string other =
      out(b) + "--set split.train=0.6 --set split.validation=0.2 --set split.test=0.2 ";
  REQUIRE(cli(other + "ingest").status == 0);
  REQUIRE(cli(other + "split").status == 0);
  fs::copy_file(a / "model_lore.json", b / "model_lore.json");
  auto r = cli(other + "recommend --model lore");
  CHECK(r.status == 3);
  CHECK(r.err.find("different train split") != std::string::npos);
}

TEST_CASE("single model report keeps base columns only") {
  const auto dir = fresh("single");
  REQUIRE(cli(out(dir) + "run --model usg --method base").status == 0);
  const auto report = slurp(dir / "report_fixture.md");
  CHECK(report.find("USG Base") != std::string::npos);
  CHECK(report.find("CP_H") == std::string::npos);
  CHECK(report.find("CP_JSD") == std::string::npos);
  CHECK_FALSE(fs::exists(dir / "lambda.json"));
}

TEST_CASE("configuration precedence") {
  const auto dir = fresh("env");
  ::setenv("POICALIB_BPR_EPOCHS", "3", 1);
  ::setenv("POICALIB_SPLIT_TRAIN", "0.6", 1);
  REQUIRE(cli(out(dir) + "--set split.validation=0.2 --set split.test=0.2 --set bpr.epochs=4 "
                         "--seed 9 ingest")
              .status == 0);
  ::unsetenv("POICALIB_BPR_EPOCHS");
  ::unsetenv("POICALIB_SPLIT_TRAIN");
  auto config = manifest(dir)["config"];
  CHECK(config["bpr.epochs"] == "4");
  CHECK(config["split.train"] == "0.6");
  CHECK(config["bpr.dims"] == "16");
  CHECK(config["lore.decay"] == "0.5");
  CHECK(config["models.seed"] == "9");
}

TEST_CASE("synthetic data through the cli") {
  const auto dir = fresh("synth");
  fs::create_directories(dir);
  REQUIRE(cli("--set synthetic.users=50 --set synthetic.items=300 synth --output \"" +
                  (dir / "log.tsv").string() + "\"",
              false)
              .status == 0);
  CHECK(slurp(dir / "log.tsv") == slurp(kData / "synthetic50.tsv"));
}

TEST_CASE("help lists defaults") {
  const fs::path help = kWork / "help.txt";
  fs::create_directories(kWork);
  const std::string cmd = std::string("\"") + POICALIB_CLI + "\" --help > \"" + help.string() + "\"";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const auto text = slurp(help);
  for (const char* key : {"bpr.epochs", "calibration.lambda_step", "split.train", "run.threads"})
    CHECK(text.find(key) != std::string::npos);
}
