/*
 * End-to-end tests of the rfsense binary: the synth -> detect -> eval file
 * pipeline, exit codes, and manifests.
 */
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& stdout_to = "") {
  std::string cmd = std::string(RFSENSE_CLI_PATH) + " " + args;
  cmd += stdout_to.empty() ? " >/dev/null" : (" >" + stdout_to);
  cmd += " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return status < 0 ? status : WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
  std::string str(const char* child = "") const { return (path / child).string(); }
};

// Small but complete scenario: 3 pairs, 4 subcarriers, 3 minutes.
const char* kSmallSynth =
    "synth --preset hallway --pairs 3 --subcarriers 4 --duration 180 --crossings 4 "
    "--seed 5 --out ";

}  // namespace

TEST_CASE("synth -> detect -> eval composes through files") {
  ScratchDir dir("rfsense_cli_flow");
  REQUIRE(run(kSmallSynth + dir.str()) == 0);
  CHECK(fs::exists(dir.path / "trace.csv"));
  CHECK(fs::exists(dir.path / "trace.meta.json"));
  CHECK(fs::exists(dir.path / "ground_truth.csv"));
  CHECK(fs::exists(dir.path / "tx_schedule.csv"));
  CHECK(fs::exists(dir.path / "manifest.json"));

  REQUIRE(run("detect --trace " + dir.str("trace.csv") + " -o " + dir.str("det.jsonl")) ==
          0);
  CHECK(fs::exists(dir.path / "det.manifest.json"));

  REQUIRE(run("eval --detections " + dir.str("det.jsonl") + " --truth " +
                  dir.str("ground_truth.csv") + " --trace " + dir.str("trace.csv") +
                  " --json " + dir.str("metrics.json"),
              dir.str("eval.txt")) == 0);

  auto metrics = nlohmann::json::parse(slurp(dir.path / "metrics.json"));
  CHECK(metrics["md_rate_pct"].get<double>() == 0.0);
  CHECK(metrics["fa_rate_pct"].get<double>() == 0.0);
  CHECK(metrics["n_truth"].get<int>() == 4);

  std::string table = slurp(dir.path / "eval.txt");
  CHECK(table.find("FA%") != std::string::npos);
  CHECK(table.find("Mean") != std::string::npos);
}

TEST_CASE("hallway and house presets record the published window defaults") {
  ScratchDir dir("rfsense_cli_presets");
  REQUIRE(run("synth --preset hallway --seed 1 --duration 60 --crossings 0 --out " +
              dir.str("h")) == 0);
  auto hallway = nlohmann::json::parse(slurp(dir.path / "h" / "manifest.json"));
  CHECK(hallway["detector_defaults"]["short_window_s"].get<double>() == 4.0);
  CHECK(hallway["detector_defaults"]["long_window_s"].get<double>() == 40.0);
  CHECK(hallway["detector_defaults"]["merge_delta_s"].get<double>() == 4.0);
  CHECK(hallway["scenario"]["meta"]["nominal_rate_hz"].get<double>() == 12.0);
  CHECK(hallway["scenario"]["meta"]["num_pairs"].get<int>() == 9);
  CHECK(hallway["scenario"]["meta"]["num_subcarriers"].get<int>() == 30);
  CHECK(hallway["scenario"]["noise_std_db"].get<double>() == 0.67);

  REQUIRE(run("synth --preset house --seed 1 --duration 60 --crossings 0 --out " +
              dir.str("r")) == 0);
  auto house = nlohmann::json::parse(slurp(dir.path / "r" / "manifest.json"));
  CHECK(house["detector_defaults"]["short_window_s"].get<double>() == 2.0);
  CHECK(house["detector_defaults"]["long_window_s"].get<double>() == 20.0);
  CHECK(house["detector_defaults"]["merge_delta_s"].get<double>() == 4.0);
}

TEST_CASE("same seed twice gives byte-identical outputs") {
  ScratchDir dir("rfsense_cli_determinism");
  REQUIRE(run(kSmallSynth + dir.str("a")) == 0);
  REQUIRE(run(kSmallSynth + dir.str("b")) == 0);
  for (const char* name : {"trace.csv", "ground_truth.csv", "tx_schedule.csv",
                           "manifest.json", "trace.meta.json"}) {
    CAPTURE(name);
    std::string a = slurp(dir.path / "a" / name);
    CHECK(!a.empty());
    CHECK(a == slurp(dir.path / "b" / name));
  }
}

TEST_CASE("jsonl format round-trips through detect") {
  ScratchDir dir("rfsense_cli_jsonl");
  REQUIRE(run(kSmallSynth + dir.str("a") + " --format jsonl") == 0);
  CHECK(fs::exists(dir.path / "a" / "trace.jsonl"));
  REQUIRE(run("detect --trace " + dir.str("a") + "/trace.jsonl -o " +
              dir.str("det.jsonl")) == 0);
  // Same scenario via CSV gives the same detections.
  REQUIRE(run(kSmallSynth + dir.str("b")) == 0);
  REQUIRE(run("detect --trace " + dir.str("b") + "/trace.csv -o " +
              dir.str("det_csv.jsonl")) == 0);
  CHECK(slurp(dir.path / "det.jsonl") == slurp(dir.path / "det_csv.jsonl"));
}

TEST_CASE("zero detections still exit 0") {
  ScratchDir dir("rfsense_cli_quiet");
  REQUIRE(run("synth --preset hallway --pairs 2 --subcarriers 2 --duration 80 "
              "--crossings 0 --noise 0 --seed 2 --out " +
              dir.str()) == 0);
  CHECK(run("detect --trace " + dir.str("trace.csv"), dir.str("out.jsonl")) == 0);
  CHECK(slurp(dir.path / "out.jsonl").empty());
}

TEST_CASE("usage errors exit 1") {
  CHECK(run("detect") == 1);                       // missing required --trace
  CHECK(run("nonsense") == 1);                     // unknown subcommand
  CHECK(run("synth --preset bogus --out /tmp/x") == 1);
  ScratchDir dir("rfsense_cli_usage");
  REQUIRE(run(kSmallSynth + dir.str()) == 0);
  // --emit-tx-estimates without --compensate
  CHECK(run("detect --trace " + dir.str("trace.csv") + " --emit-tx-estimates " +
            dir.str("tx.csv")) == 1);
  // sweep rate above nominal
  CHECK(run("sweep --trace " + dir.str("trace.csv") + " --truth " +
            dir.str("ground_truth.csv") + " --rates 24") == 1);
}

TEST_CASE("missing input files exit 2 without partial output") {
  ScratchDir dir("rfsense_cli_missing");
  CHECK(run("detect --trace " + dir.str("nope.csv") + " -o " + dir.str("det.jsonl")) == 2);
  CHECK(!fs::exists(dir.path / "det.jsonl"));
}

TEST_CASE("quorum 1 yields at least as many detections as the default") {
  ScratchDir dir("rfsense_cli_quorum");
  REQUIRE(run(kSmallSynth + dir.str()) == 0);
  REQUIRE(run("detect --trace " + dir.str("trace.csv") + " -o " + dir.str("def.jsonl")) ==
          0);
  REQUIRE(run("detect --trace " + dir.str("trace.csv") + " --quorum 1 -o " +
              dir.str("q1.jsonl")) == 0);
  auto count_lines = [](const std::string& text) {
    return std::count(text.begin(), text.end(), '\n');
  };
  CHECK(count_lines(slurp(dir.path / "q1.jsonl")) >=
        count_lines(slurp(dir.path / "def.jsonl")));
}

TEST_CASE("compensated detect emits tx estimates") {
  ScratchDir dir("rfsense_cli_txest");
  REQUIRE(run(kSmallSynth + dir.str() + " --tx-regime random") == 0);
  REQUIRE(run("detect --trace " + dir.str("trace.csv") + " --compensate "
              "--emit-tx-estimates " +
              dir.str("tx.csv") + " -o " + dir.str("det.jsonl")) == 0);
  std::string tx = slurp(dir.path / "tx.csv");
  CHECK(tx.rfind("packet,t_hat_db,sample_count", 0) == 0);
  CHECK(std::count(tx.begin(), tx.end(), '\n') == 180 * 12 + 1);
}

TEST_CASE("dump-stats writes per-pair detector statistics") {
  ScratchDir dir("rfsense_cli_stats");
  REQUIRE(run("synth --preset hallway --pairs 2 --subcarriers 2 --duration 60 "
              "--crossings 0 --seed 3 --out " +
              dir.str()) == 0);
  REQUIRE(run("detect --trace " + dir.str("trace.csv") + " --dump-stats " +
              dir.str("stats.csv") + " -o " + dir.str("det.jsonl")) == 0);
  std::string stats = slurp(dir.path / "stats.csv");
  CHECK(stats.rfind("packet,timestamp,pair,short_var,long_var,gamma", 0) == 0);
  CHECK(std::count(stats.begin(), stats.end(), '\n') == 60 * 12 * 2 + 1);
}

TEST_CASE("sweep prints one row per rate") {
  ScratchDir dir("rfsense_cli_sweep");
  REQUIRE(run(kSmallSynth + dir.str()) == 0);
  REQUIRE(run("sweep --trace " + dir.str("trace.csv") + " --truth " +
                  dir.str("ground_truth.csv") + " --rates 12,6 --json " +
                  dir.str("sweep.json"),
              dir.str("sweep.txt")) == 0);
  auto json = nlohmann::json::parse(slurp(dir.path / "sweep.json"));
  REQUIRE(json.size() == 2);
  CHECK(json[0]["rate_hz"].get<double>() == 12.0);
  CHECK(json[1]["rate_hz"].get<double>() == 6.0);
  std::string table = slurp(dir.path / "sweep.txt");
  CHECK(table.find("12 Hz") != std::string::npos);
  CHECK(table.find("6 Hz") != std::string::npos);
}
