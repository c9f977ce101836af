#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hintlab/pipeline/records.hpp"
#include "hintlab/store/datastore.hpp"

using namespace hintlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& arguments) {
  std::string command =
      std::string(HINTLAB_CLI_PATH) + " " + arguments + " >/dev/null 2>&1";
  int status = std::system(command.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// One workspace shared by the whole suite so the pipeline stages can chain.
struct Workspace {
  fs::path root;
  std::string config_path;

  Workspace() {
    root = fs::temp_directory_path() /
           ("hintlab-cli-" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);

    const std::string fixtures = HINTLAB_FIXTURES_DIR;
    json config = {
        {"output_dir", (root / "runs").string()},
        {"language", "fr"},
        {"parallelism", 2},
        {"templates_dir", HINTLAB_TEMPLATES_DIR},
        {"exercises_file", fixtures + "/exercises_fr.json"},
        {"selection_scope", "global"},
        {"stage1",
         {{"student_models", {"student-a"}},
          {"verifier_model", "verifier-prime"},
          {"temperatures", {0.0, 0.2}},
          {"num_simulations", 4},
          {"verifier_temperature", 0.0},
          {"diversify_k", 2}}},
        {"stage2",
         {{"teacher_model", "teacher-prime"},
          {"teacher_temperature", 1.0},
          {"repetitions", 2}}},
        {"validation",
         {{"teacher_model", "teacher-prime"},
          {"teacher_temperature", 1.0},
          {"best_prompt", "hint_calcul"}}},
        {"backends",
         {{"default",
           {{"type", "scripted_mock"},
            {"script_file", fixtures + "/mock_scripts/golden_fr.json"}}}}}};

    config_path = (root / "config.json").string();
    std::ofstream out(config_path);
    out << config.dump(2);
  }

  std::string with_config(const std::string& rest) const {
    return "--config " + config_path + " " + rest;
  }
};

Workspace& workspace() {
  static Workspace w;
  return w;
}

}  // namespace

TEST_CASE("help and argument errors") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("stage1 --run-id x") != 0);  // --config is required
  CHECK(run_cli(workspace().with_config("")) != 0);  // a subcommand is required
}

TEST_CASE("configuration problems exit with code 2") {
  CHECK(run_cli("--config /nonexistent.json stage1 --run-id x") == 2);
  // An unknown prompt kind is caught before any work happens.
  CHECK(run_cli(workspace().with_config(
            "validate --run-id bad --prompt hint_of_destiny")) == 2);
}

TEST_CASE("status on a missing run exits with code 4") {
  CHECK(run_cli(workspace().with_config("status --run ghost")) == 4);
}

TEST_CASE("dry runs write nothing") {
  CHECK(run_cli(workspace().with_config("--dry-run stage1 --run-id dry")) == 0);
  CHECK_FALSE(fs::exists(workspace().root / "runs" / "dry"));
}

TEST_CASE("the pipeline chains stage1, stage2, validate, report") {
  auto& ws = workspace();

  REQUIRE(run_cli(ws.with_config("stage1 --run-id r1")) == 0);
  store::RunStore store((ws.root / "runs").string());
  REQUIRE(store.run_exists("r1"));
  CHECK(store.read_manifest("r1").kind == "stage1");
  // 4 exercises x 1 model x 2 temperatures x 4 simulations
  CHECK(store.load("r1", pipeline::kAttemptRecordType).records.size() == 32);
  CHECK(store.load("r1", pipeline::kErrorEntryRecordType).records.size() == 2);

  // An existing run is refused without --resume; with it, nothing is redone.
  CHECK(run_cli(ws.with_config("stage1 --run-id r1")) == 2);
  CHECK(run_cli(ws.with_config("stage1 --run-id r1 --resume")) == 0);
  CHECK(store.load("r1", pipeline::kAttemptRecordType).records.size() == 32);

  REQUIRE(run_cli(ws.with_config("stage2 --stage1-run r1")) == 0);
  REQUIRE(store.run_exists("r1-stage2"));
  CHECK(store.read_manifest("r1-stage2").kind == "stage2");
  // 2 entries x 9 hint kinds x 2 repetitions
  CHECK(store.load("r1-stage2", pipeline::kTournamentRecordType)
            .records.size() == 36);

  REQUIRE(run_cli(ws.with_config("validate --run-id v1")) == 0);
  CHECK(store.read_manifest("v1").kind == "validate");
  CHECK(store.load("v1", pipeline::kValidationRecordType).records.size() == 32);

  REQUIRE(run_cli(ws.with_config("report --run r1")) == 0);
  auto reports = ws.root / "runs" / "r1" / "reports";
  CHECK(fs::exists(reports / "solve_accuracy.csv"));
  CHECK(fs::exists(reports / "error_presence_ex1-mod1.csv"));
  CHECK_FALSE(fs::exists(reports / "revision_error_rates.csv"));

  REQUIRE(run_cli(ws.with_config("report --run r1-stage2")) == 0);
  auto stage2_reports = ws.root / "runs" / "r1-stage2" / "reports";
  CHECK(fs::exists(stage2_reports / "revision_error_rates.csv"));
  CHECK(fs::exists(stage2_reports / "best_prompts.json"));

  REQUIRE(run_cli(ws.with_config("report --run v1 --targets validation")) == 0);
  auto v_reports = ws.root / "runs" / "v1" / "reports";
  CHECK(fs::exists(v_reports / "validation_accuracy.csv"));
  CHECK_FALSE(fs::exists(v_reports / "solve_accuracy.csv"));

  CHECK(run_cli(ws.with_config("report --run r1 --targets everything")) == 2);

  CHECK(run_cli(ws.with_config("status --run r1")) == 0);
}

TEST_CASE("an unreachable http backend exits with code 3") {
  auto& ws = workspace();
  json config;
  {
    std::ifstream in(ws.config_path);
    in >> config;
  }
  config["backends"]["default"] = {{"type", "http"},
                                   {"base_url", "http://127.0.0.1:9"},
                                   {"credential_env", "HINTLAB_TEST_KEY"},
                                   {"max_in_flight", 1}};
  config["stage1"]["num_simulations"] = 1;
  config["stage1"]["temperatures"] = {0.0};
  auto http_config = (ws.root / "http_config.json").string();
  {
    std::ofstream out(http_config);
    out << config.dump(2);
  }
  std::string command = "HINTLAB_TEST_KEY=test-token " +
                        std::string(HINTLAB_CLI_PATH) + " --config " +
                        http_config + " stage1 --run-id h1 >/dev/null 2>&1";
  int status = std::system(command.c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == 3);

  // Without the credential in the environment the backend refuses to build.
  std::string no_env = "env -u HINTLAB_TEST_KEY " +
                       std::string(HINTLAB_CLI_PATH) + " --config " +
                       http_config + " stage1 --run-id h2 >/dev/null 2>&1";
  status = std::system(no_env.c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == 2);
}
