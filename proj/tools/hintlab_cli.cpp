#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hintlab/cli/app_config.hpp"
#include "hintlab/core/types.hpp"
#include "hintlab/errors.hpp"
#include "hintlab/llm/http_backend.hpp"
#include "hintlab/llm/mock_backend.hpp"
#include "hintlab/metrics/reports.hpp"
#include "hintlab/pipeline/engine.hpp"
#include "hintlab/store/datastore.hpp"
#include "hintlab/strings.hpp"

namespace {

using namespace hintlab;

struct GlobalArgs {
  std::string config_path;
  bool dry_run = false;
  int parallelism = 0;   // 0 = take the config value
  std::string language;  // empty = take the config value
};

std::shared_ptr<llm::Backend> make_backend(
    const cli::BackendSpec& spec,
    const std::vector<core::Exercise>& exercises) {
  if (spec.type == "scripted_mock") {
    return std::make_shared<llm::MockBackend>(
        llm::MockBackend::load_script_file(spec.script_file), exercises,
        spec.max_in_flight);
  }
  return std::make_shared<llm::HttpBackend>(spec.base_url, spec.credential_env,
                                            spec.max_in_flight);
}

// Everything the commands share, fully validated at construction.
struct Runtime {
  cli::AppConfig config;
  std::vector<core::Exercise> exercises;
  prompts::TemplateSet templates;
  pipeline::StaticRouter router;
  std::unique_ptr<llm::CallLog> call_log;
  std::unique_ptr<llm::Gateway> gateway;
  std::unique_ptr<store::RunStore> store;

  pipeline::EngineEnv env(const std::string& run_id) {
    pipeline::EngineEnv e;
    e.gateway = gateway.get();
    e.router = &router;
    e.templates = &templates;
    e.store = store.get();
    e.run_id = run_id;
    e.parallelism = config.parallelism;
    return e;
  }
};

// Backends are only wired up for commands that will actually issue model
// calls; dry runs, reports, and status work without credentials or script
// files being reachable.
Runtime build_runtime(const GlobalArgs& args, bool with_backends = true) {
  Runtime rt;
  rt.config = cli::AppConfig::load_file(args.config_path);
  if (!args.language.empty()) rt.config.language = args.language;
  if (args.parallelism > 0) rt.config.parallelism = args.parallelism;

  rt.exercises = core::load_exercises(rt.config.exercises_file);
  rt.config.stage1.exercises = rt.exercises;
  rt.templates =
      prompts::TemplateSet::load(rt.config.templates_dir, rt.config.language);

  if (with_backends) {
    rt.router.set_default(
        make_backend(rt.config.default_backend, rt.exercises));
    for (const auto& [model, spec] : rt.config.per_model_backends) {
      rt.router.set_model(model, make_backend(spec, rt.exercises));
    }
  }

  rt.call_log = std::make_unique<llm::CallLog>();
  rt.gateway =
      std::make_unique<llm::Gateway>(llm::GatewaySettings{}, rt.call_log.get());
  rt.store = std::make_unique<store::RunStore>(rt.config.output_dir);
  return rt;
}

void open_run(Runtime& rt, const std::string& run_id, const std::string& kind,
              bool resume) {
  if (rt.store->run_exists(run_id)) {
    if (!resume) {
      throw ConfigError("run " + run_id +
                        " already exists; pass --resume to continue it");
    }
    return;
  }
  store::RunManifest manifest;
  manifest.run_id = run_id;
  manifest.kind = kind;
  manifest.language = rt.config.language;
  manifest.config = rt.config.raw;
  rt.store->create_run(manifest);
}

int cmd_stage1(const GlobalArgs& args, const std::string& run_id,
               bool resume) {
  Runtime rt = build_runtime(args);
  rt.config.stage1.validate();

  const size_t cells = rt.config.stage1.exercises.size() *
                       rt.config.stage1.student_models.size() *
                       rt.config.stage1.temperatures.size();
  const size_t attempts =
      cells * static_cast<size_t>(rt.config.stage1.num_simulations);
  if (args.dry_run) {
    std::printf("dry run ok: stage1 would run %zu cells (%zu attempts)\n",
                cells, attempts);
    return 0;
  }

  open_run(rt, run_id, "stage1", resume);
  pipeline::Stage1Summary summary =
      pipeline::run_stage1(rt.config.stage1, rt.env(run_id));
  std::printf(
      "stage1 %s: %zu attempts recorded, %zu already present, %zu error "
      "entries added\n",
      run_id.c_str(), summary.attempts_recorded, summary.skipped_existing,
      summary.entries_recorded);
  return 0;
}

int cmd_stage2(const GlobalArgs& args, const std::string& stage1_run,
               std::string run_id, bool resume) {
  Runtime rt = build_runtime(args);
  if (!rt.config.stage2) {
    throw ConfigError("configuration has no stage2 section");
  }
  rt.config.stage2->validate();
  if (run_id.empty()) run_id = stage1_run + "-stage2";

  const size_t entries =
      rt.store->load(stage1_run, pipeline::kErrorEntryRecordType)
          .records.size();
  if (args.dry_run) {
    std::printf(
        "dry run ok: stage2 would run %zu entries x %zu prompts x %d "
        "repetitions\n",
        entries, rt.config.stage2->prompt_kinds.size(),
        rt.config.stage2->repetitions);
    return 0;
  }

  open_run(rt, run_id, "stage2", resume);
  pipeline::Stage2Summary summary = pipeline::run_stage2(
      *rt.config.stage2, rt.exercises, stage1_run, rt.env(run_id));
  std::printf(
      "stage2 %s: %zu entries, %zu rounds recorded, %zu already present\n",
      run_id.c_str(), summary.entries_seen, summary.rounds_recorded,
      summary.skipped_existing);
  return 0;
}

int cmd_validate(const GlobalArgs& args, const std::string& run_id,
                 const std::string& prompt_name,
                 const std::string& teacher_override, bool resume) {
  Runtime rt = build_runtime(args);

  pipeline::ValidationConfig config;
  if (rt.config.validation) {
    config = *rt.config.validation;
  } else if (rt.config.stage2) {
    config.teacher_model = rt.config.stage2->teacher_model;
    config.teacher_temperature = rt.config.stage2->teacher_temperature;
  } else {
    throw ConfigError(
        "validation needs a validation or stage2 section for the teacher");
  }
  if (!teacher_override.empty()) config.teacher_model = teacher_override;

  std::string best = prompt_name;
  if (best.empty() && rt.config.validation_best_prompt) {
    best = *rt.config.validation_best_prompt;
  }
  if (best.empty()) {
    throw ConfigError(
        "no winning prompt given: pass --prompt or set "
        "validation.best_prompt");
  }
  auto kind = prompts::parse_prompt_kind(best);
  if (!kind) {
    throw ConfigError("unknown prompt kind \"" + best + "\"");
  }
  config.best_prompt = *kind;
  config.validate();
  rt.config.stage1.validate();

  if (args.dry_run) {
    std::printf("dry run ok: validation would replay the solve grid with %s\n",
                prompts::prompt_kind_name(config.best_prompt));
    return 0;
  }

  open_run(rt, run_id, "validate", resume);
  pipeline::ValidationSummary summary =
      pipeline::run_validation(rt.config.stage1, config, rt.env(run_id));
  std::printf("validation %s: %zu attempts recorded, %zu already present\n",
              run_id.c_str(), summary.attempts_recorded,
              summary.skipped_existing);
  return 0;
}

int cmd_report(const GlobalArgs& args, const std::string& run_id,
               const std::string& targets_csv) {
  Runtime rt = build_runtime(args);

  metrics::ReportInputs inputs;
  for (double t : rt.config.stage1.temperatures) {
    inputs.temperatures.push_back(format_temperature(t));
  }
  inputs.models = rt.config.stage1.student_models;
  inputs.exercises = rt.exercises;
  inputs.scope = rt.config.selection_scope;
  if (!targets_csv.empty() && targets_csv != "all") {
    for (const std::string& t : split_any(targets_csv, ",")) {
      inputs.targets.insert(trim(t));
    }
  }

  for (const auto& rec :
       rt.store->load(run_id, pipeline::kAttemptRecordType).records) {
    inputs.attempts.push_back(pipeline::AttemptRecord::from_json(rec.payload));
  }
  for (const auto& rec :
       rt.store->load(run_id, pipeline::kErrorEntryRecordType).records) {
    inputs.entries.push_back(
        pipeline::ErrorDatasetEntry::from_json(rec.payload));
  }
  for (const auto& rec :
       rt.store->load(run_id, pipeline::kTournamentRecordType).records) {
    inputs.tournaments.push_back(
        pipeline::TournamentRecord::from_json(rec.payload));
  }
  for (const auto& rec :
       rt.store->load(run_id, pipeline::kValidationRecordType).records) {
    inputs.validations.push_back(
        pipeline::ValidationRecord::from_json(rec.payload));
  }

  if (args.dry_run) {
    std::printf(
        "dry run ok: report over %zu attempts, %zu entries, %zu rounds, %zu "
        "validations\n",
        inputs.attempts.size(), inputs.entries.size(),
        inputs.tournaments.size(), inputs.validations.size());
    return 0;
  }

  const std::string out_dir =
      (std::filesystem::path(rt.store->run_dir(run_id)) / "reports").string();
  std::vector<std::string> files = metrics::emit_reports(inputs, out_dir);
  for (const std::string& file : files) {
    std::printf("wrote %s\n",
                (std::filesystem::path(out_dir) / file).string().c_str());
  }
  if (files.empty()) {
    std::printf("nothing to report for run %s\n", run_id.c_str());
  }
  return 0;
}

int cmd_status(const GlobalArgs& args, const std::string& run_id) {
  cli::AppConfig config = cli::AppConfig::load_file(args.config_path);
  store::RunStore store(config.output_dir);
  store::RunManifest manifest = store.read_manifest(run_id);
  store::LoadResult all = store.load(run_id, "");

  std::map<std::string, size_t> counts;
  for (const auto& rec : all.records) ++counts[rec.record_type];

  std::printf("run: %s\n", manifest.run_id.c_str());
  std::printf("kind: %s\n", manifest.kind.c_str());
  std::printf("language: %s\n", manifest.language.c_str());
  std::printf("created: %s\n", manifest.created_at.c_str());
  std::printf("finalized: %s\n", manifest.finalized ? "true" : "false");
  std::printf("records:");
  if (counts.empty()) {
    std::printf(" none");
  }
  for (const auto& [type, count] : counts) {
    std::printf(" %s=%zu", type.c_str(), count);
  }
  std::printf("\n");
  std::printf("corrupt_lines: %zu\n", all.corrupt.size());
  if (!manifest.cursor.is_null()) {
    std::printf("cursor: %s\n", manifest.cursor.dump().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "simulated math students, graded attempts, and a hint-prompt "
      "tournament"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs global;
  app.add_option("--config", global.config_path, "run configuration file")
      ->required();
  app.add_flag("--dry-run", global.dry_run,
               "validate configuration and inputs, write nothing");
  app.add_option("--parallelism", global.parallelism,
                 "worker threads (overrides the config value)");
  app.add_option("--lang", global.language,
                 "template language (overrides the config value)")
      ->check(CLI::IsMember({"fr", "en"}));

  auto* stage1 = app.add_subcommand(
      "stage1", "run solves, grading, and error-dataset distillation");
  std::string stage1_run_id;
  bool stage1_resume = false;
  stage1->add_option("--run-id", stage1_run_id, "run to create or continue")
      ->required();
  stage1->add_flag("--resume", stage1_resume,
                   "continue an existing run, skipping recorded work");

  auto* stage2 =
      app.add_subcommand("stage2", "run the hint prompt tournament");
  std::string stage2_stage1_run;
  std::string stage2_run_id;
  bool stage2_resume = false;
  stage2
      ->add_option("--stage1-run", stage2_stage1_run,
                   "run holding the error dataset")
      ->required();
  stage2->add_option("--run-id", stage2_run_id,
                     "tournament run id (default: <stage1-run>-stage2)");
  stage2->add_flag("--resume", stage2_resume,
                   "continue an existing run, skipping recorded work");

  auto* validate = app.add_subcommand(
      "validate", "replay solves and revise each failure with one hint");
  std::string validate_run_id;
  std::string validate_prompt;
  std::string validate_teacher;
  bool validate_resume = false;
  validate->add_option("--run-id", validate_run_id, "run to create or continue")
      ->required();
  validate->add_option("--prompt", validate_prompt,
                       "winning hint prompt (e.g. hint_calcul)");
  validate->add_option("--teacher", validate_teacher,
                       "teacher model override");
  validate->add_flag("--resume", validate_resume,
                     "continue an existing run, skipping recorded work");

  auto* report =
      app.add_subcommand("report", "emit CSV/JSON reports for a run");
  std::string report_run_id;
  std::string report_targets = "all";
  report->add_option("--run", report_run_id, "run to report on")->required();
  report->add_option(
      "--targets", report_targets,
      "comma list of accuracy,presence,rates,validation (default all)");

  auto* status = app.add_subcommand("status", "show a run's manifest and "
                                              "record counts");
  std::string status_run_id;
  status->add_option("--run", status_run_id, "run to inspect")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (stage1->parsed()) {
      return cmd_stage1(global, stage1_run_id, stage1_resume);
    }
    if (stage2->parsed()) {
      return cmd_stage2(global, stage2_stage1_run, stage2_run_id,
                        stage2_resume);
    }
    if (validate->parsed()) {
      return cmd_validate(global, validate_run_id, validate_prompt,
                          validate_teacher, validate_resume);
    }
    if (report->parsed()) {
      return cmd_report(global, report_run_id, report_targets);
    }
    if (status->parsed()) {
      return cmd_status(global, status_run_id);
    }
  } catch (const hintlab::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hintlab::MissingRun& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const hintlab::TransportError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const hintlab::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
