#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hintlab/llm/backend.hpp"
#include "hintlab/pipeline/config.hpp"
#include "hintlab/pipeline/records.hpp"
#include "hintlab/prompts/extract.hpp"
#include "hintlab/prompts/templates.hpp"
#include "hintlab/store/datastore.hpp"

namespace hintlab::pipeline {

// Resolves which backend serves a given model id.
class BackendRouter {
 public:
  virtual ~BackendRouter() = default;
  virtual llm::Backend& backend_for(const std::string& model_id) = 0;
};

// Fixed routing table with an optional catch-all backend.
class StaticRouter : public BackendRouter {
 public:
  void set_default(std::shared_ptr<llm::Backend> backend);
  void set_model(const std::string& model_id,
                 std::shared_ptr<llm::Backend> backend);
  llm::Backend& backend_for(const std::string& model_id) override;

 private:
  std::shared_ptr<llm::Backend> default_;
  std::map<std::string, std::shared_ptr<llm::Backend>> per_model_;
};

// Everything a pipeline stage needs to run: transport, templates, storage,
// and the run it appends to. Non-owning; the caller keeps these alive.
struct EngineEnv {
  llm::Gateway* gateway = nullptr;
  BackendRouter* router = nullptr;
  const prompts::TemplateSet* templates = nullptr;
  store::RunStore* store = nullptr;
  std::string run_id;
  int parallelism = 1;
};

// Turns the grader's raw fields into a verdict. Precedence: a non-empty
// corrected answer wins (the attempt is correct); otherwise recognized error
// labels make it incorrect with the canonical set; otherwise the output is
// undecodable. Labels that name no known category are returned for the
// audit trail.
struct GradeResult {
  core::Verdict verdict;
  std::vector<std::string> unknown_labels;
};
GradeResult grade_check_output(const prompts::CheckOut& out,
                               const std::string& raw_text);

// Turns the hint classifier's two fields into a verdict string. A non-empty
// wrong_hint wins even when correct_hint is also filled; both empty means
// the output decided nothing ("").
std::string hint_verdict_of(const prompts::ClassifyOut& out);

struct Stage1Summary {
  size_t attempts_recorded = 0;
  size_t entries_recorded = 0;
  size_t skipped_existing = 0;
};

struct Stage2Summary {
  size_t rounds_recorded = 0;
  size_t skipped_existing = 0;
  size_t entries_seen = 0;
};

struct ValidationSummary {
  size_t attempts_recorded = 0;
  size_t skipped_existing = 0;
};

// Stage 1: for every (exercise, student model, temperature) cell run
// num_simulations solves, grade each, then distill the cell's incorrect
// attempts into one error-dataset entry per distinct error set. Appends
// "attempt" and "error_entry" records; attempts already in the log are not
// re-run, and entries are deduplicated by id, so re-running a finished run
// appends nothing.
Stage1Summary run_stage1(const Stage1Config& config, const EngineEnv& env);

// Stage 2: for every error-dataset entry recorded in stage1_run_id, render
// each competing prompt `repetitions` times, run hint -> revision ->
// classification, and append one "tournament" record per round. Rounds
// already in the log are skipped.
Stage2Summary run_stage2(const Stage2Config& config,
                         const std::vector<core::Exercise>& exercises,
                         const std::string& stage1_run_id,
                         const EngineEnv& env);

// Validation: replay the stage-1 solve grid; every incorrect first answer
// receives exactly one hint from the winning prompt and one revision, and
// the revised answer is re-graded. Appends "validation" records.
ValidationSummary run_validation(const Stage1Config& grid,
                                 const ValidationConfig& config,
                                 const EngineEnv& env);

}  // namespace hintlab::pipeline
