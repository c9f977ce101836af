#include "hintlab/pipeline/engine.hpp"

#include <atomic>
#include <functional>
#include <optional>
#include <set>
#include <thread>
#include <variant>

#include "hintlab/errors.hpp"
#include "hintlab/llm/context.hpp"
#include "hintlab/prompts/hint_rules.hpp"
#include "hintlab/strings.hpp"

namespace hintlab::pipeline {

namespace {

using core::Exercise;
using llm::CompletionParams;
using llm::MessageList;
using prompts::PromptKind;

const Exercise& exercise_by_id(const std::vector<Exercise>& exercises,
                               const std::string& id) {
  for (const Exercise& e : exercises) {
    if (e.id == id) return e;
  }
  throw ConfigError("exercise " + id + " is not part of this run's set");
}

// Runs fn(0..count-1) on up to `parallelism` threads. The first exception
// stops the dispatch and is rethrown on the calling thread.
void parallel_for(int parallelism, size_t count,
                  const std::function<void(size_t)>& fn) {
  size_t workers = static_cast<size_t>(std::max(1, parallelism));
  if (workers > count) workers = count;
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (!failed.load()) {
      size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> guard(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Completes the request and decodes the payload the kind demands, retrying
// the identical request once when the output cannot be decoded. Returns
// nullopt (with the last raw text in *raw_out) when both tries fail.
template <typename T>
std::optional<T> decode(PromptKind kind, const MessageList& messages,
                        const CompletionParams& params, const EngineEnv& env,
                        std::string* raw_out) {
  llm::Backend& backend = env.router->backend_for(params.model_id);
  for (int round = 0; round < 2; ++round) {
    std::string raw = env.gateway->complete(messages, params, backend);
    if (raw_out) *raw_out = raw;
    try {
      return std::get<T>(prompts::extract_payload(kind, raw));
    } catch (const DecodingFailure&) {
      // fall through to the single identical retry
    }
  }
  return std::nullopt;
}

std::string attempt_key(const std::string& exercise_id,
                        const std::string& model, double temperature,
                        int index) {
  return exercise_id + "|" + model + "|T" + format_temperature(temperature) +
         "|" + std::to_string(index);
}

// One solve plus one grading pass; shared by stage 1 and validation.
AttemptRecord solve_and_grade(const Exercise& exercise,
                              const std::string& student_model,
                              double temperature, int attempt_index,
                              const std::string& verifier_model,
                              double verifier_temperature,
                              const EngineEnv& env) {
  AttemptRecord rec;
  rec.exercise_id = exercise.id;
  rec.student_model = student_model;
  rec.temperature = temperature;
  rec.attempt_index = attempt_index;

  prompts::RenderInput solve_input;
  solve_input.exercise = exercise;
  MessageList solve_messages =
      prompts::render(PromptKind::Solve, solve_input, *env.templates);
  CompletionParams solve_params;
  solve_params.model_id = student_model;
  solve_params.temperature = temperature;
  solve_params.sample_ordinal = attempt_index;

  std::string raw;
  auto solved = decode<prompts::SolveOut>(PromptKind::Solve, solve_messages,
                                          solve_params, env, &raw);
  if (!solved) {
    rec.verdict = core::Undecodable{raw};
    return rec;
  }
  rec.reasoning = solved->reasoning;
  rec.answer = solved->answer;

  core::Attempt attempt{exercise.id, student_model, temperature,
                        rec.reasoning,  rec.answer,   attempt_index};
  prompts::RenderInput check_input;
  check_input.exercise = exercise;
  check_input.attempt = attempt;
  MessageList check_messages =
      prompts::render(PromptKind::CheckAndDetect, check_input, *env.templates);
  CompletionParams check_params;
  check_params.model_id = verifier_model;
  check_params.temperature = verifier_temperature;
  check_params.sample_ordinal = attempt_index;

  auto checked = decode<prompts::CheckOut>(PromptKind::CheckAndDetect,
                                           check_messages, check_params, env,
                                           &raw);
  if (!checked) {
    rec.verdict = core::Undecodable{raw};
    return rec;
  }
  GradeResult graded = grade_check_output(*checked, raw);
  rec.verdict = graded.verdict;
  rec.unknown_labels = graded.unknown_labels;
  return rec;
}

core::Attempt attempt_of_entry(const ErrorDatasetEntry& entry) {
  return core::Attempt{entry.exercise_id, entry.student_model,
                       entry.temperature, entry.reasoning,
                       entry.answer,      entry.attempt_index};
}

struct IncorrectAttempt {
  const AttemptRecord* record;
  core::ErrorSet errors;
};

// Picks the attempt a diversified group item refers back to: exact
// reasoning+answer match, then answer match, then the first attempt carrying
// the same error set. Null when nothing plausible matches.
const AttemptRecord* match_attempt(const std::vector<IncorrectAttempt>& pool,
                                   const prompts::DiversifyGroupItem& item,
                                   const core::ErrorSet& errors) {
  for (const auto& candidate : pool) {
    if (candidate.record->reasoning == item.reasoning &&
        candidate.record->answer == item.response) {
      return candidate.record;
    }
  }
  for (const auto& candidate : pool) {
    if (!item.response.empty() && candidate.record->answer == item.response) {
      return candidate.record;
    }
  }
  for (const auto& candidate : pool) {
    if (candidate.errors == errors) return candidate.record;
  }
  return nullptr;
}

std::optional<core::ErrorSet> set_from_text(const std::string& text) {
  core::ParsedLabels parsed = core::parse_error_labels(text);
  if (parsed.known.empty()) return std::nullopt;
  return core::ErrorSet::canonicalize(parsed.known);
}

}  // namespace

void StaticRouter::set_default(std::shared_ptr<llm::Backend> backend) {
  default_ = std::move(backend);
}

void StaticRouter::set_model(const std::string& model_id,
                             std::shared_ptr<llm::Backend> backend) {
  per_model_[model_id] = std::move(backend);
}

llm::Backend& StaticRouter::backend_for(const std::string& model_id) {
  auto it = per_model_.find(model_id);
  if (it != per_model_.end()) return *it->second;
  if (default_) return *default_;
  throw ConfigError("no backend configured for model " + model_id);
}

GradeResult grade_check_output(const prompts::CheckOut& out,
                               const std::string& raw_text) {
  GradeResult result;
  const std::string corrected = trim(out.correct_answer_raw);
  if (!corrected.empty()) {
    result.verdict = core::Correct{corrected};
    return result;
  }
  const std::string labels_text = trim(out.error_type_raw);
  if (labels_text.empty()) {
    result.verdict = core::Undecodable{raw_text};
    return result;
  }
  core::ParsedLabels parsed = core::parse_error_labels(labels_text);
  result.unknown_labels = parsed.unknown;
  if (parsed.known.empty()) {
    result.verdict = core::Undecodable{raw_text};
    return result;
  }
  result.verdict = core::Incorrect{core::ErrorSet::canonicalize(parsed.known)};
  return result;
}

std::string hint_verdict_of(const prompts::ClassifyOut& out) {
  if (!trim(out.wrong_hint).empty()) return "wrong_hint";
  if (!trim(out.correct_hint).empty()) return "correct_hint";
  return "";
}

Stage1Summary run_stage1(const Stage1Config& config, const EngineEnv& env) {
  config.validate();

  // Resume state: attempts are keyed by cell+index, entries by id.
  std::map<std::string, AttemptRecord> existing_attempts;
  for (const auto& rec :
       env.store->load(env.run_id, kAttemptRecordType).records) {
    AttemptRecord attempt = AttemptRecord::from_json(rec.payload);
    existing_attempts.emplace(
        attempt_key(attempt.exercise_id, attempt.student_model,
                    attempt.temperature, attempt.attempt_index),
        std::move(attempt));
  }
  std::set<std::string> existing_entries;
  for (const auto& rec :
       env.store->load(env.run_id, kErrorEntryRecordType).records) {
    existing_entries.insert(
        rec.payload.at("entry_id").get<std::string>());
  }

  struct Cell {
    const Exercise* exercise;
    const std::string* model;
    double temperature;
  };
  std::vector<Cell> cells;
  for (const Exercise& exercise : config.exercises) {
    for (const std::string& model : config.student_models) {
      for (double temperature : config.temperatures) {
        cells.push_back(Cell{&exercise, &model, temperature});
      }
    }
  }

  std::atomic<size_t> attempts_recorded{0};
  std::atomic<size_t> entries_recorded{0};
  std::atomic<size_t> skipped{0};

  parallel_for(env.parallelism, cells.size(), [&](size_t cell_index) {
    const Cell& cell = cells[cell_index];
    const Exercise& exercise = *cell.exercise;
    const std::string& model = *cell.model;
    const double temperature = cell.temperature;

    std::vector<AttemptRecord> attempts;
    attempts.reserve(static_cast<size_t>(config.num_simulations));
    for (int i = 0; i < config.num_simulations; ++i) {
      auto found = existing_attempts.find(
          attempt_key(exercise.id, model, temperature, i));
      if (found != existing_attempts.end()) {
        attempts.push_back(found->second);
        skipped.fetch_add(1);
        continue;
      }
      AttemptRecord rec =
          solve_and_grade(exercise, model, temperature, i,
                          config.verifier_model, config.verifier_temperature,
                          env);
      env.store->append(env.run_id, kAttemptRecordType, rec.to_json());
      attempts_recorded.fetch_add(1);
      attempts.push_back(std::move(rec));
    }

    std::vector<IncorrectAttempt> incorrect;
    for (const AttemptRecord& rec : attempts) {
      if (const auto* bad = std::get_if<core::Incorrect>(&rec.verdict)) {
        incorrect.push_back(IncorrectAttempt{&rec, bad->errors});
      }
    }
    if (incorrect.empty()) return;

    std::set<core::ErrorSet> seen_sets;
    auto emit_entry = [&](const core::ErrorSet& errors,
                          const AttemptRecord& source) {
      if (!seen_sets.insert(errors).second) return;
      ErrorDatasetEntry entry;
      entry.entry_id = make_entry_id(exercise.id, model, temperature, errors);
      if (existing_entries.count(entry.entry_id)) return;
      entry.exercise_id = exercise.id;
      entry.student_model = model;
      entry.temperature = temperature;
      entry.errors = errors;
      entry.reasoning = source.reasoning;
      entry.answer = source.answer;
      entry.attempt_index = source.attempt_index;
      env.store->append(env.run_id, kErrorEntryRecordType, entry.to_json());
      entries_recorded.fetch_add(1);
    };

    prompts::RenderInput div_input;
    div_input.exercise = exercise;
    div_input.k_examples = config.diversify_k;
    std::vector<prompts::DiversifyExample> examples;
    for (const IncorrectAttempt& item : incorrect) {
      examples.push_back(prompts::DiversifyExample{
          item.record->reasoning, item.record->answer, item.errors.label()});
    }
    div_input.examples = std::move(examples);
    MessageList div_messages =
        prompts::render(PromptKind::Diversify, div_input, *env.templates);
    CompletionParams div_params;
    div_params.model_id = config.verifier_model;
    div_params.temperature = config.verifier_temperature;
    div_params.sample_ordinal = 0;

    std::string raw;
    auto grouped = decode<prompts::DiversifyOut>(PromptKind::Diversify,
                                                 div_messages, div_params, env,
                                                 &raw);
    if (!grouped) {
      // Grouping output was undecodable: fall back to local first-per-set
      // selection so the error dataset still gets one entry per error set.
      for (const IncorrectAttempt& item : incorrect) {
        emit_entry(item.errors, *item.record);
      }
      return;
    }

    for (const auto& [label, items] : grouped->groups) {
      if (items.empty()) continue;
      std::optional<core::ErrorSet> errors = set_from_text(label);
      if (!errors) errors = set_from_text(items.front().evaluation);
      if (!errors) continue;  // group named no known category
      const AttemptRecord* source =
          match_attempt(incorrect, items.front(), *errors);
      if (source == nullptr) continue;
      emit_entry(*errors, *source);
    }
  });

  env.store->advance_cursor(
      env.run_id,
      json{{"last_completed_stage", "stage1"}, {"cells", cells.size()}});

  Stage1Summary summary;
  summary.attempts_recorded = attempts_recorded.load();
  summary.entries_recorded = entries_recorded.load();
  summary.skipped_existing = skipped.load();
  return summary;
}

Stage2Summary run_stage2(const Stage2Config& config,
                         const std::vector<Exercise>& exercises,
                         const std::string& stage1_run_id,
                         const EngineEnv& env) {
  config.validate();

  std::vector<ErrorDatasetEntry> entries;
  for (const auto& rec :
       env.store->load(stage1_run_id, kErrorEntryRecordType).records) {
    entries.push_back(ErrorDatasetEntry::from_json(rec.payload));
  }

  std::set<std::string> done;
  for (const auto& rec :
       env.store->load(env.run_id, kTournamentRecordType).records) {
    const json& p = rec.payload;
    done.insert(p.at("entry_id").get<std::string>() + "|" +
                p.at("prompt_kind").get<std::string>() + "|" +
                std::to_string(p.at("repetition").get<int>()));
  }

  std::atomic<size_t> rounds_recorded{0};
  std::atomic<size_t> skipped{0};

  parallel_for(env.parallelism, entries.size(), [&](size_t entry_index) {
    const ErrorDatasetEntry& entry = entries[entry_index];
    const Exercise& exercise = exercise_by_id(exercises, entry.exercise_id);

    for (PromptKind kind : config.prompt_kinds) {
      for (int rep = 0; rep < config.repetitions; ++rep) {
        const std::string key = entry.entry_id + "|" +
                                prompts::prompt_kind_name(kind) + "|" +
                                std::to_string(rep);
        if (done.count(key)) {
          skipped.fetch_add(1);
          continue;
        }

        TournamentRecord rec;
        rec.entry_id = entry.entry_id;
        rec.exercise_id = entry.exercise_id;
        rec.student_model = entry.student_model;
        rec.temperature = entry.temperature;
        rec.prompt_kind = kind;
        rec.repetition = rep;

        auto record_round = [&] {
          env.store->append(env.run_id, kTournamentRecordType, rec.to_json());
          rounds_recorded.fetch_add(1);
        };

        // 1. Teacher produces the hint. Specialized prompts see the
        // student's failed attempt; baselines see only the exercise.
        prompts::RenderInput hint_input;
        hint_input.exercise = exercise;
        if (prompts::is_specialized_hint(kind)) {
          hint_input.attempt = attempt_of_entry(entry);
        }
        MessageList hint_messages =
            prompts::render(kind, hint_input, *env.templates);
        CompletionParams teacher_params;
        teacher_params.model_id = config.teacher_model;
        teacher_params.temperature = config.teacher_temperature;
        teacher_params.sample_ordinal =
            config.reuse_hint_across_repetitions ? 0 : rep;

        std::string raw;
        std::string hint;
        if (kind == PromptKind::BaselineOne) {
          auto out = decode<prompts::BaselineOneOut>(kind, hint_messages,
                                                     teacher_params, env, &raw);
          if (out) hint = out->hints.front();
        } else {
          auto out = decode<prompts::HintOut>(kind, hint_messages,
                                              teacher_params, env, &raw);
          if (out) hint = out->hint_text;
        }
        if (trim(hint).empty()) {
          rec.hint_verdict = "undecodable";
          rec.undecodable_stage = "teacher";
          record_round();
          continue;
        }
        rec.hint_text = hint;

        // 2. Cheap local shape rules (recorded, not blocking).
        prompts::HintValidity validity = prompts::validate_hint(hint, exercise);
        for (prompts::HintFailure f : validity.reasons) {
          rec.local_failures.push_back(prompts::hint_failure_name(f));
        }

        // 3. The student revises at its original sampling temperature, with
        // only its initial solution and the hint in context.
        prompts::RenderInput review_input;
        review_input.exercise = exercise;
        review_input.hint = hint;
        MessageList review_messages =
            prompts::render(PromptKind::Review, review_input, *env.templates);
        MessageList revision_context = llm::build_revision_context(
            exercise, attempt_of_entry(entry), review_messages);
        CompletionParams student_params;
        student_params.model_id = entry.student_model;
        student_params.temperature = entry.temperature;
        student_params.sample_ordinal = rep;

        auto revised = decode<prompts::ReviewOut>(
            PromptKind::Review, revision_context, student_params, env, &raw);
        if (!revised) {
          rec.hint_verdict = "undecodable";
          rec.undecodable_stage = "revision";
          record_round();
          continue;
        }
        rec.revised_answer = revised->response;

        // 4. The classifier grades the hint by what the revision achieved.
        prompts::RenderInput classify_input;
        classify_input.exercise = exercise;
        classify_input.hint = hint;
        classify_input.revised_answer = rec.revised_answer;
        MessageList classify_messages = prompts::render(
            PromptKind::ClassifyHint, classify_input, *env.templates);
        CompletionParams classify_params;
        classify_params.model_id = config.teacher_model;
        classify_params.temperature = 0.0;
        classify_params.sample_ordinal = rep;

        auto classified = decode<prompts::ClassifyOut>(PromptKind::ClassifyHint,
                                                       classify_messages,
                                                       classify_params, env,
                                                       &raw);
        std::string verdict =
            classified ? hint_verdict_of(*classified) : std::string();
        if (verdict.empty()) {
          rec.hint_verdict = "undecodable";
          rec.undecodable_stage = "classify";
          record_round();
          continue;
        }
        rec.hint_verdict = verdict;
        record_round();
      }
    }
  });

  env.store->advance_cursor(
      env.run_id,
      json{{"last_completed_stage", "stage2"}, {"entries", entries.size()}});

  Stage2Summary summary;
  summary.rounds_recorded = rounds_recorded.load();
  summary.skipped_existing = skipped.load();
  summary.entries_seen = entries.size();
  return summary;
}

ValidationSummary run_validation(const Stage1Config& grid,
                                 const ValidationConfig& config,
                                 const EngineEnv& env) {
  grid.validate();
  config.validate();

  std::set<std::string> done;
  for (const auto& rec :
       env.store->load(env.run_id, kValidationRecordType).records) {
    const json& p = rec.payload;
    done.insert(attempt_key(p.at("exercise_id").get<std::string>(),
                            p.at("student_model").get<std::string>(),
                            p.at("temperature").get<double>(),
                            p.at("attempt_index").get<int>()));
  }

  struct Cell {
    const Exercise* exercise;
    const std::string* model;
    double temperature;
  };
  std::vector<Cell> cells;
  for (const Exercise& exercise : grid.exercises) {
    for (const std::string& model : grid.student_models) {
      for (double temperature : grid.temperatures) {
        cells.push_back(Cell{&exercise, &model, temperature});
      }
    }
  }

  std::atomic<size_t> recorded{0};
  std::atomic<size_t> skipped{0};

  parallel_for(env.parallelism, cells.size(), [&](size_t cell_index) {
    const Cell& cell = cells[cell_index];
    const Exercise& exercise = *cell.exercise;
    const std::string& model = *cell.model;
    const double temperature = cell.temperature;

    for (int i = 0; i < grid.num_simulations; ++i) {
      if (done.count(attempt_key(exercise.id, model, temperature, i))) {
        skipped.fetch_add(1);
        continue;
      }

      AttemptRecord first =
          solve_and_grade(exercise, model, temperature, i, grid.verifier_model,
                          grid.verifier_temperature, env);
      ValidationRecord rec;
      rec.exercise_id = exercise.id;
      rec.student_model = model;
      rec.temperature = temperature;
      rec.attempt_index = i;
      rec.before = first.verdict;

      auto record_attempt = [&] {
        env.store->append(env.run_id, kValidationRecordType, rec.to_json());
        recorded.fetch_add(1);
      };

      if (!std::holds_alternative<core::Incorrect>(first.verdict)) {
        record_attempt();
        continue;
      }

      // Exactly one hint from the winning prompt, then one revision.
      rec.hint_given = true;
      prompts::RenderInput hint_input;
      hint_input.exercise = exercise;
      if (prompts::is_specialized_hint(config.best_prompt)) {
        hint_input.attempt = core::Attempt{exercise.id,     model,
                                           temperature,     first.reasoning,
                                           first.answer,    i};
      }
      MessageList hint_messages =
          prompts::render(config.best_prompt, hint_input, *env.templates);
      CompletionParams teacher_params;
      teacher_params.model_id = config.teacher_model;
      teacher_params.temperature = config.teacher_temperature;
      teacher_params.sample_ordinal = i;

      std::string raw;
      std::string hint;
      if (config.best_prompt == PromptKind::BaselineOne) {
        auto out = decode<prompts::BaselineOneOut>(
            config.best_prompt, hint_messages, teacher_params, env, &raw);
        if (out) hint = out->hints.front();
      } else {
        auto out = decode<prompts::HintOut>(config.best_prompt, hint_messages,
                                            teacher_params, env, &raw);
        if (out) hint = out->hint_text;
      }
      if (trim(hint).empty()) {
        rec.after = core::Undecodable{raw};
        record_attempt();
        continue;
      }
      rec.hint_text = hint;

      prompts::RenderInput review_input;
      review_input.exercise = exercise;
      review_input.hint = hint;
      MessageList review_messages =
          prompts::render(PromptKind::Review, review_input, *env.templates);
      core::Attempt initial{exercise.id,     model,        temperature,
                            first.reasoning, first.answer, i};
      MessageList revision_context =
          llm::build_revision_context(exercise, initial, review_messages);
      CompletionParams student_params;
      student_params.model_id = model;
      student_params.temperature = temperature;
      student_params.sample_ordinal = i;

      auto revised = decode<prompts::ReviewOut>(
          PromptKind::Review, revision_context, student_params, env, &raw);
      if (!revised) {
        rec.after = core::Undecodable{raw};
        record_attempt();
        continue;
      }
      rec.revised_answer = revised->response;

      // Grade the revision the same way first answers are graded.
      core::Attempt revised_attempt{exercise.id, model, temperature,
                                    "",          rec.revised_answer, i};
      prompts::RenderInput check_input;
      check_input.exercise = exercise;
      check_input.attempt = revised_attempt;
      MessageList check_messages = prompts::render(PromptKind::CheckAndDetect,
                                                   check_input, *env.templates);
      CompletionParams check_params;
      check_params.model_id = grid.verifier_model;
      check_params.temperature = grid.verifier_temperature;
      check_params.sample_ordinal = i;

      auto checked = decode<prompts::CheckOut>(PromptKind::CheckAndDetect,
                                               check_messages, check_params,
                                               env, &raw);
      if (!checked) {
        rec.after = core::Undecodable{raw};
        record_attempt();
        continue;
      }
      rec.after = grade_check_output(*checked, raw).verdict;
      record_attempt();
    }
  });

  env.store->advance_cursor(
      env.run_id,
      json{{"last_completed_stage", "validation"}, {"cells", cells.size()}});

  ValidationSummary summary;
  summary.attempts_recorded = recorded.load();
  summary.skipped_existing = skipped.load();
  return summary;
}

}  // namespace hintlab::pipeline
