#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hintlab/core/taxonomy.hpp"
#include "hintlab/core/types.hpp"
#include "hintlab/prompts/prompt_kind.hpp"

namespace hintlab::pipeline {

using json = nlohmann::json;

// Record type tags used in the append-only run log.
inline constexpr const char* kAttemptRecordType = "attempt";
inline constexpr const char* kErrorEntryRecordType = "error_entry";
inline constexpr const char* kTournamentRecordType = "tournament";
inline constexpr const char* kValidationRecordType = "validation";

json verdict_to_json(const core::Verdict& verdict);
core::Verdict verdict_from_json(const json& j);

// One graded solve attempt.
struct AttemptRecord {
  std::string exercise_id;
  std::string student_model;
  double temperature = 0.0;
  int attempt_index = 0;
  std::string reasoning;
  std::string answer;
  core::Verdict verdict;
  std::vector<std::string> unknown_labels;  // audit trail for grader output
                                            // that named no known category

  json to_json() const;
  static AttemptRecord from_json(const json& j);
};

// One row of the diverse error dataset: a representative incorrect attempt
// for a distinct error set within an (exercise, model, temperature) cell.
struct ErrorDatasetEntry {
  std::string entry_id;
  std::string exercise_id;
  std::string student_model;
  double temperature = 0.0;
  core::ErrorSet errors;
  std::string reasoning;
  std::string answer;
  int attempt_index = 0;

  json to_json() const;
  static ErrorDatasetEntry from_json(const json& j);
};

std::string make_entry_id(const std::string& exercise_id,
                          const std::string& student_model, double temperature,
                          const core::ErrorSet& errors);

// One hint-revise-verify round of the prompt tournament.
struct TournamentRecord {
  std::string entry_id;
  std::string exercise_id;
  std::string student_model;
  double temperature = 0.0;  // revision sampling temperature (the entry's)
  prompts::PromptKind prompt_kind = prompts::PromptKind::HintReason;
  int repetition = 0;
  std::string hint_text;
  std::vector<std::string> local_failures;  // shape-rule violations
  std::string revised_answer;
  std::string hint_verdict;       // "correct_hint" | "wrong_hint" | "undecodable"
  std::string undecodable_stage;  // "" | "teacher" | "revision" | "classify"

  json to_json() const;
  static TournamentRecord from_json(const json& j);
};

// One validation attempt: a fresh solve, optionally followed by exactly one
// hint and one revision when the first answer was incorrect.
struct ValidationRecord {
  std::string exercise_id;
  std::string student_model;
  double temperature = 0.0;
  int attempt_index = 0;
  core::Verdict before;
  bool hint_given = false;
  std::string hint_text;
  std::string revised_answer;
  std::optional<core::Verdict> after;

  json to_json() const;
  static ValidationRecord from_json(const json& j);
};

}  // namespace hintlab::pipeline
