#pragma once

#include <string>
#include <variant>
#include <vector>

#include "hintlab/core/taxonomy.hpp"

namespace hintlab::core {

// One math exercise as bundled in the fixture file: the statement shown to
// the student, the answering instruction, the documented cognitive approach
// interpolated into teacher prompts, and the accepted answers.
struct Exercise {
  std::string id;
  std::string module_label;
  std::string statement;
  std::string instruction;
  std::string cognitive_approach;
  std::vector<std::string> accepted_answers;  // non-empty
  std::string language_tag;                   // "fr" or "en"

  bool operator==(const Exercise&) const = default;
};

// One student solve: the raw reasoning/answer pair plus where it came from.
struct Attempt {
  std::string exercise_id;
  std::string student_model_id;
  double temperature = 0.0;
  std::string reasoning;
  std::string answer;
  int attempt_index = 0;

  bool operator==(const Attempt&) const = default;
};

// Grading outcome of one attempt (or one revision).
struct Correct {
  std::string matched_answer;  // non-empty
  bool operator==(const Correct&) const = default;
};
struct Incorrect {
  ErrorSet errors;  // non-empty
  bool operator==(const Incorrect&) const = default;
};
struct Undecodable {
  std::string raw;
  bool operator==(const Undecodable&) const = default;
};

using Verdict = std::variant<Correct, Incorrect, Undecodable>;

inline bool is_correct(const Verdict& v) {
  return std::holds_alternative<Correct>(v);
}
inline bool is_incorrect(const Verdict& v) {
  return std::holds_alternative<Incorrect>(v);
}
inline bool is_undecodable(const Verdict& v) {
  return std::holds_alternative<Undecodable>(v);
}

// Loads exercises from a JSON fixture (array of records, one per exercise).
// Validates the type invariants: unique ids, non-empty accepted answers.
std::vector<Exercise> load_exercises(const std::string& path);

}  // namespace hintlab::core
