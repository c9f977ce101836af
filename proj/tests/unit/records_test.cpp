#include "doctest.h"

#include "hintlab/core/taxonomy.hpp"
#include "hintlab/pipeline/records.hpp"

using namespace hintlab;
using namespace hintlab::pipeline;
using core::ErrorSet;
using core::ErrorType;

TEST_CASE("verdicts round-trip through json") {
  core::Verdict correct = core::Correct{"1/4 of each quiche"};
  core::Verdict incorrect = core::Incorrect{
      ErrorSet::canonicalize({ErrorType::Calculation, ErrorType::Comprehension})};
  core::Verdict undecodable = core::Undecodable{"{oops"};

  CHECK(verdict_from_json(verdict_to_json(correct)) == correct);
  CHECK(verdict_from_json(verdict_to_json(incorrect)) == incorrect);
  CHECK(verdict_from_json(verdict_to_json(undecodable)) == undecodable);
}

TEST_CASE("attempt records round-trip with their audit trail") {
  AttemptRecord r;
  r.exercise_id = "ex1-mod1";
  r.student_model = "student-a";
  r.temperature = 0.8;
  r.attempt_index = 17;
  r.reasoning = "I halved the half.";
  r.answer = "1/8 each";
  r.verdict = core::Incorrect{ErrorSet::canonicalize({ErrorType::Calculation})};
  r.unknown_labels = {"Cosmic Error"};

  auto back = AttemptRecord::from_json(r.to_json());
  CHECK(back.exercise_id == r.exercise_id);
  CHECK(back.student_model == r.student_model);
  CHECK(back.temperature == r.temperature);
  CHECK(back.attempt_index == r.attempt_index);
  CHECK(back.reasoning == r.reasoning);
  CHECK(back.answer == r.answer);
  CHECK(back.verdict == r.verdict);
  CHECK(back.unknown_labels == r.unknown_labels);
}

TEST_CASE("error dataset entries round-trip") {
  ErrorDatasetEntry e;
  e.exercise_id = "ex1-mod1";
  e.student_model = "student-a";
  e.temperature = 0.2;
  e.errors = ErrorSet::canonicalize({ErrorType::Interpretation});
  e.reasoning = "Misread the sharing rule.";
  e.answer = "1/2 of one quiche";
  e.attempt_index = 4;
  e.entry_id = make_entry_id(e.exercise_id, e.student_model, e.temperature,
                             e.errors);

  auto back = ErrorDatasetEntry::from_json(e.to_json());
  CHECK(back.entry_id == e.entry_id);
  CHECK(back.errors == e.errors);
  CHECK(back.reasoning == e.reasoning);
  CHECK(back.attempt_index == e.attempt_index);
}

TEST_CASE("entry ids name the cell and the error set") {
  auto id = make_entry_id("ex1-mod1", "student-a", 0.2,
                          ErrorSet::canonicalize({ErrorType::Calculation}));
  CHECK(id == "ex1-mod1/student-a/T0.2/Calculation Error");
  // Identical content makes identical ids, whatever the label order was.
  auto a = make_entry_id("e", "m", 1.0,
                         ErrorSet::canonicalize({ErrorType::Calculation,
                                   ErrorType::Interpretation}));
  auto b = make_entry_id("e", "m", 1.0,
                         ErrorSet::canonicalize({ErrorType::Interpretation,
                                   ErrorType::Calculation}));
  CHECK(a == b);
}

TEST_CASE("tournament records round-trip") {
  TournamentRecord t;
  t.entry_id = "ex1-mod1/student-a/T0.2/Calculation Error";
  t.exercise_id = "ex1-mod1";
  t.student_model = "student-a";
  t.temperature = 0.2;
  t.prompt_kind = prompts::PromptKind::HintCalcul;
  t.repetition = 7;
  t.hint_text = "Can you check the division once more?";
  t.local_failures = {"answer_leak"};
  t.revised_answer = "1/4 of each quiche";
  t.hint_verdict = "correct_hint";
  t.undecodable_stage = "";

  auto back = TournamentRecord::from_json(t.to_json());
  CHECK(back.entry_id == t.entry_id);
  CHECK(back.prompt_kind == t.prompt_kind);
  CHECK(back.repetition == t.repetition);
  CHECK(back.local_failures == t.local_failures);
  CHECK(back.hint_verdict == t.hint_verdict);
  CHECK(back.to_json() == t.to_json());
}

TEST_CASE("validation records carry the after verdict only when present") {
  ValidationRecord v;
  v.exercise_id = "ex1-mod1";
  v.student_model = "student-a";
  v.temperature = 0.5;
  v.attempt_index = 3;
  v.before = core::Incorrect{ErrorSet::canonicalize({ErrorType::Comprehension})};
  v.hint_given = true;
  v.hint_text = "What does the whole consist of?";
  v.revised_answer = "1/4 of each quiche";
  v.after = core::Correct{"1/4 of each quiche"};

  auto back = ValidationRecord::from_json(v.to_json());
  REQUIRE(back.after.has_value());
  CHECK(back.after == v.after);
  CHECK(back.before == v.before);
  CHECK(back.hint_given);

  ValidationRecord plain;
  plain.exercise_id = "ex1-mod1";
  plain.student_model = "student-a";
  plain.temperature = 0.5;
  plain.attempt_index = 4;
  plain.before = core::Correct{"1/4 of each quiche"};
  auto plain_back = ValidationRecord::from_json(plain.to_json());
  CHECK_FALSE(plain_back.after.has_value());
  CHECK_FALSE(plain_back.hint_given);
}
