#include "doctest.h"

#include "hintlab/errors.hpp"
#include "hintlab/llm/context.hpp"
#include "hintlab/prompts/templates.hpp"

using namespace hintlab;
using namespace hintlab::llm;

namespace {

core::Exercise tiny_exercise() {
  core::Exercise ex;
  ex.id = "exA";
  ex.module_label = "module A";
  ex.statement = "Split a cake fairly.";
  ex.instruction = "Answer with a fraction.";
  ex.cognitive_approach = "Think in equal shares.";
  ex.accepted_answers = {"1/2"};
  ex.language_tag = "en";
  return ex;
}

core::Attempt attempt_for(const core::Exercise& ex) {
  core::Attempt a;
  a.exercise_id = ex.id;
  a.student_model_id = "student";
  a.temperature = 0.8;
  a.reasoning = "I assumed three guests.";
  a.answer = "1/3 of the cake.";
  a.attempt_index = 0;
  return a;
}

MessageList review_prompt() {
  return {{Role::System, "You are a student revising your answer."},
          {Role::User, "A teacher has given you a hint: recount the guests."}};
}

}  // namespace

TEST_CASE("the revision context is exactly three turns") {
  auto ex = tiny_exercise();
  auto attempt = attempt_for(ex);
  auto prompt = review_prompt();

  auto context = build_revision_context(ex, attempt, prompt);
  REQUIRE(context.size() == 3);
  CHECK(context[0] == prompt[0]);
  CHECK(context[1].role == Role::Assistant);
  CHECK(context[1].content == attempt.reasoning + "\n" + attempt.answer);
  CHECK(context[2] == prompt[1]);
}

TEST_CASE("an attempt without reasoning replays only the answer") {
  auto ex = tiny_exercise();
  auto attempt = attempt_for(ex);
  attempt.reasoning.clear();
  auto context = build_revision_context(ex, attempt, review_prompt());
  CHECK(context[1].content == attempt.answer);
}

TEST_CASE("mismatched exercise and malformed prompts are rejected") {
  auto ex = tiny_exercise();
  auto attempt = attempt_for(ex);
  attempt.exercise_id = "other";
  CHECK_THROWS_AS(build_revision_context(ex, attempt, review_prompt()),
                  ConfigError);

  attempt.exercise_id = ex.id;
  MessageList wrong_shape{{Role::User, "only one message"}};
  CHECK_THROWS_AS(build_revision_context(ex, attempt, wrong_shape), ConfigError);

  MessageList swapped{{Role::User, "u"}, {Role::System, "s"}};
  CHECK_THROWS_AS(build_revision_context(ex, attempt, swapped), ConfigError);
}
