#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hintlab/core/types.hpp"
#include "hintlab/errors.hpp"
#include "hintlab/prompts/prompt_kind.hpp"
#include "hintlab/prompts/templates.hpp"
#include "hintlab/strings.hpp"

using namespace hintlab;
using namespace hintlab::prompts;

namespace {

std::string templates_dir() { return HINTLAB_TEMPLATES_DIR; }
std::string fixtures_dir() { return HINTLAB_FIXTURES_DIR; }

core::Exercise sample_exercise(const std::string& lang) {
  auto exercises =
      core::load_exercises(fixtures_dir() + "/exercises_" + lang + ".json");
  return exercises.front();
}

core::Attempt sample_attempt(const core::Exercise& ex) {
  core::Attempt a;
  a.exercise_id = ex.id;
  a.student_model_id = "student-x";
  a.temperature = 0.5;
  a.reasoning = "I split each quiche into eighths by mistake.";
  a.answer = "He eats 1/8 of each quiche.";
  a.attempt_index = 3;
  return a;
}

std::string whole_prompt(const llm::MessageList& messages) {
  std::string all;
  for (auto& m : messages) all += m.content + "\n";
  return all;
}

}  // namespace

TEST_CASE("every prompt kind loads in both languages") {
  for (const std::string lang : {"en", "fr"}) {
    auto set = TemplateSet::load(templates_dir(), lang);
    CHECK(set.language() == lang);
    for (int i = 0; i < kPromptKindCount; ++i) {
      auto& tpl = set.get(static_cast<PromptKind>(i));
      CHECK_FALSE(tpl.system_text.empty());
      CHECK_FALSE(tpl.user_text.empty());
    }
  }
}

TEST_CASE("rendered prompts interpolate the exercise material") {
  auto set = TemplateSet::load(templates_dir(), "en");
  auto ex = sample_exercise("en");

  RenderInput solve_input;
  solve_input.exercise = ex;
  auto solve = render(PromptKind::Solve, solve_input, set);
  REQUIRE(solve.size() == 2);
  CHECK(solve[0].role == llm::Role::System);
  CHECK(solve[1].role == llm::Role::User);
  CHECK(contains(solve[1].content, ex.statement));
  CHECK(contains(solve[1].content, ex.instruction));
  // The solve prompt must never carry the accepted answers.
  for (auto& accepted : ex.accepted_answers)
    CHECK_FALSE(contains(whole_prompt(solve), accepted));

  SUBCASE("rendering is pure") {
    auto again = render(PromptKind::Solve, solve_input, set);
    CHECK(again == solve);
  }
}

TEST_CASE("specialized hints carry the attempt, baselines refuse it") {
  auto set = TemplateSet::load(templates_dir(), "en");
  auto ex = sample_exercise("en");
  auto attempt = sample_attempt(ex);

  RenderInput input;
  input.exercise = ex;
  input.attempt = attempt;
  for (auto kind : specialized_hint_kinds()) {
    auto messages = render(kind, input, set);
    auto all = whole_prompt(messages);
    CHECK(contains(all, attempt.reasoning));
    CHECK(contains(all, attempt.answer));
  }
  for (auto kind : baseline_hint_kinds()) {
    CHECK_THROWS_AS(render(kind, input, set), ForbiddenField);
    RenderInput bare;
    bare.exercise = ex;
    auto messages = render(kind, bare, set);
    auto all = whole_prompt(messages);
    CHECK_FALSE(contains(all, attempt.reasoning));
    CHECK(contains(all, ex.cognitive_approach));
  }
}

TEST_CASE("specialized hints demand the attempt") {
  auto set = TemplateSet::load(templates_dir(), "en");
  RenderInput input;
  input.exercise = sample_exercise("en");
  CHECK_THROWS_AS(render(PromptKind::HintCalcul, input, set), MissingField);
}

TEST_CASE("grader prompts put each marker and value on one line") {
  auto set = TemplateSet::load(templates_dir(), "en");
  auto ex = sample_exercise("en");
  auto attempt = sample_attempt(ex);

  RenderInput check_input;
  check_input.exercise = ex;
  check_input.attempt = attempt;
  auto check = render(PromptKind::CheckAndDetect, check_input, set);
  auto check_text = whole_prompt(check);
  CHECK(contains(check_text, "The correct answer(s) for the exercise: " +
                                 join(ex.accepted_answers, "; ")));
  CHECK(contains(check_text, "The student's answer: " + attempt.answer));

  RenderInput classify_input;
  classify_input.exercise = ex;
  classify_input.hint = "Could you look once more at how a quarter splits?";
  classify_input.revised_answer = "He eats 1/8 of each quiche.";
  auto classify = render(PromptKind::ClassifyHint, classify_input, set);
  auto classify_text = whole_prompt(classify);
  CHECK(contains(classify_text,
                 "The student's revised answer: " + *classify_input.revised_answer));
  CHECK(contains(classify_text, "The hint: " + *classify_input.hint));

  RenderInput review_input;
  review_input.exercise = ex;
  review_input.hint = "What does a quarter of two quiches look like?";
  auto review = render(PromptKind::Review, review_input, set);
  CHECK(contains(whole_prompt(review), *review_input.hint));
}

TEST_CASE("the diversification prompt serializes its example list") {
  auto set = TemplateSet::load(templates_dir(), "en");
  RenderInput input;
  input.exercise = sample_exercise("en");
  input.k_examples = 3;
  DiversifyExample example;
  example.reasoning = "Halved the fraction twice.";
  example.response = "1/16 of each quiche";
  example.evaluation = "Calculation Error";
  input.examples = std::vector<DiversifyExample>{example};
  auto messages = render(PromptKind::Diversify, input, set);
  auto text = whole_prompt(messages);
  CHECK(contains(text, "The list of reasonings is: "));
  CHECK(contains(text, "\"gpt_initial_reasoning\""));
  CHECK(contains(text, "Halved the fraction twice."));
  CHECK(contains(text, "Calculation Error"));
  CHECK(contains(text, "3"));
}

TEST_CASE("doubled braces render as literal braces") {
  // The prompts include JSON output examples written with {{ }} in the
  // assets; after rendering they must be plain { }.
  auto set = TemplateSet::load(templates_dir(), "en");
  RenderInput input;
  input.exercise = sample_exercise("en");
  auto messages = render(PromptKind::Solve, input, set);
  auto text = whole_prompt(messages);
  CHECK(contains(text, "{"));
  CHECK(contains(text, "}"));
  CHECK_FALSE(contains(text, "{{"));
  CHECK_FALSE(contains(text, "}}"));
  CHECK_FALSE(contains(text, "{exercise}"));
  CHECK_FALSE(contains(text, "{instruct}"));
}

TEST_CASE("french templates render french prompts") {
  auto set = TemplateSet::load(templates_dir(), "fr");
  auto ex = sample_exercise("fr");
  auto attempt = sample_attempt(ex);

  RenderInput input;
  input.exercise = ex;
  input.attempt = attempt;
  auto check = render(PromptKind::CheckAndDetect, input, set);
  auto text = whole_prompt(check);
  CHECK(contains(text, "La ou les bonnes réponses de l'exercice : " +
                           join(ex.accepted_answers, "; ")));
  CHECK(contains(text, "La réponse de l'élève : " + attempt.answer));

  // The solve prompt carries the exercise itself.
  auto solve = render(PromptKind::Solve, input, set);
  CHECK(contains(whole_prompt(solve), ex.statement));
  CHECK(contains(whole_prompt(solve), ex.instruction));
}

TEST_CASE("a missing language directory fails loudly") {
  CHECK_THROWS_AS(TemplateSet::load(templates_dir(), "xx"), Error);
}

TEST_CASE("a template naming an unsupported placeholder is rejected") {
  namespace fs = std::filesystem;
  auto root = fs::temp_directory_path() /
              ("hintlab-tpl-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  fs::copy(fs::path(templates_dir()) / "en", root / "en",
           fs::copy_options::recursive);
  {
    std::ofstream out(root / "en" / "solve.txt", std::ios::app);
    out << " {mystery}";
  }
  auto set = TemplateSet::load(root.string(), "en");
  RenderInput input;
  input.exercise = sample_exercise("en");
  CHECK_THROWS_AS(render(PromptKind::Solve, input, set), ConfigError);
  fs::remove_all(root);
}
