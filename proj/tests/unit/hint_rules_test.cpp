#include "doctest.h"

#include <string>
#include <vector>

#include "hintlab/core/types.hpp"
#include "hintlab/errors.hpp"
#include "hintlab/prompts/hint_rules.hpp"

using namespace hintlab;
using namespace hintlab::prompts;

namespace {

core::Exercise quiche_exercise() {
  auto exercises = core::load_exercises(std::string(HINTLAB_FIXTURES_DIR) +
                                        "/exercises_en.json");
  return exercises.front();  // accepted answer mentions 1/4 of each quiche
}

}  // namespace

TEST_CASE("failure names are stable") {
  CHECK(hint_failure_name(HintFailure::NotAQuestion) == "not_a_question");
  CHECK(hint_failure_name(HintFailure::AnswerLeak) == "answer_leak");
}

TEST_CASE("a statement-shaped hint is flagged as not a question") {
  auto ex = quiche_exercise();
  auto verdict = validate_hint("Think about how the parts relate.", ex);
  CHECK_FALSE(verdict.pass);
  CHECK(verdict.has(HintFailure::NotAQuestion));
  CHECK_FALSE(verdict.reasons.empty());
}

TEST_CASE("an empty hint is rejected outright") {
  auto ex = quiche_exercise();
  CHECK_THROWS_AS(validate_hint("", ex), EmptyInput);
}

TEST_CASE("hints repeating an answer fragment are leaks") {
  auto ex = quiche_exercise();
  auto leak = validate_hint("Is the answer 1/4 of each quiche?", ex);
  CHECK_FALSE(leak.pass);
  CHECK(leak.has(HintFailure::AnswerLeak));

  auto whole = validate_hint(
      "Is it true that Elias will eat 1/4 of the first quiche and 1/4 of the "
      "second quiche?",
      ex);
  CHECK(whole.has(HintFailure::AnswerLeak));

  // Case and spacing games do not dodge the normalized comparison.
  auto spaced = validate_hint("Would   1/4 work here?", ex);
  CHECK(spaced.has(HintFailure::AnswerLeak));
}

TEST_CASE("both failures can stack on one hint") {
  auto ex = quiche_exercise();
  auto verdict = validate_hint("The answer is 1/4.", ex);
  CHECK_FALSE(verdict.pass);
  CHECK(verdict.has(HintFailure::NotAQuestion));
  CHECK(verdict.has(HintFailure::AnswerLeak));
  CHECK(verdict.reasons.size() == 2);
}

TEST_CASE("the teacher hint corpus for the quiche exercise") {
  auto ex = quiche_exercise();
  // Hints a teacher model produced for this exercise; all are questions, and
  // exactly one gives the game away by naming the fraction.
  const std::vector<std::string> corpus{
      "How can you use the notion of a quarter to break down the portion "
      "Elias eats from each quiche?",
      "Can you explain why it is reasonable to think that Elias will eat the "
      "same portion of each quiche, even if it means he doesn't eat the "
      "entire quarter of the quiches?",
      "What does it mean if Elias decided to eat a quarter of the quiches, "
      "not an equal part of each quiche?",
      "Can you explain why the 1/4 answer is justified by the phrase \"He "
      "decides to eat a quarter of the quiches\"?",
      "Can you explain why you divided a quarter by two to find the portion "
      "of each quiche that you will eat?",
      "How can we think of sharing the quiches as an equitable distribution "
      "of the entire quiches, even if the portions are not equal?",
      "How can you divide what he will eat into equal parts coming from two "
      "identical quiches?",
      "If Elias eats a quarter of the quiches, what fraction of each quiche "
      "does that represent?",
      "What fraction of each quiche should he eat if he wants the sum of the "
      "fractions eaten from both quiches to equal a quarter of the total "
      "quiches?",
      "Elias eats an equal part of each quiche and consumes a quarter in "
      "total. How can you divide the total consumption for each quiche?",
      "How can Elias divide the total amount he wants to eat, which is a "
      "quarter of all the quiches, equally between the two quiches?",
      "What would the calculation be if Elias decided to eat a quarter of "
      "the total amount of the two quiches together rather than eating a "
      "quarter of each quiche individually?",
  };
  int leaks = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    auto verdict = validate_hint(corpus[i], ex);
    if (i == 3) {
      CHECK_FALSE(verdict.pass);
      CHECK(verdict.has(HintFailure::AnswerLeak));
      ++leaks;
    } else {
      CHECK(verdict.pass);
      CHECK(verdict.reasons.empty());
    }
  }
  CHECK(leaks == 1);
}

TEST_CASE("leak fragments keep only digit-bearing tokens") {
  core::Exercise ex;
  ex.id = "t";
  ex.accepted_answers = {"There are 120r flowers, i.e. 30(3r + r)."};
  auto fragments = answer_leak_fragments(ex);
  // Tokens like "are" or "flowers" carry no digits and are skipped; short
  // or digit-free leftovers likewise.
  for (auto& f : fragments) {
    CHECK(f.size() >= 2);
    bool digit = false;
    for (char c : f) digit = digit || (c >= '0' && c <= '9');
    CHECK(digit);
  }
  auto has = [&fragments](const std::string& s) {
    for (auto& f : fragments)
      if (f == s) return true;
    return false;
  };
  CHECK(has("120r"));
  CHECK(has("30(3r"));  // interior structure survives, only edges are trimmed
}
