#include "doctest.h"

#include <algorithm>
#include <string>
#include <vector>

#include "hintlab/core/types.hpp"
#include "hintlab/errors.hpp"
#include "hintlab/prompts/hint_rules.hpp"

using namespace hintlab;
using namespace hintlab::core;

namespace {

std::string fixtures_dir() { return HINTLAB_FIXTURES_DIR; }

std::vector<std::string> ids_of(const std::vector<Exercise>& exs) {
  std::vector<std::string> ids;
  for (auto& e : exs) ids.push_back(e.id);
  return ids;
}

}  // namespace

TEST_CASE("the bundled exercise sets load in both languages") {
  auto en = load_exercises(fixtures_dir() + "/exercises_en.json");
  auto fr = load_exercises(fixtures_dir() + "/exercises_fr.json");
  REQUIRE(en.size() == 4);
  REQUIRE(fr.size() == 4);
  std::vector<std::string> expected{"ex1-mod1", "ex2-mod2", "ex1-mod2",
                                    "ex3-mod7"};
  CHECK(ids_of(en) == expected);
  CHECK(ids_of(fr) == expected);
  for (auto& e : en) {
    CHECK(e.language_tag == "en");
    CHECK_FALSE(e.statement.empty());
    CHECK_FALSE(e.instruction.empty());
    CHECK_FALSE(e.cognitive_approach.empty());
    CHECK_FALSE(e.accepted_answers.empty());
  }
  for (auto& e : fr) CHECK(e.language_tag == "fr");
}

TEST_CASE("accepted answers carry the tokens leak detection keys on") {
  auto en = load_exercises(fixtures_dir() + "/exercises_en.json");
  auto& quiche = en[0];
  auto fragments = prompts::answer_leak_fragments(quiche);
  CHECK(std::find(fragments.begin(), fragments.end(), "1/4") !=
        fragments.end());

  auto& plants = en[1];
  auto plant_fragments = prompts::answer_leak_fragments(plants);
  CHECK(std::find(plant_fragments.begin(), plant_fragments.end(), "5p") !=
        plant_fragments.end());
  CHECK(std::find(plant_fragments.begin(), plant_fragments.end(), "5p/3") !=
        plant_fragments.end());

  auto& trucks = en[3];
  auto truck_fragments = prompts::answer_leak_fragments(trucks);
  CHECK(std::find(truck_fragments.begin(), truck_fragments.end(), "500/3") !=
        truck_fragments.end());
}

TEST_CASE("loading a missing file is an io error") {
  CHECK_THROWS_AS(load_exercises(fixtures_dir() + "/no_such_file.json"),
                  IoError);
}
