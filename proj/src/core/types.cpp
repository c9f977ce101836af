#include "hintlab/core/types.hpp"

#include <fstream>
#include <set>

#include "hintlab/errors.hpp"
#include "json.hpp"

namespace hintlab::core {

namespace {

std::string require_string(const nlohmann::json& j, const char* key,
                           const std::string& path) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ConfigError("exercise fixture " + path + ": missing string field '" +
                      key + "'");
  }
  return j[key].get<std::string>();
}

}  // namespace

std::vector<Exercise> load_exercises(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open exercise fixture: " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("exercise fixture " + path + " is not valid JSON: " +
                      e.what());
  }
  if (!doc.is_array()) {
    throw ConfigError("exercise fixture " + path + ": expected a JSON array");
  }

  std::vector<Exercise> out;
  std::set<std::string> ids;
  for (const auto& rec : doc) {
    Exercise ex;
    ex.id = require_string(rec, "id", path);
    ex.module_label = require_string(rec, "module_label", path);
    ex.statement = require_string(rec, "statement", path);
    ex.instruction = require_string(rec, "instruction", path);
    ex.cognitive_approach = require_string(rec, "cognitive_approach", path);
    ex.language_tag = require_string(rec, "language_tag", path);
    if (!rec.contains("accepted_answers") || !rec["accepted_answers"].is_array() ||
        rec["accepted_answers"].empty()) {
      throw ConfigError("exercise fixture " + path + ": exercise '" + ex.id +
                        "' needs a non-empty accepted_answers array");
    }
    for (const auto& a : rec["accepted_answers"]) {
      if (!a.is_string() || a.get<std::string>().empty()) {
        throw ConfigError("exercise fixture " + path + ": exercise '" + ex.id +
                          "' has a non-string or empty accepted answer");
      }
      ex.accepted_answers.push_back(a.get<std::string>());
    }
    if (!ids.insert(ex.id).second) {
      throw ConfigError("exercise fixture " + path + ": duplicate exercise id '" +
                        ex.id + "'");
    }
    out.push_back(std::move(ex));
  }
  if (out.empty()) {
    throw ConfigError("exercise fixture " + path + ": no exercises");
  }
  return out;
}

}  // namespace hintlab::core
