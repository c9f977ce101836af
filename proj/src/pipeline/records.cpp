#include "hintlab/pipeline/records.hpp"

#include "hintlab/errors.hpp"
#include "hintlab/strings.hpp"

namespace hintlab::pipeline {

namespace {

std::vector<std::string> labels_of(const core::ErrorSet& set) {
  std::vector<std::string> out;
  for (core::ErrorType t : set.members()) {
    out.push_back(core::error_type_label(t));
  }
  return out;
}

core::ErrorSet set_from_labels(const json& labels) {
  std::vector<core::ErrorType> types;
  for (const auto& item : labels) {
    types.push_back(core::parse_error_label(item.get<std::string>()));
  }
  return core::ErrorSet::canonicalize(types);
}

}  // namespace

json verdict_to_json(const core::Verdict& verdict) {
  if (const auto* c = std::get_if<core::Correct>(&verdict)) {
    return json{{"status", "correct"}, {"matched_answer", c->matched_answer}};
  }
  if (const auto* i = std::get_if<core::Incorrect>(&verdict)) {
    return json{{"status", "incorrect"}, {"errors", labels_of(i->errors)}};
  }
  const auto& u = std::get<core::Undecodable>(verdict);
  return json{{"status", "undecodable"}, {"raw", u.raw}};
}

core::Verdict verdict_from_json(const json& j) {
  const std::string status = j.at("status").get<std::string>();
  if (status == "correct") {
    return core::Correct{j.at("matched_answer").get<std::string>()};
  }
  if (status == "incorrect") {
    return core::Incorrect{set_from_labels(j.at("errors"))};
  }
  if (status == "undecodable") {
    return core::Undecodable{j.at("raw").get<std::string>()};
  }
  throw ConfigError("unknown verdict status: " + status);
}

json AttemptRecord::to_json() const {
  return json{{"exercise_id", exercise_id},
              {"student_model", student_model},
              {"temperature", temperature},
              {"attempt_index", attempt_index},
              {"reasoning", reasoning},
              {"answer", answer},
              {"verdict", verdict_to_json(verdict)},
              {"unknown_labels", unknown_labels}};
}

AttemptRecord AttemptRecord::from_json(const json& j) {
  AttemptRecord r;
  r.exercise_id = j.at("exercise_id").get<std::string>();
  r.student_model = j.at("student_model").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.attempt_index = j.at("attempt_index").get<int>();
  r.reasoning = j.at("reasoning").get<std::string>();
  r.answer = j.at("answer").get<std::string>();
  r.verdict = verdict_from_json(j.at("verdict"));
  r.unknown_labels = j.at("unknown_labels").get<std::vector<std::string>>();
  return r;
}

std::string make_entry_id(const std::string& exercise_id,
                          const std::string& student_model, double temperature,
                          const core::ErrorSet& errors) {
  return exercise_id + "/" + student_model + "/T" +
         format_temperature(temperature) + "/" + errors.label();
}

json ErrorDatasetEntry::to_json() const {
  return json{{"entry_id", entry_id},
              {"exercise_id", exercise_id},
              {"student_model", student_model},
              {"temperature", temperature},
              {"errors", labels_of(errors)},
              {"reasoning", reasoning},
              {"answer", answer},
              {"attempt_index", attempt_index}};
}

ErrorDatasetEntry ErrorDatasetEntry::from_json(const json& j) {
  ErrorDatasetEntry e;
  e.entry_id = j.at("entry_id").get<std::string>();
  e.exercise_id = j.at("exercise_id").get<std::string>();
  e.student_model = j.at("student_model").get<std::string>();
  e.temperature = j.at("temperature").get<double>();
  e.errors = set_from_labels(j.at("errors"));
  e.reasoning = j.at("reasoning").get<std::string>();
  e.answer = j.at("answer").get<std::string>();
  e.attempt_index = j.at("attempt_index").get<int>();
  return e;
}

json TournamentRecord::to_json() const {
  return json{{"entry_id", entry_id},
              {"exercise_id", exercise_id},
              {"student_model", student_model},
              {"temperature", temperature},
              {"prompt_kind", prompts::prompt_kind_name(prompt_kind)},
              {"repetition", repetition},
              {"hint_text", hint_text},
              {"local_failures", local_failures},
              {"revised_answer", revised_answer},
              {"hint_verdict", hint_verdict},
              {"undecodable_stage", undecodable_stage}};
}

TournamentRecord TournamentRecord::from_json(const json& j) {
  TournamentRecord r;
  r.entry_id = j.at("entry_id").get<std::string>();
  r.exercise_id = j.at("exercise_id").get<std::string>();
  r.student_model = j.at("student_model").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  const auto kind_name = j.at("prompt_kind").get<std::string>();
  const auto kind = prompts::parse_prompt_kind(kind_name);
  if (!kind) {
    throw UnknownLabel("unknown prompt kind \"" + kind_name + "\" in a stored record",
                       kind_name);
  }
  r.prompt_kind = *kind;
  r.repetition = j.at("repetition").get<int>();
  r.hint_text = j.at("hint_text").get<std::string>();
  r.local_failures = j.at("local_failures").get<std::vector<std::string>>();
  r.revised_answer = j.at("revised_answer").get<std::string>();
  r.hint_verdict = j.at("hint_verdict").get<std::string>();
  r.undecodable_stage = j.at("undecodable_stage").get<std::string>();
  return r;
}

json ValidationRecord::to_json() const {
  json j{{"exercise_id", exercise_id},
         {"student_model", student_model},
         {"temperature", temperature},
         {"attempt_index", attempt_index},
         {"before", verdict_to_json(before)},
         {"hint_given", hint_given},
         {"hint_text", hint_text},
         {"revised_answer", revised_answer}};
  if (after.has_value()) {
    j["after"] = verdict_to_json(*after);
  }
  return j;
}

ValidationRecord ValidationRecord::from_json(const json& j) {
  ValidationRecord r;
  r.exercise_id = j.at("exercise_id").get<std::string>();
  r.student_model = j.at("student_model").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.attempt_index = j.at("attempt_index").get<int>();
  r.before = verdict_from_json(j.at("before"));
  r.hint_given = j.at("hint_given").get<bool>();
  r.hint_text = j.at("hint_text").get<std::string>();
  r.revised_answer = j.at("revised_answer").get<std::string>();
  if (j.contains("after")) {
    r.after = verdict_from_json(j.at("after"));
  }
  return r;
}

}  // namespace hintlab::pipeline
