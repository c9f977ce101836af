#include "hintlab/llm/mock_backend.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include "hintlab/core/taxonomy.hpp"
#include "hintlab/errors.hpp"
#include "hintlab/prompts/hint_rules.hpp"
#include "hintlab/strings.hpp"

namespace hintlab::llm {

namespace {

using core::ErrorSet;
using core::parse_error_labels;
using nlohmann::json;
using prompts::PromptKind;

struct KindMarker {
  PromptKind kind;
  const char* marker;
};

// Distinctive template phrases, one per kind per language. Structural kinds
// come first so interpolated hint text can never shadow them.
const KindMarker kMarkers[] = {
    {PromptKind::Solve, "Your objective is to answer the questions in the exercises"},
    {PromptKind::Solve, "Ton objectif est de répondre aux questions"},
    {PromptKind::Review, "A teacher has given you a hint"},
    {PromptKind::Review, "Un professeur t'a donné un indice"},
    {PromptKind::CheckAndDetect, "Categorize the student's error"},
    {PromptKind::CheckAndDetect, "Catégorise l'erreur de l'élève"},
    {PromptKind::ClassifyHint, "student's revised answer to a mathematics exercise"},
    {PromptKind::ClassifyHint, "la réponse révisée d'un élève"},
    {PromptKind::Diversify, "classify a list of reasonings"},
    {PromptKind::Diversify, "classer une liste de raisonnements"},
    {PromptKind::HintReason, "correct their reasoning mistakes"},
    {PromptKind::HintReason, "corriger ses erreurs de raisonnement"},
    {PromptKind::HintMethod, "review the method they are using"},
    {PromptKind::HintMethod, "revoir la méthode qu'il utilise"},
    {PromptKind::HintConcept, "review the application of mathematical concepts"},
    {PromptKind::HintConcept, "revoir l'application des concepts mathématiques"},
    {PromptKind::HintCalcul, "review the calculations performed"},
    {PromptKind::HintCalcul, "revoir les calculs effectués"},
    {PromptKind::HintInterp, "review their interpretation of the math problem"},
    {PromptKind::HintInterp, "revoir son interprétation du problème"},
    {PromptKind::HintAll, "Consider the following aspects"},
    {PromptKind::HintAll, "Prends en compte les aspects suivants"},
    {PromptKind::HintPartRes, "complete their partial answer"},
    {PromptKind::HintPartRes, "compléter sa réponse partielle"},
    {PromptKind::BaselineOne, "generate progressive hints"},
    {PromptKind::BaselineOne, "des indices progressifs"},
    {PromptKind::BaselineTwo, "identify the common mistakes"},
    {PromptKind::BaselineTwo, "identifier les erreurs courantes"},
};

// Prompt-section markers the built-in grader reads values from.
const char* kAcceptedMarkers[] = {"The correct answer(s) for the exercise:",
                                  "La ou les bonnes réponses de l'exercice :"};
const char* kStudentAnswerMarkers[] = {"The student's answer:",
                                       "La réponse de l'élève :"};
const char* kRevisedMarkers[] = {"The student's revised answer:",
                                 "La réponse révisée de l'élève :"};
const char* kHintMarkers[] = {"The hint:", "L'indice :"};
const char* kListMarkers[] = {"The list of reasonings is:",
                              "La liste des raisonnements est :"};

std::optional<PromptKind> detect_kind(const MessageList& messages) {
  for (const auto& m : kMarkers) {
    for (const auto& msg : messages) {
      if (contains(msg.content, m.marker)) return m.kind;
    }
  }
  return std::nullopt;
}

// Value of the first marker found: the rest of its line, trimmed.
std::optional<std::string> line_value(const std::string& text,
                                      const char* const* markers, int count) {
  for (int i = 0; i < count; ++i) {
    size_t pos = text.find(markers[i]);
    if (pos == std::string::npos) continue;
    size_t begin = pos + std::string(markers[i]).size();
    size_t end = text.find('\n', begin);
    if (end == std::string::npos) end = text.size();
    return trim(text.substr(begin, end - begin));
  }
  return std::nullopt;
}

std::string user_text(const MessageList& messages) {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::User) return it->content;
  }
  return messages.empty() ? std::string() : messages.back().content;
}

std::vector<std::string> accepted_answers_from_prompt(const std::string& text) {
  auto line = line_value(text, kAcceptedMarkers, 2);
  if (!line) return {};
  std::vector<std::string> out;
  for (const auto& piece : split_any(*line, ";")) {
    std::string t = trim(piece);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

bool answer_matches(const std::vector<std::string>& accepted,
                    const std::string& answer) {
  std::string normalized = normalize_text(answer);
  for (const auto& a : accepted) {
    std::string na = normalize_text(a);
    if (!na.empty() && contains(normalized, na)) return true;
  }
  return false;
}

bool hint_leaks(const std::vector<std::string>& accepted,
                const std::string& hint) {
  std::string normalized = normalize_text(hint);
  for (const auto& a : accepted) {
    if (contains(normalized, normalize_text(a))) return true;
  }
  core::Exercise probe;
  probe.accepted_answers = accepted;
  for (const auto& fragment : prompts::answer_leak_fragments(probe)) {
    if (contains(normalized, fragment)) return true;
  }
  return false;
}

// "(errors: Calculation Error, Interpretation Error)" -> the label list the
// scripted student embedded in its reasoning for the grader to find.
std::optional<std::string> embedded_error_labels(const std::string& text) {
  const std::string marker = "(errors:";
  size_t pos = text.find(marker);
  if (pos == std::string::npos) return std::nullopt;
  size_t begin = pos + marker.size();
  size_t end = text.find(')', begin);
  if (end == std::string::npos) return std::nullopt;
  return trim(text.substr(begin, end - begin));
}

struct HintStem {
  PromptKind kind;
  const char* stem;
};

const HintStem kHintStems[] = {
    {PromptKind::HintReason,
     "Can you walk back through your reasoning and spot the step that drifts "
     "from the statement"},
    {PromptKind::HintMethod,
     "Is the method you picked really suited to what the exercise asks"},
    {PromptKind::HintConcept,
     "Which mathematical concept does this exercise rest on, and did you "
     "apply it faithfully"},
    {PromptKind::HintCalcul,
     "Can you check the calculations you performed once more"},
    {PromptKind::HintInterp,
     "Does your reading of the statement match what it actually asks for"},
    {PromptKind::HintAll,
     "Taking reasoning, method, concepts, calculations and interpretation "
     "together, where could the slip hide"},
    {PromptKind::HintPartRes,
     "Which part of the expected answer is still missing from yours"},
    {PromptKind::BaselineOne,
     "What does the whole in this statement consist of"},
    {PromptKind::BaselineTwo,
     "Which mistake do students often make with this kind of exercise, and "
     "could you be making it too"},
};

const char* hint_stem(PromptKind kind) {
  for (const auto& s : kHintStems) {
    if (s.kind == kind) return s.stem;
  }
  return "Could you take another look at the exercise";
}

// The last line of the assistant turn is the student's previous answer (the
// revision context stores "reasoning\nanswer" there).
std::optional<std::string> initial_answer_from_context(const MessageList& messages) {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role != Role::Assistant) continue;
    const std::string& content = it->content;
    size_t pos = content.find_last_of('\n');
    return trim(pos == std::string::npos ? content : content.substr(pos + 1));
  }
  return std::nullopt;
}

size_t balanced_bracket_end(const std::string& text, size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
      if (depth == 0) return i + 1;
    }
  }
  return std::string::npos;
}

}  // namespace

MockBackend::MockBackend(json script, std::vector<core::Exercise> exercises,
                         int max_in_flight)
    : Backend(max_in_flight), exercises_(std::move(exercises)) {
  if (!script.is_object()) {
    throw ConfigError("mock script must be a JSON object");
  }
  strict_ = script.value("strict", false);
  for (const auto& rule_json : script.value("rules", json::array())) {
    Rule rule;
    rule.when = rule_json.value("when", json::object());
    rule.delay_ms = rule_json.value("delay_ms", 0);
    for (const auto& step : rule_json.value("do", json::array())) {
      Outcome outcome;
      outcome.behavior = step.value("behavior", "");
      if (outcome.behavior.empty()) {
        throw ConfigError("mock script rule step without a behavior");
      }
      if (outcome.behavior == "err" &&
          (!step.contains("errors") || !step["errors"].is_array() ||
           step["errors"].empty())) {
        throw ConfigError("mock script 'err' step needs a non-empty errors list");
      }
      outcome.fields = step;
      int repeat = step.value("repeat", 1);
      if (repeat <= 0) {
        throw ConfigError("mock script step repeat must be positive");
      }
      for (int i = 0; i < repeat; ++i) rule.pattern.push_back(outcome);
    }
    if (rule.pattern.empty()) {
      throw ConfigError("mock script rule with an empty do-list");
    }
    rules_.push_back(std::move(rule));
  }
}

json MockBackend::load_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mock script: " + path);
  json script;
  try {
    in >> script;
  } catch (const json::exception& e) {
    throw ConfigError("mock script " + path + " is not valid JSON: " + e.what());
  }
  return script;
}

std::string MockBackend::canned_hint(PromptKind kind, int variant) {
  return std::string(hint_stem(kind)) + " (variant " + std::to_string(variant) +
         ")?";
}

const MockBackend::Rule* MockBackend::find_rule(
    PromptKind kind, const std::string& exercise_id,
    const CompletionParams& params) const {
  for (const auto& rule : rules_) {
    const json& when = rule.when;
    if (when.contains("kind") &&
        when["kind"].get<std::string>() != prompts::prompt_kind_name(kind)) {
      continue;
    }
    if (when.contains("exercise") &&
        when["exercise"].get<std::string>() != exercise_id) {
      continue;
    }
    if (when.contains("model") &&
        when["model"].get<std::string>() != params.model_id) {
      continue;
    }
    if (when.contains("temp_min") &&
        params.temperature < when["temp_min"].get<double>() - 1e-9) {
      continue;
    }
    if (when.contains("temp_max") &&
        params.temperature > when["temp_max"].get<double>() + 1e-9) {
      continue;
    }
    return &rule;
  }
  return nullptr;
}

const MockBackend::Outcome* MockBackend::scripted_outcome(
    PromptKind kind, const std::string& exercise_id,
    const CompletionParams& params, int* delay_ms) const {
  const Rule* rule = find_rule(kind, exercise_id, params);
  if (!rule) return nullptr;
  *delay_ms = rule->delay_ms;
  size_t index = static_cast<size_t>(params.sample_ordinal) % rule->pattern.size();
  return &rule->pattern[index];
}

CompletionResult MockBackend::complete_once(const MessageList& messages,
                                            const CompletionParams& params) {
  int now = in_flight_now_.fetch_add(1) + 1;
  int seen = max_observed_.load();
  while (now > seen && !max_observed_.compare_exchange_weak(seen, now)) {
  }

  try {
    auto kind = detect_kind(messages);
    if (!kind) {
      throw MockScriptMiss("mock cannot identify the prompt kind of a request");
    }

    std::string exercise_id;
    const core::Exercise* exercise = nullptr;
    for (const auto& ex : exercises_) {
      for (const auto& msg : messages) {
        if (contains(msg.content, ex.statement)) {
          exercise = &ex;
          exercise_id = ex.id;
          break;
        }
      }
      if (exercise) break;
    }

    int delay_ms = 0;
    const Outcome* outcome = scripted_outcome(*kind, exercise_id, params, &delay_ms);
    Outcome fallback;
    if (!outcome) {
      if (strict_) {
        throw MockScriptMiss("strict mock script has no rule for kind " +
                             prompts::prompt_kind_name(*kind));
      }
      switch (*kind) {
        case PromptKind::Solve:
          fallback.behavior = "correct";
          break;
        case PromptKind::Review:
          fallback.behavior = "echo";
          break;
        case PromptKind::CheckAndDetect:
        case PromptKind::ClassifyHint:
        case PromptKind::Diversify:
          fallback.behavior = "grade";
          break;
        default:
          fallback.behavior = "hint";
          break;
      }
      fallback.fields = json::object();
      outcome = &fallback;
    }

    if (delay_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    }

    CompletionResult result;
    result.text = respond(*kind, *outcome, exercise, messages, params);
    in_flight_now_.fetch_sub(1);
    return result;
  } catch (...) {
    in_flight_now_.fetch_sub(1);
    throw;
  }
}

std::string MockBackend::respond(PromptKind kind, const Outcome& outcome,
                                 const core::Exercise* exercise,
                                 const MessageList& messages,
                                 const CompletionParams& params) const {
  const std::string& behavior = outcome.behavior;
  const json& fields = outcome.fields;

  if (behavior == "malformed") {
    return fields.value("text",
                        "Sorry, I could not format my answer as JSON today {oops");
  }

  auto require_exercise = [&]() -> const core::Exercise& {
    if (!exercise) {
      throw MockScriptMiss("mock behavior '" + behavior + "' for kind " +
                           prompts::prompt_kind_name(kind) +
                           " needs an identifiable exercise in the prompt");
    }
    return *exercise;
  };

  switch (kind) {
    case PromptKind::Solve: {
      if (behavior == "correct") {
        json out = {{"reasoning",
                     fields.value("reasoning",
                                  "I split the quantity exactly as the statement "
                                  "requires and checked each step.")},
                    {"answer", require_exercise().accepted_answers.front()}};
        return out.dump();
      }
      if (behavior == "err") {
        std::vector<std::string> labels;
        for (const auto& l : fields["errors"]) labels.push_back(l.get<std::string>());
        std::string reasoning =
            fields.value("reasoning",
                         "I set up the relation but mixed up one of the "
                         "quantities along the way.");
        if (!contains(reasoning, "(errors:")) {
          reasoning += " (errors: " + join(labels, ", ") + ")";
        }
        json out = {{"reasoning", reasoning},
                    {"answer",
                     fields.value("wrong_answer",
                                  "I believe the required quantity works out "
                                  "differently than the statement suggests.")}};
        return out.dump();
      }
      break;
    }

    case PromptKind::Review: {
      auto echo = [&]() -> std::string {
        auto initial = initial_answer_from_context(messages);
        if (!initial) {
          throw MockScriptMiss("mock review request carries no assistant turn");
        }
        return json{{"response", *initial}}.dump();
      };
      if (behavior == "echo") return echo();
      if (behavior == "correct") {
        return json{{"response", require_exercise().accepted_answers.front()}}
            .dump();
      }
      if (behavior == "correct-after-hint-kinds") {
        const std::string text = user_text(messages);
        bool corrects = false;
        for (const auto& name : fields.value("hint_kinds", json::array())) {
          auto hk = prompts::parse_prompt_kind(name.get<std::string>());
          if (hk && contains(text, hint_stem(*hk))) {
            corrects = true;
            break;
          }
        }
        if (corrects) {
          return json{{"response", require_exercise().accepted_answers.front()}}
              .dump();
        }
        return echo();
      }
      break;
    }

    case PromptKind::CheckAndDetect: {
      if (behavior == "grade") {
        const std::string text = user_text(messages);
        auto accepted = accepted_answers_from_prompt(text);
        auto student = line_value(text, kStudentAnswerMarkers, 2);
        if (student && answer_matches(accepted, *student)) {
          return json{{"error_type", ""}, {"correct_answer", *student}}.dump();
        }
        if (auto labels = embedded_error_labels(text)) {
          return json{{"error_type", *labels}, {"correct_answer", ""}}.dump();
        }
        return json{{"error_type", "Comprehension Error"}, {"correct_answer", ""}}
            .dump();
      }
      break;
    }

    case PromptKind::ClassifyHint: {
      if (behavior == "grade") {
        const std::string text = user_text(messages);
        auto accepted = accepted_answers_from_prompt(text);
        std::string revised = line_value(text, kRevisedMarkers, 2).value_or("");
        std::string hint = line_value(text, kHintMarkers, 2).value_or("");
        if (hint_leaks(accepted, hint)) {
          return json{{"correct_hint", ""}, {"wrong_hint", hint}}.dump();
        }
        if (answer_matches(accepted, revised)) {
          return json{{"correct_hint", hint}, {"wrong_hint", ""}}.dump();
        }
        return json{{"correct_hint", ""}, {"wrong_hint", hint}}.dump();
      }
      break;
    }

    case PromptKind::Diversify: {
      if (behavior == "grade") {
        const std::string text = user_text(messages);
        size_t marker_pos = std::string::npos;
        for (const char* marker : kListMarkers) {
          marker_pos = text.find(marker);
          if (marker_pos != std::string::npos) break;
        }
        if (marker_pos == std::string::npos) {
          throw MockScriptMiss("diversify prompt without a reasoning list");
        }
        size_t start = text.find('[', marker_pos);
        size_t end = start == std::string::npos
                         ? std::string::npos
                         : balanced_bracket_end(text, start);
        if (end == std::string::npos) {
          throw MockScriptMiss("diversify reasoning list is not a JSON array");
        }
        json list = json::parse(text.substr(start, end - start), nullptr, false);
        if (list.is_discarded() || !list.is_array()) {
          throw MockScriptMiss("diversify reasoning list failed to parse");
        }
        json groups = json::object();
        for (const auto& item : list) {
          std::string evaluation = item.value("evaluation", "");
          auto parsed = parse_error_labels(evaluation);
          std::string label =
              parsed.known.empty()
                  ? normalize_text(evaluation)
                  : ErrorSet::canonicalize(parsed.known).label();
          groups[label].push_back(
              {{"gpt_initial_reasoning", item.value("gpt_initial_reasoning", "")},
               {"initial_response", item.value("initial_response", "")},
               {"evaluation", evaluation}});
        }
        return json{{"different_reasoning", groups}}.dump();
      }
      break;
    }

    default: {  // hint kinds
      if (behavior == "hint") {
        std::string hint;
        if (fields.contains("text")) {
          hint = fields["text"].get<std::string>();
        } else if (fields.value("leak_answer", false)) {
          hint = "Is the answer simply \"" +
                 require_exercise().accepted_answers.front() + "\"?";
        } else if (fields.value("no_question", false)) {
          hint = "Think again about how the parts relate to the whole.";
        } else {
          hint = canned_hint(kind, params.sample_ordinal);
        }
        if (kind == PromptKind::BaselineOne) {
          std::string second = "How would you share that whole into equal parts "
                               "(variant " +
                               std::to_string(params.sample_ordinal) + ")?";
          return json{{"hints", {hint, second}}}.dump();
        }
        return json{{"hint", hint}}.dump();
      }
      break;
    }
  }

  throw MockScriptMiss("mock behavior '" + behavior + "' does not apply to kind " +
                       prompts::prompt_kind_name(kind));
}

}  // namespace hintlab::llm
