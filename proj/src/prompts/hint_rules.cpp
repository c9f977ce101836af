#include "hintlab/prompts/hint_rules.hpp"

#include <algorithm>
#include <cctype>

#include "hintlab/errors.hpp"
#include "hintlab/strings.hpp"

namespace hintlab::prompts {

namespace {

bool has_digit(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

// Strips leading/trailing punctuation that commonly clings to math tokens
// ("(5p," -> "5p") while keeping interior structure like "1/4" intact.
std::string trim_punct(const std::string& token) {
  const std::string punct = ".,;:!?\"'()[]";
  size_t b = 0;
  size_t e = token.size();
  while (b < e && punct.find(token[b]) != std::string::npos) ++b;
  while (e > b && punct.find(token[e - 1]) != std::string::npos) --e;
  return token.substr(b, e - b);
}

}  // namespace

std::string hint_failure_name(HintFailure f) {
  switch (f) {
    case HintFailure::NotAQuestion:
      return "not_a_question";
    case HintFailure::AnswerLeak:
      return "answer_leak";
  }
  return "unknown";
}

bool HintValidity::has(HintFailure f) const {
  return std::find(reasons.begin(), reasons.end(), f) != reasons.end();
}

std::vector<std::string> answer_leak_fragments(const core::Exercise& exercise) {
  std::vector<std::string> fragments;
  for (const std::string& accepted : exercise.accepted_answers) {
    for (const std::string& token : split_any(normalize_text(accepted), " ")) {
      std::string fragment = trim_punct(token);
      if (fragment.size() < 2 || !has_digit(fragment)) continue;
      if (std::find(fragments.begin(), fragments.end(), fragment) ==
          fragments.end()) {
        fragments.push_back(fragment);
      }
    }
  }
  return fragments;
}

HintValidity validate_hint(const std::string& hint,
                           const core::Exercise& exercise) {
  if (trim(hint).empty()) {
    throw EmptyInput("validate_hint: empty hint");
  }

  HintValidity out;
  if (hint.find('?') == std::string::npos) {
    out.reasons.push_back(HintFailure::NotAQuestion);
  }

  const std::string normalized_hint = normalize_text(hint);
  bool leaked = false;
  for (const std::string& accepted : exercise.accepted_answers) {
    if (contains(normalized_hint, normalize_text(accepted))) {
      leaked = true;
      break;
    }
  }
  if (!leaked) {
    for (const std::string& fragment : answer_leak_fragments(exercise)) {
      if (contains(normalized_hint, fragment)) {
        leaked = true;
        break;
      }
    }
  }
  if (leaked) out.reasons.push_back(HintFailure::AnswerLeak);

  out.pass = out.reasons.empty();
  return out;
}

}  // namespace hintlab::prompts
