#include "hintlab/prompts/prompt_kind.hpp"

namespace hintlab::prompts {

namespace {

const char* kNames[kPromptKindCount] = {
    "solve",        "review",      "classify_hint", "check_and_detect",
    "diversify",    "hint_reason", "hint_method",   "hint_concept",
    "hint_calcul",  "hint_interp", "hint_all",      "hint_part_res",
    "baseline_one", "baseline_two",
};

}  // namespace

std::string prompt_kind_name(PromptKind k) {
  return kNames[static_cast<int>(k)];
}

std::optional<PromptKind> parse_prompt_kind(std::string_view name) {
  for (int i = 0; i < kPromptKindCount; ++i) {
    if (name == kNames[i]) return static_cast<PromptKind>(i);
  }
  return std::nullopt;
}

bool is_specialized_hint(PromptKind k) {
  switch (k) {
    case PromptKind::HintReason:
    case PromptKind::HintMethod:
    case PromptKind::HintConcept:
    case PromptKind::HintCalcul:
    case PromptKind::HintInterp:
    case PromptKind::HintAll:
    case PromptKind::HintPartRes:
      return true;
    default:
      return false;
  }
}

bool is_baseline_hint(PromptKind k) {
  return k == PromptKind::BaselineOne || k == PromptKind::BaselineTwo;
}

const std::vector<PromptKind>& specialized_hint_kinds() {
  static const std::vector<PromptKind> kinds = {
      PromptKind::HintReason, PromptKind::HintMethod,  PromptKind::HintConcept,
      PromptKind::HintCalcul, PromptKind::HintInterp,  PromptKind::HintAll,
      PromptKind::HintPartRes,
  };
  return kinds;
}

const std::vector<PromptKind>& baseline_hint_kinds() {
  static const std::vector<PromptKind> kinds = {
      PromptKind::BaselineOne,
      PromptKind::BaselineTwo,
  };
  return kinds;
}

const std::vector<PromptKind>& hint_kinds() {
  static const std::vector<PromptKind> kinds = [] {
    std::vector<PromptKind> all = specialized_hint_kinds();
    for (PromptKind k : baseline_hint_kinds()) all.push_back(k);
    return all;
  }();
  return kinds;
}

}  // namespace hintlab::prompts
