#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hintlab::prompts {

// Every prompt the harness renders. The seven specialized hint kinds are
// listed in their fixed tournament order, followed by the two baselines;
// tie-breaks in best-prompt selection use this declaration order.
enum class PromptKind {
  Solve,
  Review,
  ClassifyHint,
  CheckAndDetect,
  Diversify,
  HintReason,
  HintMethod,
  HintConcept,
  HintCalcul,
  HintInterp,
  HintAll,
  HintPartRes,
  BaselineOne,
  BaselineTwo,
};

constexpr int kPromptKindCount = 14;

// Stable snake_case name used in configs, records, and report rows
// (e.g. "hint_calcul", "baseline_two").
std::string prompt_kind_name(PromptKind k);
std::optional<PromptKind> parse_prompt_kind(std::string_view name);

// A hint kind conditioned on the student's reasoning and answer.
bool is_specialized_hint(PromptKind k);
// A hint kind conditioned on the exercise material only.
bool is_baseline_hint(PromptKind k);
inline bool is_hint_kind(PromptKind k) {
  return is_specialized_hint(k) || is_baseline_hint(k);
}

// The nine hint kinds in tournament order (specialized first, then baselines).
const std::vector<PromptKind>& hint_kinds();
const std::vector<PromptKind>& specialized_hint_kinds();
const std::vector<PromptKind>& baseline_hint_kinds();

}  // namespace hintlab::prompts
