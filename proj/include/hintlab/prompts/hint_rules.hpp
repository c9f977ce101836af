#pragma once

#include <string>
#include <vector>

#include "hintlab/core/types.hpp"

namespace hintlab::prompts {

enum class HintFailure {
  NotAQuestion,  // the trimmed hint contains no question mark
  AnswerLeak,    // the hint reveals an accepted answer or a part of it
};

std::string hint_failure_name(HintFailure f);

struct HintValidity {
  bool pass = false;
  std::vector<HintFailure> reasons;  // empty iff pass

  bool has(HintFailure f) const;
  bool operator==(const HintValidity&) const = default;
};

// Cheap deterministic pre-filter for the two hard hint constraints: a hint
// must be a question and must not reveal the correct answer or any part of
// it. Leak detection is string-level, not numeric-equivalence: the whole
// normalized accepted answer, or any digit-bearing fragment of it (a
// punctuation-trimmed whitespace token of length >= 2, e.g. "1/4" or "5p"),
// occurring as a substring of the normalized hint counts as a leak. The
// LLM-side hint classification stays the semantic arbiter.
HintValidity validate_hint(const std::string& hint,
                           const core::Exercise& exercise);

// The digit-bearing fragments leak detection scans for; exposed for tests
// and for fixture construction.
std::vector<std::string> answer_leak_fragments(const core::Exercise& exercise);

}  // namespace hintlab::prompts
