#pragma once

#include <atomic>
#include <map>
#include <string>
#include <vector>

#include "hintlab/core/types.hpp"
#include "hintlab/llm/backend.hpp"
#include "hintlab/prompts/prompt_kind.hpp"

#include "json.hpp"

namespace hintlab::llm {

// A deterministic stand-in for a hosted model, driven by a script of rules.
//
// The mock identifies the prompt kind from marker phrases in the rendered
// template (both template languages), identifies the exercise from its
// statement where the prompt embeds one, then applies the first matching
// rule. A rule's "do" list expands into a cyclic outcome pattern indexed by
// params.sample_ordinal, which is how 40 identical solve requests produce a
// scripted mix of outcomes while the backend stays a pure function of
// (messages, params) — replays are bit-identical.
//
// Script shape:
//   {
//     "strict": false,
//     "rules": [
//       {"when": {"kind": "solve", "exercise": "ex1-mod1", "model": "G3.5",
//                 "temp_min": 1.0, "temp_max": 1.0},
//        "do": [{"behavior": "err", "errors": ["Interpretation Error",
//                                              "Calculation Error"],
//                "repeat": 2},
//               {"behavior": "correct", "repeat": 38}]}
//     ]
//   }
//
// Behaviors:
//   solve:  "correct" | "err" (fields: errors, wrong_answer?, reasoning?)
//           | "malformed" (field: text?)
//   review: "echo" | "correct" | "correct-after-hint-kinds"
//           (field: hint_kinds) | "malformed"
//   hints:  "hint" (fields: leak_answer?, no_question?, text?) | "malformed"
//   check_and_detect / classify_hint / diversify:
//           "grade" (built-in deterministic grader) | "malformed"
//
// Without a matching rule the defaults are: solve -> correct, review -> echo,
// hints -> canned per-kind question, verifier kinds -> grade. strict: true
// turns every unmatched request into a MockScriptMiss instead.
class MockBackend : public Backend {
 public:
  MockBackend(nlohmann::json script, std::vector<core::Exercise> exercises,
              int max_in_flight = 0);

  static nlohmann::json load_script_file(const std::string& path);

  CompletionResult complete_once(const MessageList& messages,
                                 const CompletionParams& params) override;
  std::string backend_id() const override { return "scripted-mock"; }

  // Concurrency probe for rate-limiter tests: the highest number of calls
  // ever observed inside complete_once at the same time.
  int max_in_flight_observed() const { return max_observed_.load(); }

  // The canned hint text the mock teacher emits for a hint kind and sample
  // ordinal; exposed so review rules and tests can recognize hints by kind.
  static std::string canned_hint(prompts::PromptKind kind, int variant);

 private:
  struct Outcome {
    std::string behavior;
    nlohmann::json fields;
  };
  struct Rule {
    nlohmann::json when;
    std::vector<Outcome> pattern;  // do-list expanded by repeat counts
    int delay_ms = 0;
  };

  const Rule* find_rule(prompts::PromptKind kind, const std::string& exercise_id,
                        const CompletionParams& params) const;
  const Outcome* scripted_outcome(prompts::PromptKind kind,
                                  const std::string& exercise_id,
                                  const CompletionParams& params,
                                  int* delay_ms) const;

  std::string respond(prompts::PromptKind kind, const Outcome& outcome,
                      const core::Exercise* exercise,
                      const MessageList& messages,
                      const CompletionParams& params) const;

  bool strict_ = false;
  std::vector<Rule> rules_;
  std::vector<core::Exercise> exercises_;

  std::atomic<int> in_flight_now_{0};
  std::atomic<int> max_observed_{0};
};

}  // namespace hintlab::llm
