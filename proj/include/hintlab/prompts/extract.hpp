#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hintlab/prompts/prompt_kind.hpp"

namespace hintlab::prompts {

// Typed payloads mirroring the JSON contracts each prompt demands.
struct SolveOut {
  std::string reasoning;
  std::string answer;
  bool operator==(const SolveOut&) const = default;
};
struct ReviewOut {
  std::string response;
  bool operator==(const ReviewOut&) const = default;
};
struct CheckOut {
  std::string error_type_raw;
  std::string correct_answer_raw;
  bool operator==(const CheckOut&) const = default;
};
struct ClassifyOut {
  std::string correct_hint;
  std::string wrong_hint;
  bool operator==(const ClassifyOut&) const = default;
};
struct HintOut {
  std::string hint_text;
  bool operator==(const HintOut&) const = default;
};
struct BaselineOneOut {
  std::vector<std::string> hints;  // progressive hints, non-empty
  bool operator==(const BaselineOneOut&) const = default;
};
struct DiversifyGroupItem {
  std::string reasoning;
  std::string response;
  std::string evaluation;
  bool operator==(const DiversifyGroupItem&) const = default;
};
struct DiversifyOut {
  // error-group label -> representative examples, in the payload's key order
  std::vector<std::pair<std::string, std::vector<DiversifyGroupItem>>> groups;
  bool operator==(const DiversifyOut&) const = default;
};

using ExtractedPayload = std::variant<SolveOut, ReviewOut, CheckOut, ClassifyOut,
                                      HintOut, BaselineOneOut, DiversifyOut>;

// Pulls the structured payload a prompt kind demands out of raw model text:
// strips code fences, walks candidate balanced-brace spans left to right,
// parses each (repairing literal control characters and invalid escapes
// inside strings on a second try), and accepts the first span carrying the
// kind's required fields. Throws DecodingFailure (with the raw text) when no
// span qualifies — never returns a payload missing required fields.
ExtractedPayload extract_payload(PromptKind kind, const std::string& raw);

// Canonical JSON rendering of a payload (the exact shape the prompts ask
// for); used by round-trip tests and content hashing.
std::string to_canonical_json(const ExtractedPayload& payload);

}  // namespace hintlab::prompts
