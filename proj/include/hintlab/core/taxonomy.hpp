#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hintlab::core {

// The eight error categories a verifier may assign to an incorrect attempt.
// The declaration order is the canonical order: error sets are stored and
// printed in this order, and report rows sort by it.
enum class ErrorType {
  Comprehension,
  PartialResponse,
  TermGrouping,
  Simplification,
  Calculation,
  IncorrectSubstitution,
  Interpretation,
  Algebraic,
};

constexpr int kErrorTypeCount = 8;

// Pipeline-level pseudo-category for outputs that could not be decoded at
// all. Deliberately not an ErrorType: it never joins an error set and is
// tracked through Verdict::Undecodable instead.
struct DecodingErrorTag {};

// Canonical display label, e.g. "Calculation Error".
std::string error_type_label(ErrorType t);

// Maps one free-text label to a taxonomy member: case-folds, collapses
// whitespace, strips list numbering and trailing punctuation, then looks the
// result up in a synonym table covering the English and French spellings the
// verifier models produce. Throws UnknownLabel when nothing matches.
ErrorType parse_error_label(std::string_view label);

// Non-throwing variant used where unknown labels are expected traffic.
std::optional<ErrorType> try_parse_error_label(std::string_view label);

// A canonical, deduplicated combination of error types. Order-insensitive:
// {Calculation, Interpretation} == {Interpretation, Calculation}.
class ErrorSet {
 public:
  ErrorSet() = default;

  // Dedupes and sorts into canonical order. Throws EmptyInput when empty.
  static ErrorSet canonicalize(const std::vector<ErrorType>& members);

  const std::vector<ErrorType>& members() const { return members_; }
  bool empty() const { return members_.empty(); }
  size_t size() const { return members_.size(); }

  // "Comprehension Error, Calculation Error" — members joined in canonical
  // order, matching the report row labels.
  std::string label() const;

  bool operator==(const ErrorSet& other) const = default;
  // Lexicographic over canonical member order; qualifies ErrorSet as map key.
  bool operator<(const ErrorSet& other) const { return members_ < other.members_; }

 private:
  std::vector<ErrorType> members_;
};

// Alias for canonicalize over already-parsed labels, mirroring the operation
// name used throughout the pipeline code.
ErrorSet canonicalize_error_set(const std::vector<ErrorType>& labels);

struct ParsedLabels {
  std::vector<ErrorType> known;
  std::vector<std::string> unknown;  // surfaced for audit, never dropped
};

// Splits a free-text multi-error field on commas, semicolons and newlines,
// strips list-numbering prefixes, and parses each piece.
ParsedLabels parse_error_labels(std::string_view text);

}  // namespace hintlab::core
