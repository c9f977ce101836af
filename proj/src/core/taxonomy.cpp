#include "hintlab/core/taxonomy.hpp"

#include <algorithm>
#include <map>

#include "hintlab/errors.hpp"
#include "hintlab/strings.hpp"

namespace hintlab::core {

namespace {

const char* kLabels[kErrorTypeCount] = {
    "Comprehension Error",
    "Partial Response",
    "Term Grouping Error",
    "Simplification Error",
    "Calculation Error",
    "Incorrect Substitution Error",
    "Interpretation Error",
    "Algebraic Error",
};

// Synonym table over normalized (lowercased, whitespace-collapsed) labels.
// Covers the spellings seen in the taxonomy definition, the report rows, and
// the French originals the verifier models answer with.
const std::map<std::string, ErrorType>& synonym_table() {
  static const std::map<std::string, ErrorType> table = {
      {"comprehension error", ErrorType::Comprehension},
      {"comprehension", ErrorType::Comprehension},
      {"misunderstanding", ErrorType::Comprehension},
      {"erreur de comprehension", ErrorType::Comprehension},
      {"erreur de compréhension", ErrorType::Comprehension},
      {"incompréhension", ErrorType::Comprehension},

      {"partial response", ErrorType::PartialResponse},
      {"partial answer", ErrorType::PartialResponse},
      {"partial response error", ErrorType::PartialResponse},
      {"partial answer error", ErrorType::PartialResponse},
      {"réponse partielle", ErrorType::PartialResponse},
      {"reponse partielle", ErrorType::PartialResponse},

      {"term grouping error", ErrorType::TermGrouping},
      {"term grouping", ErrorType::TermGrouping},
      {"grouping of terms error", ErrorType::TermGrouping},
      {"grouping of terms", ErrorType::TermGrouping},
      {"erreur de regroupement de termes", ErrorType::TermGrouping},
      {"regroupement de termes", ErrorType::TermGrouping},

      {"simplification error", ErrorType::Simplification},
      {"simplification", ErrorType::Simplification},
      {"erreur de simplification", ErrorType::Simplification},

      {"calculation error", ErrorType::Calculation},
      {"calculation", ErrorType::Calculation},
      {"calcul", ErrorType::Calculation},
      {"erreur de calcul", ErrorType::Calculation},

      {"incorrect substitution error", ErrorType::IncorrectSubstitution},
      {"incorrect substitution", ErrorType::IncorrectSubstitution},
      {"substitution error", ErrorType::IncorrectSubstitution},
      {"erreur de substitution", ErrorType::IncorrectSubstitution},
      {"substitution incorrecte", ErrorType::IncorrectSubstitution},
      {"erreur de substitution incorrecte", ErrorType::IncorrectSubstitution},

      {"interpretation error", ErrorType::Interpretation},
      {"interpretation", ErrorType::Interpretation},
      {"erreur d'interpretation", ErrorType::Interpretation},
      {"erreur d'interprétation", ErrorType::Interpretation},
      {"erreur d’interprétation", ErrorType::Interpretation},
      {"interprétation", ErrorType::Interpretation},

      {"algebraic error", ErrorType::Algebraic},
      {"algebra error", ErrorType::Algebraic},
      {"algebraic errors", ErrorType::Algebraic},
      {"erreur algebrique", ErrorType::Algebraic},
      {"erreur algébrique", ErrorType::Algebraic},
  };
  return table;
}

// Strips "1)", "2.", "-", "*" style list prefixes and trailing punctuation.
std::string strip_list_decoration(std::string_view s) {
  std::string t = trim(s);
  size_t i = 0;
  while (i < t.size() && (std::isdigit(static_cast<unsigned char>(t[i])) != 0)) {
    ++i;
  }
  if (i > 0 && i < t.size() && (t[i] == ')' || t[i] == '.' || t[i] == '-')) {
    t = trim(t.substr(i + 1));
  }
  while (!t.empty() && (t.front() == '-' || t.front() == '*' ||
                        t.front() == ')' || t.front() == '.')) {
    t = trim(t.substr(1));
  }
  while (!t.empty() && (t.back() == '.' || t.back() == ':' || t.back() == ';' ||
                        t.back() == '!')) {
    t = trim(t.substr(0, t.size() - 1));
  }
  return t;
}

}  // namespace

std::string error_type_label(ErrorType t) {
  return kLabels[static_cast<int>(t)];
}

std::optional<ErrorType> try_parse_error_label(std::string_view label) {
  std::string normalized = normalize_text(strip_list_decoration(label));
  if (normalized.empty()) return std::nullopt;
  const auto& table = synonym_table();
  auto it = table.find(normalized);
  if (it != table.end()) return it->second;
  return std::nullopt;
}

ErrorType parse_error_label(std::string_view label) {
  if (trim(label).empty()) {
    throw EmptyInput("parse_error_label: empty label");
  }
  if (auto t = try_parse_error_label(label)) return *t;
  throw UnknownLabel("unknown error label: \"" + std::string(label) + "\"",
                     std::string(label));
}

ErrorSet ErrorSet::canonicalize(const std::vector<ErrorType>& members) {
  if (members.empty()) {
    throw EmptyInput("ErrorSet::canonicalize: no members");
  }
  ErrorSet out;
  out.members_ = members;
  std::sort(out.members_.begin(), out.members_.end());
  out.members_.erase(std::unique(out.members_.begin(), out.members_.end()),
                     out.members_.end());
  return out;
}

std::string ErrorSet::label() const {
  std::vector<std::string> parts;
  parts.reserve(members_.size());
  for (ErrorType t : members_) parts.push_back(error_type_label(t));
  return join(parts, ", ");
}

ErrorSet canonicalize_error_set(const std::vector<ErrorType>& labels) {
  return ErrorSet::canonicalize(labels);
}

ParsedLabels parse_error_labels(std::string_view text) {
  ParsedLabels out;
  for (const std::string& piece : split_any(text, ",;\n")) {
    std::string cleaned = strip_list_decoration(piece);
    if (cleaned.empty()) continue;
    if (auto t = try_parse_error_label(cleaned)) {
      out.known.push_back(*t);
    } else {
      out.unknown.push_back(cleaned);
    }
  }
  return out;
}

}  // namespace hintlab::core
