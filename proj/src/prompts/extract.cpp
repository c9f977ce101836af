#include "hintlab/prompts/extract.hpp"

#include <optional>
#include <sstream>

#include "hintlab/errors.hpp"
#include "json.hpp"

namespace hintlab::prompts {

namespace {

using nlohmann::json;

// Drops ``` fence lines (with or without a language tag), keeping content.
std::string strip_code_fences(const std::string& raw) {
  std::istringstream in(raw);
  std::string out;
  std::string line;
  while (std::getline(in, line)) {
    size_t first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line.compare(first, 3, "```") == 0) {
      continue;
    }
    out += line;
    out.push_back('\n');
  }
  return out;
}

// Given text[start] == '{', returns the index one past the matching '}',
// honouring JSON string literals and escapes; npos when unbalanced.
size_t balanced_span_end(const std::string& text, size_t start) {
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
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) return i + 1;
    }
  }
  return std::string::npos;
}

// Second-chance cleanup for almost-JSON: raw control characters inside string
// literals become spaces and invalid escape sequences lose their backslash.
// (The prompts demand output free of stray line breaks and slashes; models
// violate that often enough that the extractor must cope.)
std::string repair_json_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (!in_string) {
      if (c == '"') in_string = true;
      out.push_back(c);
      continue;
    }
    if (c == '"') {
      in_string = false;
      out.push_back(c);
    } else if (c == '\\') {
      char next = i + 1 < text.size() ? text[i + 1] : '\0';
      if (next == '"' || next == '\\' || next == '/' || next == 'b' ||
          next == 'f' || next == 'n' || next == 'r' || next == 't' ||
          next == 'u') {
        out.push_back(c);
        out.push_back(next);
        ++i;
      }
      // invalid escape: drop the backslash, keep the escaped character
    } else if (static_cast<unsigned char>(c) < 0x20) {
      out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::optional<json> parse_span(const std::string& span) {
  json parsed = json::parse(span, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  parsed = json::parse(repair_json_text(span), nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  return std::nullopt;
}

// Scalar-to-string coercion: strings pass through, numbers and booleans are
// rendered (models sometimes answer {"answer": 0.25}); everything else fails.
std::optional<std::string> as_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  return std::nullopt;
}

// Like as_text but null means "field left empty", for the verifier contracts
// where an empty field is meaningful.
std::optional<std::string> as_text_or_empty(const json& v) {
  if (v.is_null()) return std::string();
  return as_text(v);
}

std::optional<ExtractedPayload> build_payload(PromptKind kind, const json& obj) {
  if (!obj.is_object()) return std::nullopt;

  switch (kind) {
    case PromptKind::Solve: {
      if (!obj.contains("reasoning") || !obj.contains("answer")) return std::nullopt;
      auto reasoning = as_text(obj["reasoning"]);
      auto answer = as_text(obj["answer"]);
      if (!reasoning || !answer) return std::nullopt;
      return ExtractedPayload(SolveOut{*reasoning, *answer});
    }
    case PromptKind::Review: {
      if (!obj.contains("response")) return std::nullopt;
      auto response = as_text(obj["response"]);
      if (!response) return std::nullopt;
      return ExtractedPayload(ReviewOut{*response});
    }
    case PromptKind::CheckAndDetect: {
      if (!obj.contains("error_type") || !obj.contains("correct_answer")) {
        return std::nullopt;
      }
      auto error_type = as_text_or_empty(obj["error_type"]);
      auto correct = as_text_or_empty(obj["correct_answer"]);
      if (!error_type || !correct) return std::nullopt;
      return ExtractedPayload(CheckOut{*error_type, *correct});
    }
    case PromptKind::ClassifyHint: {
      if (!obj.contains("correct_hint") || !obj.contains("wrong_hint")) {
        return std::nullopt;
      }
      auto correct = as_text_or_empty(obj["correct_hint"]);
      auto wrong = as_text_or_empty(obj["wrong_hint"]);
      if (!correct || !wrong) return std::nullopt;
      return ExtractedPayload(ClassifyOut{*correct, *wrong});
    }
    case PromptKind::BaselineOne: {
      if (!obj.contains("hints") || !obj["hints"].is_array() ||
          obj["hints"].empty()) {
        return std::nullopt;
      }
      BaselineOneOut out;
      for (const auto& h : obj["hints"]) {
        auto text = as_text(h);
        if (!text) return std::nullopt;
        out.hints.push_back(*text);
      }
      return ExtractedPayload(std::move(out));
    }
    case PromptKind::Diversify: {
      if (!obj.contains("different_reasoning") ||
          !obj["different_reasoning"].is_object()) {
        return std::nullopt;
      }
      DiversifyOut out;
      for (const auto& [label, items] : obj["different_reasoning"].items()) {
        if (!items.is_array()) return std::nullopt;
        std::vector<DiversifyGroupItem> group;
        for (const auto& item : items) {
          if (!item.is_object()) return std::nullopt;
          DiversifyGroupItem g;
          if (item.contains("gpt_initial_reasoning")) {
            g.reasoning = as_text_or_empty(item["gpt_initial_reasoning"]).value_or("");
          }
          if (item.contains("initial_response")) {
            g.response = as_text_or_empty(item["initial_response"]).value_or("");
          }
          if (item.contains("evaluation")) {
            g.evaluation = as_text_or_empty(item["evaluation"]).value_or("");
          }
          group.push_back(std::move(g));
        }
        out.groups.emplace_back(label, std::move(group));
      }
      return ExtractedPayload(std::move(out));
    }
    default: {  // the seven specialized hint kinds and BaselineTwo
      if (!obj.contains("hint")) return std::nullopt;
      auto hint = as_text(obj["hint"]);
      if (!hint) return std::nullopt;
      return ExtractedPayload(HintOut{*hint});
    }
  }
}

}  // namespace

ExtractedPayload extract_payload(PromptKind kind, const std::string& raw) {
  const std::string text = strip_code_fences(raw);
  for (size_t start = text.find('{'); start != std::string::npos;
       start = text.find('{', start + 1)) {
    size_t end = balanced_span_end(text, start);
    if (end == std::string::npos) continue;
    auto parsed = parse_span(text.substr(start, end - start));
    if (!parsed) continue;
    if (auto payload = build_payload(kind, *parsed)) {
      return std::move(*payload);
    }
  }
  throw DecodingFailure(
      "no decodable " + prompt_kind_name(kind) + " payload in model output", raw);
}

std::string to_canonical_json(const ExtractedPayload& payload) {
  json out;
  std::visit(
      [&out](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SolveOut>) {
          out = {{"reasoning", p.reasoning}, {"answer", p.answer}};
        } else if constexpr (std::is_same_v<T, ReviewOut>) {
          out = {{"response", p.response}};
        } else if constexpr (std::is_same_v<T, CheckOut>) {
          out = {{"error_type", p.error_type_raw},
                 {"correct_answer", p.correct_answer_raw}};
        } else if constexpr (std::is_same_v<T, ClassifyOut>) {
          out = {{"correct_hint", p.correct_hint}, {"wrong_hint", p.wrong_hint}};
        } else if constexpr (std::is_same_v<T, HintOut>) {
          out = {{"hint", p.hint_text}};
        } else if constexpr (std::is_same_v<T, BaselineOneOut>) {
          out = {{"hints", p.hints}};
        } else if constexpr (std::is_same_v<T, DiversifyOut>) {
          json groups = json::object();
          for (const auto& [label, items] : p.groups) {
            json arr = json::array();
            for (const auto& item : items) {
              arr.push_back({{"gpt_initial_reasoning", item.reasoning},
                             {"initial_response", item.response},
                             {"evaluation", item.evaluation}});
            }
            groups[label] = std::move(arr);
          }
          out = {{"different_reasoning", std::move(groups)}};
        }
      },
      payload);
  return out.dump();
}

}  // namespace hintlab::prompts
