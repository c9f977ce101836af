#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hintlab::llm {

enum class Role { System, User, Assistant };

std::string role_name(Role r);

struct ChatMessage {
  Role role = Role::User;
  std::string content;  // non-empty

  bool operator==(const ChatMessage&) const = default;
};

using MessageList = std::vector<ChatMessage>;

// Sampling/transport parameters for one completion call.
struct CompletionParams {
  std::string model_id;
  double temperature = 0.0;  // in [0, 1]
  int max_tokens = 1024;     // > 0
  int retry_budget = 2;      // >= 0 additional transport attempts
  // Distinguishes otherwise-identical calls (attempt or repetition index) so
  // deterministic backends can vary outcomes while staying pure functions of
  // (messages, params). HTTP backends forward it as the wire "seed".
  int sample_ordinal = 0;

  bool operator==(const CompletionParams&) const = default;
};

struct CompletionResult {
  std::string text;
  std::optional<long long> prompt_tokens;
  std::optional<long long> completion_tokens;
};

}  // namespace hintlab::llm
