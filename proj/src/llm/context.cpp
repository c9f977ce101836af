#include "hintlab/llm/context.hpp"

#include "hintlab/errors.hpp"

namespace hintlab::llm {

MessageList build_revision_context(const core::Exercise& exercise,
                                   const core::Attempt& initial,
                                   const MessageList& review_prompt_messages) {
  if (initial.exercise_id != exercise.id) {
    throw ConfigError("build_revision_context: attempt belongs to exercise '" +
                      initial.exercise_id + "', not '" + exercise.id + "'");
  }
  if (review_prompt_messages.size() != 2 ||
      review_prompt_messages[0].role != Role::System ||
      review_prompt_messages[1].role != Role::User) {
    throw ConfigError(
        "build_revision_context: expected a rendered system+user review prompt");
  }

  std::string assistant_content =
      initial.reasoning.empty() ? initial.answer
                                : initial.reasoning + "\n" + initial.answer;

  MessageList context;
  context.push_back(review_prompt_messages[0]);
  context.push_back({Role::Assistant, assistant_content});
  context.push_back(review_prompt_messages[1]);
  return context;
}

}  // namespace hintlab::llm
