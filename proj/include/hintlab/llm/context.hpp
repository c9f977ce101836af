#pragma once

#include "hintlab/core/types.hpp"
#include "hintlab/llm/chat.hpp"

namespace hintlab::llm {

// Builds the three-message conversation a student sees when revising: the
// review system prompt, its own initial solve output replayed as the
// assistant turn, and the review user prompt carrying the hint. Context is
// constructed fresh per revision — only the initial solution is carried, so
// no previous hint leaks between revisions of the same attempt.
MessageList build_revision_context(const core::Exercise& exercise,
                                   const core::Attempt& initial,
                                   const MessageList& review_prompt_messages);

}  // namespace hintlab::llm
