#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hintlab/core/types.hpp"
#include "hintlab/llm/chat.hpp"
#include "hintlab/prompts/prompt_kind.hpp"

namespace hintlab::prompts {

// One loaded template: the system role text plus the user body with {name}
// placeholders. Literal braces in the asset files are written {{ and }}.
struct PromptTemplate {
  std::string system_text;
  std::string user_text;
};

// All fourteen templates for one language, loaded from
// <templates_dir>/<lang>/<kind>.txt. Asset format: a "[system]" line, the
// system text, a "[user]" line, the user text.
class TemplateSet {
 public:
  static TemplateSet load(const std::string& templates_dir,
                          const std::string& lang);

  const PromptTemplate& get(PromptKind k) const;
  const std::string& language() const { return lang_; }

 private:
  std::map<PromptKind, PromptTemplate> templates_;
  std::string lang_;
};

// One incorrect attempt handed to the diversification prompt.
struct DiversifyExample {
  std::string reasoning;
  std::string response;
  std::string evaluation;  // the error-set label attached by the verifier
};

// Everything a prompt kind may interpolate. Which fields are required (or
// forbidden) depends on the kind; see render().
struct RenderInput {
  core::Exercise exercise;
  std::optional<core::Attempt> attempt;
  std::optional<std::string> hint;
  std::optional<std::string> revised_answer;
  std::optional<int> k_examples;                          // Diversify only
  std::optional<std::vector<DiversifyExample>> examples;  // Diversify only
};

// Renders kind's system+user message pair with every placeholder substituted.
// Throws MissingField when a required value is absent and ForbiddenField when
// attempt data is supplied to a baseline hint kind. Pure: identical inputs
// yield byte-identical messages.
llm::MessageList render(PromptKind kind, const RenderInput& input,
                        const TemplateSet& templates);

}  // namespace hintlab::prompts
