#pragma once

#include <memory>
#include <string>

#include "hintlab/llm/backend.hpp"

namespace hintlab::llm {

// Client for any endpoint speaking the common chat-completions wire format:
// POST <base_url>/chat/completions with {model, messages, temperature,
// max_tokens, seed}, bearer-token auth. The credential is read from the
// environment variable named in the config — never stored inline.
class HttpBackend : public Backend {
 public:
  HttpBackend(const std::string& base_url, const std::string& credential_env,
              int max_in_flight = 4);
  ~HttpBackend() override;

  CompletionResult complete_once(const MessageList& messages,
                                 const CompletionParams& params) override;
  std::string backend_id() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hintlab::llm
