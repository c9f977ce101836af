#include "hintlab/llm/http_backend.hpp"

#include <cstdlib>

#include "hintlab/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace hintlab::llm {

namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string scheme_host_port;  // what httplib::Client expects
  std::string path_prefix;       // "" or "/v1"
};

ParsedUrl parse_base_url(const std::string& base_url) {
  size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("backend base_url needs a scheme: " + base_url);
  }
  size_t path_start = base_url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = base_url;
  } else {
    out.scheme_host_port = base_url.substr(0, path_start);
    out.path_prefix = base_url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
      out.path_prefix.pop_back();
    }
  }
  return out;
}

}  // namespace

struct HttpBackend::Impl {
  std::string base_url;
  ParsedUrl parsed;
  std::string credential;
  std::string credential_env;
};

HttpBackend::HttpBackend(const std::string& base_url,
                         const std::string& credential_env, int max_in_flight)
    : Backend(max_in_flight), impl_(std::make_unique<Impl>()) {
  impl_->base_url = base_url;
  impl_->parsed = parse_base_url(base_url);
  impl_->credential_env = credential_env;
  if (credential_env.empty()) {
    throw ConfigError("HTTP backend needs credential_env naming an environment "
                      "variable");
  }
  const char* value = std::getenv(credential_env.c_str());
  if (value == nullptr || *value == '\0') {
    throw ConfigError("environment variable " + credential_env +
                      " is unset or empty; it must hold the API credential for " +
                      base_url);
  }
  impl_->credential = value;
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::backend_id() const { return impl_->base_url; }

CompletionResult HttpBackend::complete_once(const MessageList& messages,
                                            const CompletionParams& params) {
  json body;
  body["model"] = params.model_id;
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  body["seed"] = params.sample_ordinal;
  body["messages"] = json::array();
  for (const auto& m : messages) {
    body["messages"].push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }

  httplib::Client client(impl_->parsed.scheme_host_port);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(120, 0);
  httplib::Headers headers = {
      {"Authorization", "Bearer " + impl_->credential},
  };

  auto res = client.Post(impl_->parsed.path_prefix + "/chat/completions", headers,
                         body.dump(), "application/json");
  if (!res) {
    throw TransportError("connection to " + impl_->base_url + " failed: " +
                             httplib::to_string(res.error()),
                         1, /*is_transient=*/true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("backend " + impl_->base_url + " returned status " +
                             std::to_string(res->status),
                         1, /*is_transient=*/true);
  }
  if (res->status != 200) {
    throw TransportError("backend " + impl_->base_url + " rejected the request "
                             "with status " +
                             std::to_string(res->status),
                         1, /*is_transient=*/false);
  }

  json parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("choices") ||
      !parsed["choices"].is_array() || parsed["choices"].empty() ||
      !parsed["choices"][0].contains("message") ||
      !parsed["choices"][0]["message"].contains("content") ||
      !parsed["choices"][0]["message"]["content"].is_string()) {
    throw TransportError("backend " + impl_->base_url +
                             " returned a malformed completion response",
                         1, /*is_transient=*/false);
  }

  CompletionResult result;
  result.text = parsed["choices"][0]["message"]["content"].get<std::string>();
  if (parsed.contains("usage") && parsed["usage"].is_object()) {
    const json& usage = parsed["usage"];
    if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number()) {
      result.prompt_tokens = usage["prompt_tokens"].get<long long>();
    }
    if (usage.contains("completion_tokens") &&
        usage["completion_tokens"].is_number()) {
      result.completion_tokens = usage["completion_tokens"].get<long long>();
    }
  }
  return result;
}

}  // namespace hintlab::llm
