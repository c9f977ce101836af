#pragma once

#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "hintlab/metrics/metrics.hpp"
#include "hintlab/pipeline/config.hpp"

namespace hintlab::cli {

using json = nlohmann::json;

// How one backend is reached. Credentials are never written in config
// files: http backends name an environment variable instead.
struct BackendSpec {
  std::string type;  // "scripted_mock" | "http"
  std::string script_file;     // scripted_mock
  std::string base_url;        // http
  std::string credential_env;  // http: env var holding the bearer token
  int max_in_flight = 0;       // 0 = unbounded
};

// The parsed run configuration file. Unknown keys anywhere in the document
// are rejected so typos fail loudly instead of silently using a default.
struct AppConfig {
  std::string output_dir = "runs";
  std::string language = "fr";
  int parallelism = 1;
  std::string templates_dir;
  std::string exercises_file;

  pipeline::Stage1Config stage1;  // exercises are filled in after loading
  std::optional<pipeline::Stage2Config> stage2;
  std::optional<pipeline::ValidationConfig> validation;
  std::optional<std::string> validation_best_prompt;  // name, resolved later

  metrics::SelectionScope selection_scope = metrics::SelectionScope::Global;

  BackendSpec default_backend;
  std::map<std::string, BackendSpec> per_model_backends;

  json raw;  // the document as loaded, stored in run manifests

  static AppConfig from_json(const json& document);
  static AppConfig load_file(const std::string& path);
};

}  // namespace hintlab::cli
