#include "hintlab/cli/app_config.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>

#include "hintlab/errors.hpp"

namespace hintlab::cli {

namespace {

void reject_unknown_keys(const json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& context) {
  std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!names.count(key)) {
      throw ConfigError("unknown key \"" + key + "\" in " + context);
    }
  }
}

const json& require(const json& obj, const char* key,
                    const std::string& context) {
  if (!obj.contains(key)) {
    throw ConfigError(std::string("missing key \"") + key + "\" in " + context);
  }
  return obj[key];
}

BackendSpec parse_backend(const json& obj, const std::string& context) {
  if (!obj.is_object()) {
    throw ConfigError(context + " must be an object");
  }
  BackendSpec spec;
  spec.type = require(obj, "type", context).get<std::string>();
  if (spec.type == "scripted_mock") {
    reject_unknown_keys(obj, {"type", "script_file", "max_in_flight"}, context);
    spec.script_file = require(obj, "script_file", context).get<std::string>();
  } else if (spec.type == "http") {
    reject_unknown_keys(
        obj, {"type", "base_url", "credential_env", "max_in_flight"}, context);
    spec.base_url = require(obj, "base_url", context).get<std::string>();
    spec.credential_env =
        require(obj, "credential_env", context).get<std::string>();
    spec.max_in_flight = 4;
  } else {
    throw ConfigError("unknown backend type \"" + spec.type + "\" in " +
                      context);
  }
  if (obj.contains("max_in_flight")) {
    spec.max_in_flight = obj["max_in_flight"].get<int>();
    if (spec.max_in_flight < 0) {
      throw ConfigError("max_in_flight must be >= 0 in " + context);
    }
  }
  return spec;
}

pipeline::Stage1Config parse_stage1(const json& obj) {
  reject_unknown_keys(obj,
                      {"student_models", "verifier_model", "temperatures",
                       "num_simulations", "verifier_temperature",
                       "diversify_k"},
                      "stage1");
  pipeline::Stage1Config config;
  config.student_models =
      require(obj, "student_models", "stage1").get<std::vector<std::string>>();
  config.verifier_model =
      require(obj, "verifier_model", "stage1").get<std::string>();
  if (obj.contains("temperatures")) {
    config.temperatures = obj["temperatures"].get<std::vector<double>>();
  }
  if (obj.contains("num_simulations")) {
    config.num_simulations = obj["num_simulations"].get<int>();
  }
  if (obj.contains("verifier_temperature")) {
    config.verifier_temperature = obj["verifier_temperature"].get<double>();
  }
  config.diversify_k = require(obj, "diversify_k", "stage1").get<int>();
  return config;
}

pipeline::Stage2Config parse_stage2(const json& obj) {
  reject_unknown_keys(obj,
                      {"teacher_model", "teacher_temperature", "repetitions",
                       "prompt_kinds", "reuse_hint_across_repetitions"},
                      "stage2");
  pipeline::Stage2Config config;
  config.teacher_model =
      require(obj, "teacher_model", "stage2").get<std::string>();
  if (obj.contains("teacher_temperature")) {
    config.teacher_temperature = obj["teacher_temperature"].get<double>();
  }
  if (obj.contains("repetitions")) {
    config.repetitions = obj["repetitions"].get<int>();
  }
  if (obj.contains("prompt_kinds")) {
    config.prompt_kinds.clear();
    for (const auto& name : obj["prompt_kinds"]) {
      auto kind = prompts::parse_prompt_kind(name.get<std::string>());
      if (!kind) {
        throw ConfigError("unknown prompt kind \"" + name.get<std::string>() +
                          "\" in stage2.prompt_kinds");
      }
      config.prompt_kinds.push_back(*kind);
    }
  }
  if (obj.contains("reuse_hint_across_repetitions")) {
    config.reuse_hint_across_repetitions =
        obj["reuse_hint_across_repetitions"].get<bool>();
  }
  return config;
}

pipeline::ValidationConfig parse_validation(const json& obj,
                                            std::optional<std::string>* best) {
  reject_unknown_keys(obj, {"teacher_model", "teacher_temperature",
                            "best_prompt"},
                      "validation");
  pipeline::ValidationConfig config;
  config.teacher_model =
      require(obj, "teacher_model", "validation").get<std::string>();
  if (obj.contains("teacher_temperature")) {
    config.teacher_temperature = obj["teacher_temperature"].get<double>();
  }
  if (obj.contains("best_prompt")) {
    *best = obj["best_prompt"].get<std::string>();
  }
  return config;
}

}  // namespace

AppConfig AppConfig::from_json(const json& document) {
  if (!document.is_object()) {
    throw ConfigError("configuration root must be an object");
  }
  reject_unknown_keys(document,
                      {"output_dir", "language", "parallelism",
                       "templates_dir", "exercises_file", "stage1", "stage2",
                       "validation", "selection_scope", "backends"},
                      "configuration root");

  AppConfig config;
  config.raw = document;
  if (document.contains("output_dir")) {
    config.output_dir = document["output_dir"].get<std::string>();
  }
  if (document.contains("language")) {
    config.language = document["language"].get<std::string>();
    if (config.language != "fr" && config.language != "en") {
      throw ConfigError("language must be \"fr\" or \"en\", got \"" +
                        config.language + "\"");
    }
  }
  if (document.contains("parallelism")) {
    config.parallelism = document["parallelism"].get<int>();
    if (config.parallelism < 1) {
      throw ConfigError("parallelism must be >= 1");
    }
  }
  config.templates_dir =
      require(document, "templates_dir", "configuration root")
          .get<std::string>();
  config.exercises_file =
      require(document, "exercises_file", "configuration root")
          .get<std::string>();

  config.stage1 = parse_stage1(require(document, "stage1", "configuration root"));
  if (document.contains("stage2")) {
    config.stage2 = parse_stage2(document["stage2"]);
  }
  if (document.contains("validation")) {
    config.validation =
        parse_validation(document["validation"], &config.validation_best_prompt);
  }
  if (document.contains("selection_scope")) {
    const std::string scope = document["selection_scope"].get<std::string>();
    if (scope == "global") {
      config.selection_scope = metrics::SelectionScope::Global;
    } else if (scope == "per_temperature") {
      config.selection_scope = metrics::SelectionScope::PerTemperature;
    } else {
      throw ConfigError(
          "selection_scope must be \"global\" or \"per_temperature\", got \"" +
          scope + "\"");
    }
  }

  const json& backends = require(document, "backends", "configuration root");
  reject_unknown_keys(backends, {"default", "per_model"}, "backends");
  config.default_backend =
      parse_backend(require(backends, "default", "backends"),
                    "backends.default");
  if (backends.contains("per_model")) {
    for (const auto& [model, spec] : backends["per_model"].items()) {
      config.per_model_backends[model] =
          parse_backend(spec, "backends.per_model." + model);
    }
  }
  return config;
}

AppConfig AppConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open configuration file " + path);
  }
  json document;
  try {
    document = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("configuration file " + path +
                      " is not valid JSON: " + e.what());
  }
  AppConfig config;
  try {
    config = from_json(document);
  } catch (const json::exception& e) {
    throw ConfigError("configuration file " + path +
                      " has a wrongly typed value: " + e.what());
  }

  // Relative paths in the file are relative to the file itself, so a config
  // works no matter which directory the tool is invoked from.
  const auto base = std::filesystem::path(path).parent_path();
  auto anchor = [&base](std::string& p) {
    if (p.empty()) return;
    std::filesystem::path candidate(p);
    if (candidate.is_relative()) p = (base / candidate).string();
  };
  anchor(config.output_dir);
  anchor(config.templates_dir);
  anchor(config.exercises_file);
  anchor(config.default_backend.script_file);
  for (auto& [model, spec] : config.per_model_backends) {
    anchor(spec.script_file);
  }
  return config;
}

}  // namespace hintlab::cli
