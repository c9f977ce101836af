#include "hintlab/pipeline/config.hpp"

#include "hintlab/errors.hpp"
#include "hintlab/strings.hpp"

namespace hintlab::pipeline {

namespace {

void check_temperature(double t, const std::string& field) {
  if (t < 0.0 || t > 1.0) {
    throw ConfigError(field + " must lie within [0, 1], got " +
                      format_temperature(t));
  }
}

}  // namespace

void Stage1Config::validate() const {
  if (exercises.empty()) {
    throw ConfigError("stage 1 needs at least one exercise");
  }
  if (student_models.empty()) {
    throw ConfigError("stage 1 needs at least one student model");
  }
  if (verifier_model.empty()) {
    throw ConfigError("stage 1 needs a verifier model");
  }
  if (temperatures.empty()) {
    throw ConfigError("stage 1 needs at least one sampling temperature");
  }
  for (double t : temperatures) {
    check_temperature(t, "temperature");
  }
  if (num_simulations <= 0) {
    throw ConfigError("num_simulations must be positive, got " +
                      std::to_string(num_simulations));
  }
  check_temperature(verifier_temperature, "verifier_temperature");
  if (verifier_temperature > 0.2) {
    throw ConfigError(
        "verifier_temperature must not exceed 0.2 (grading is only reliable "
        "near-deterministic), got " +
        format_temperature(verifier_temperature));
  }
  if (diversify_k <= 0) {
    throw ConfigError("diversify_k must be set to a positive value");
  }
}

void Stage2Config::validate() const {
  if (teacher_model.empty()) {
    throw ConfigError("stage 2 needs a teacher model");
  }
  check_temperature(teacher_temperature, "teacher_temperature");
  if (repetitions <= 0) {
    throw ConfigError("repetitions must be positive, got " +
                      std::to_string(repetitions));
  }
  if (prompt_kinds.empty()) {
    throw ConfigError("stage 2 needs at least one hint prompt kind");
  }
  for (prompts::PromptKind kind : prompt_kinds) {
    if (!prompts::is_hint_kind(kind)) {
      throw ConfigError(std::string("prompt kind ") +
                        prompts::prompt_kind_name(kind) +
                        " does not produce hints");
    }
  }
}

void ValidationConfig::validate() const {
  if (teacher_model.empty()) {
    throw ConfigError("validation needs a teacher model");
  }
  check_temperature(teacher_temperature, "teacher_temperature");
  if (!prompts::is_hint_kind(best_prompt)) {
    throw ConfigError(std::string("prompt kind ") +
                      prompts::prompt_kind_name(best_prompt) +
                      " does not produce hints");
  }
}

}  // namespace hintlab::pipeline
