#pragma once

#include <string>
#include <vector>

#include "hintlab/core/types.hpp"
#include "hintlab/prompts/prompt_kind.hpp"

namespace hintlab::pipeline {

// Stage 1: simulated students solve every exercise at every temperature,
// a verifier grades each attempt, and incorrect attempts are distilled into
// a diverse error dataset (one entry per distinct error set per cell).
struct Stage1Config {
  std::vector<core::Exercise> exercises;
  std::vector<std::string> student_models;
  std::string verifier_model;
  std::vector<double> temperatures{0.0, 0.2, 0.5, 0.8, 1.0};
  int num_simulations = 40;
  double verifier_temperature = 0.0;
  int diversify_k = 0;  // must be set explicitly; how many samples per error
                        // group the grouping prompt is asked to retain

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

// Stage 2: for every error-dataset entry, every competing hint prompt is
// rendered `repetitions` times, each hint is pushed through a revision
// round, and the revised answer is re-verified.
struct Stage2Config {
  std::string teacher_model;
  double teacher_temperature = 1.0;
  int repetitions = 10;
  std::vector<prompts::PromptKind> prompt_kinds = prompts::hint_kinds();
  // When true a single hint per (entry, prompt kind) is reused across all
  // repetitions instead of sampling a fresh one each time.
  bool reuse_hint_across_repetitions = false;

  void validate() const;
};

// Validation: replay fresh solves, hand every incorrect attempt exactly one
// hint from the winning prompt, and measure accuracy before/after revision.
struct ValidationConfig {
  std::string teacher_model;
  double teacher_temperature = 1.0;
  prompts::PromptKind best_prompt = prompts::PromptKind::HintReason;

  void validate() const;
};

}  // namespace hintlab::pipeline
