#pragma once

#include <set>
#include <string>
#include <vector>

#include "hintlab/core/types.hpp"
#include "hintlab/metrics/metrics.hpp"
#include "hintlab/pipeline/records.hpp"

namespace hintlab::metrics {

// Everything a report emission needs. Temperature and model orders drive
// column order; when left empty they are derived from the records (sorted).
// Each section is emitted only when its records are present.
struct ReportInputs {
  std::vector<std::string> temperatures;
  std::vector<std::string> models;
  std::vector<core::Exercise> exercises;
  std::vector<pipeline::AttemptRecord> attempts;
  std::vector<pipeline::ErrorDatasetEntry> entries;
  std::vector<pipeline::TournamentRecord> tournaments;
  std::vector<pipeline::ValidationRecord> validations;
  SelectionScope scope = SelectionScope::Global;
  // Which report families to write: any of "accuracy", "presence", "rates",
  // "validation". Empty = all.
  std::set<std::string> targets;
};

// Writes CSV/JSON reports into out_dir and returns the file names written,
// in emission order. Re-emitting the same inputs produces byte-identical
// files. Absent cells are printed as an em dash.
//
//   solve_accuracy.csv        from attempts   (per model x temperature, 4dp)
//   error_presence_<ex>.csv   from entries    (one per exercise with entries)
//   revision_error_rates.csv  from tournaments (per prompt kind, 2dp)
//   best_prompts.json         from tournaments (family winners and win counts)
//   validation_accuracy.csv   from validations (before/after rows, 4dp)
std::vector<std::string> emit_reports(const ReportInputs& inputs,
                                      const std::string& out_dir);

}  // namespace hintlab::metrics
