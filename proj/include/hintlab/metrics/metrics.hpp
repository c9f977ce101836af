#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hintlab/core/taxonomy.hpp"
#include "hintlab/pipeline/records.hpp"
#include "hintlab/prompts/prompt_kind.hpp"

namespace hintlab::metrics {

// One (temperature, exercise, model) cell addressed by display strings; the
// temperature is its canonical short form ("0", "0.2", "1").
struct CellKey {
  std::string temperature;
  std::string exercise_id;
  std::string model_id;

  auto operator<=>(const CellKey&) const = default;
};

// A ratio with its integer provenance kept alongside the quotient.
struct MetricValue {
  long long numerator = 0;
  long long denominator = 0;
  double value = 0.0;

  bool operator==(const MetricValue&) const = default;
};

// correct / (correct + incorrect); undecodable attempts are excluded from
// both sides before calling. Throws EmptyCell when nothing was decided.
MetricValue accuracy_from_counts(long long correct, long long incorrect);

struct RevisionRates {
  MetricValue success;  // corrected / total
  MetricValue error;    // exact complement: error.value == 1.0 - success.value
};

// Rates over the decided revision rounds of one error-set entry.
// Throws EmptyCell when total is zero.
RevisionRates revision_rates(long long corrected, long long total);

// Arithmetic mean of per-entry revision error rates; N is the number of
// distinct error sets encountered. Throws EmptyInput on an empty list.
double mean_revision_error(const std::vector<double>& rates);

// Decided/undecided round counts for one (entry, prompt kind) pair.
struct EntryRoundCounts {
  long long corrected = 0;
  long long wrong = 0;
  long long undecodable = 0;
};

std::map<std::pair<std::string, prompts::PromptKind>, EntryRoundCounts>
tally_rounds(const std::vector<pipeline::TournamentRecord>& tournaments);

// Revision error rate per (temperature, exercise, model, prompt kind): the
// mean over that cell's entries of each entry's error rate. Entries whose
// rounds were all undecodable for a kind contribute nothing.
using RateTable =
    std::map<std::tuple<std::string, std::string, std::string,
                        prompts::PromptKind>,
             double>;

RateTable revision_error_table(
    const std::vector<pipeline::ErrorDatasetEntry>& entries,
    const std::vector<pipeline::TournamentRecord>& tournaments);

// Whether winners are chosen once over the whole grid or per temperature.
enum class SelectionScope { Global, PerTemperature };

struct PromptSelection {
  std::optional<prompts::PromptKind> best_specialized;
  std::optional<prompts::PromptKind> best_baseline;
  std::map<prompts::PromptKind, int> specialized_wins;
  std::map<prompts::PromptKind, int> baseline_wins;
};

struct SelectionResult {
  SelectionScope scope = SelectionScope::Global;
  PromptSelection overall;                           // Global scope
  std::map<std::string, PromptSelection> per_temperature;  // PerTemperature
};

// Tournament winners: within every (temperature, exercise, model) triple the
// lowest-error prompt of each family wins; the selected prompt is the one
// with the most wins. All ties fall to declaration order. Invariant under
// any positive rescaling of the rates. Throws EmptyInput on an empty table.
SelectionResult select_best_prompts(const RateTable& rates,
                                    SelectionScope scope);

// Which error sets showed up where, for one exercise: rows are every
// distinct set among the exercise's error-dataset entries (canonically
// sorted), columns follow the given temperature and model display orders.
struct PresenceMatrix {
  std::vector<core::ErrorSet> rows;
  std::vector<std::string> temperatures;
  std::vector<std::string> models;
  // presence[row][temp_index * models.size() + model_index]
  std::vector<std::vector<bool>> presence;
};

PresenceMatrix error_presence_matrix(
    const std::string& exercise_id,
    const std::vector<pipeline::ErrorDatasetEntry>& entries,
    const std::vector<std::string>& temperatures,
    const std::vector<std::string>& models);

}  // namespace hintlab::metrics
