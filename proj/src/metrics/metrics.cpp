#include "hintlab/metrics/metrics.hpp"

#include <algorithm>
#include <set>

#include "hintlab/errors.hpp"
#include "hintlab/strings.hpp"

namespace hintlab::metrics {

namespace {

using prompts::PromptKind;

// Family-aware argmin over one triple's rates; strict < keeps the earliest
// declared kind on ties.
std::optional<PromptKind> family_argmin(
    const std::map<PromptKind, double>& rates, bool specialized) {
  std::optional<PromptKind> best;
  double best_rate = 0.0;
  for (PromptKind kind : prompts::hint_kinds()) {
    if (prompts::is_specialized_hint(kind) != specialized) continue;
    auto it = rates.find(kind);
    if (it == rates.end()) continue;
    if (!best || it->second < best_rate) {
      best = kind;
      best_rate = it->second;
    }
  }
  return best;
}

std::optional<PromptKind> mode_of_wins(
    const std::map<PromptKind, int>& wins, bool specialized) {
  std::optional<PromptKind> best;
  int best_count = 0;
  for (PromptKind kind : prompts::hint_kinds()) {
    if (prompts::is_specialized_hint(kind) != specialized) continue;
    auto it = wins.find(kind);
    if (it == wins.end()) continue;
    if (!best || it->second > best_count) {
      best = kind;
      best_count = it->second;
    }
  }
  return best;
}

}  // namespace

MetricValue accuracy_from_counts(long long correct, long long incorrect) {
  if (correct < 0 || incorrect < 0) {
    throw ConfigError("negative attempt counts");
  }
  const long long total = correct + incorrect;
  if (total == 0) {
    throw EmptyCell("accuracy over zero decided attempts");
  }
  return MetricValue{correct, total,
                     static_cast<double>(correct) / static_cast<double>(total)};
}

RevisionRates revision_rates(long long corrected, long long total) {
  if (total <= 0) {
    throw EmptyCell("revision rates over zero decided rounds");
  }
  if (corrected < 0 || corrected > total) {
    throw ConfigError("corrected count outside [0, total]");
  }
  RevisionRates rates;
  rates.success = MetricValue{
      corrected, total,
      static_cast<double>(corrected) / static_cast<double>(total)};
  rates.error =
      MetricValue{total - corrected, total, 1.0 - rates.success.value};
  return rates;
}

double mean_revision_error(const std::vector<double>& rates) {
  if (rates.empty()) {
    throw EmptyInput("mean revision error over zero error sets");
  }
  double sum = 0.0;
  for (double r : rates) sum += r;
  return sum / static_cast<double>(rates.size());
}

std::map<std::pair<std::string, prompts::PromptKind>, EntryRoundCounts>
tally_rounds(const std::vector<pipeline::TournamentRecord>& tournaments) {
  std::map<std::pair<std::string, PromptKind>, EntryRoundCounts> tally;
  for (const auto& rec : tournaments) {
    EntryRoundCounts& counts = tally[{rec.entry_id, rec.prompt_kind}];
    if (rec.hint_verdict == "correct_hint") {
      ++counts.corrected;
    } else if (rec.hint_verdict == "wrong_hint") {
      ++counts.wrong;
    } else {
      ++counts.undecodable;
    }
  }
  return tally;
}

RateTable revision_error_table(
    const std::vector<pipeline::ErrorDatasetEntry>& entries,
    const std::vector<pipeline::TournamentRecord>& tournaments) {
  auto tally = tally_rounds(tournaments);

  std::map<std::string, const pipeline::ErrorDatasetEntry*> by_id;
  for (const auto& entry : entries) by_id[entry.entry_id] = &entry;

  // Rounds carry their own grouping fields; the entry, when known, is the
  // authoritative copy. Cells are keyed per (triple, kind) and hold the
  // error rates of every entry with decided rounds.
  std::map<std::string,
           std::tuple<std::string, std::string, std::string>>
      triple_of;
  for (const auto& round : tournaments) {
    triple_of[round.entry_id] = {format_temperature(round.temperature),
                                 round.exercise_id, round.student_model};
  }
  std::map<std::tuple<std::string, std::string, std::string, PromptKind>,
           std::vector<double>>
      per_cell;
  for (const auto& [key, counts] : tally) {
    const auto& [entry_id, kind] = key;
    const long long decided = counts.corrected + counts.wrong;
    if (decided == 0) continue;
    auto triple = triple_of.at(entry_id);
    auto found = by_id.find(entry_id);
    if (found != by_id.end()) {
      const pipeline::ErrorDatasetEntry& entry = *found->second;
      triple = {format_temperature(entry.temperature), entry.exercise_id,
                entry.student_model};
    }
    const auto& [temperature, exercise, model] = triple;
    per_cell[{temperature, exercise, model, kind}].push_back(
        revision_rates(counts.corrected, decided).error.value);
  }

  RateTable table;
  for (const auto& [key, rates] : per_cell) {
    table[key] = mean_revision_error(rates);
  }
  return table;
}

SelectionResult select_best_prompts(const RateTable& rates,
                                    SelectionScope scope) {
  if (rates.empty()) {
    throw EmptyInput("prompt selection over an empty rate table");
  }

  // Regroup into triples so each (temperature, exercise, model) votes once
  // per family.
  std::map<std::tuple<std::string, std::string, std::string>,
           std::map<PromptKind, double>>
      triples;
  for (const auto& [key, rate] : rates) {
    const auto& [temperature, exercise, model, kind] = key;
    triples[{temperature, exercise, model}][kind] = rate;
  }

  std::map<std::string, PromptSelection> groups;
  for (const auto& [triple, kind_rates] : triples) {
    const std::string group_key =
        scope == SelectionScope::Global ? std::string() : std::get<0>(triple);
    PromptSelection& group = groups[group_key];
    if (auto win = family_argmin(kind_rates, true)) {
      ++group.specialized_wins[*win];
    }
    if (auto win = family_argmin(kind_rates, false)) {
      ++group.baseline_wins[*win];
    }
  }

  SelectionResult result;
  result.scope = scope;
  for (auto& [group_key, group] : groups) {
    group.best_specialized = mode_of_wins(group.specialized_wins, true);
    group.best_baseline = mode_of_wins(group.baseline_wins, false);
    if (scope == SelectionScope::Global) {
      result.overall = group;
    } else {
      result.per_temperature[group_key] = group;
    }
  }
  return result;
}

PresenceMatrix error_presence_matrix(
    const std::string& exercise_id,
    const std::vector<pipeline::ErrorDatasetEntry>& entries,
    const std::vector<std::string>& temperatures,
    const std::vector<std::string>& models) {
  PresenceMatrix matrix;
  matrix.temperatures = temperatures;
  matrix.models = models;

  std::vector<core::ErrorSet> rows;
  std::set<std::pair<std::string, core::ErrorSet>> present;  // (temp|model, set)
  for (const auto& entry : entries) {
    if (entry.exercise_id != exercise_id) continue;
    if (std::find(rows.begin(), rows.end(), entry.errors) == rows.end()) {
      rows.push_back(entry.errors);
    }
    present.insert({format_temperature(entry.temperature) + "|" +
                        entry.student_model,
                    entry.errors});
  }
  std::sort(rows.begin(), rows.end());
  matrix.rows = rows;

  for (const core::ErrorSet& set : matrix.rows) {
    std::vector<bool> row;
    row.reserve(temperatures.size() * models.size());
    for (const std::string& temperature : temperatures) {
      for (const std::string& model : models) {
        row.push_back(present.count({temperature + "|" + model, set}) > 0);
      }
    }
    matrix.presence.push_back(std::move(row));
  }
  return matrix;
}

}  // namespace hintlab::metrics
