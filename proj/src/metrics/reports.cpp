#include "hintlab/metrics/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hintlab/errors.hpp"
#include "hintlab/strings.hpp"

namespace hintlab::metrics {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using prompts::PromptKind;

constexpr const char* kAbsent = "—";  // em dash
constexpr const char* kPresent = "✓";  // check mark

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string format_accuracy(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

double temperature_of(const std::string& display) {
  return std::strtod(display.c_str(), nullptr);
}

// Column order is temperature-major: every model at T0, then at T0.2, ...
std::vector<std::pair<std::string, std::string>> column_pairs(
    const std::vector<std::string>& temperatures,
    const std::vector<std::string>& models) {
  std::vector<std::pair<std::string, std::string>> columns;
  for (const std::string& temperature : temperatures) {
    for (const std::string& model : models) {
      columns.emplace_back(temperature, model);
    }
  }
  return columns;
}

std::string column_label(const std::string& temperature,
                         const std::string& model) {
  return model + "@T" + temperature;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) {
    throw IoError("cannot write report file " + path.string());
  }
  out << content;
  if (!out.flush()) {
    throw IoError("write to report file " + path.string() + " failed");
  }
}

struct Orders {
  std::vector<std::string> temperatures;
  std::vector<std::string> models;
  std::vector<std::string> exercise_ids;
};

Orders resolve_orders(const ReportInputs& in) {
  Orders orders;
  orders.temperatures = in.temperatures;
  orders.models = in.models;
  for (const auto& exercise : in.exercises) {
    orders.exercise_ids.push_back(exercise.id);
  }

  std::set<std::string> temperature_set;
  std::set<std::string> model_set;
  std::set<std::string> exercise_set;
  auto note = [&](const std::string& exercise_id, const std::string& model,
                  double temperature) {
    exercise_set.insert(exercise_id);
    model_set.insert(model);
    temperature_set.insert(format_temperature(temperature));
  };
  for (const auto& r : in.attempts) {
    note(r.exercise_id, r.student_model, r.temperature);
  }
  for (const auto& r : in.entries) {
    note(r.exercise_id, r.student_model, r.temperature);
  }
  for (const auto& r : in.tournaments) {
    note(r.exercise_id, r.student_model, r.temperature);
  }
  for (const auto& r : in.validations) {
    note(r.exercise_id, r.student_model, r.temperature);
  }

  if (orders.temperatures.empty()) {
    orders.temperatures.assign(temperature_set.begin(), temperature_set.end());
    std::sort(orders.temperatures.begin(), orders.temperatures.end(),
              [](const std::string& a, const std::string& b) {
                return temperature_of(a) < temperature_of(b);
              });
  }
  if (orders.models.empty()) {
    orders.models.assign(model_set.begin(), model_set.end());
  }
  if (orders.exercise_ids.empty()) {
    orders.exercise_ids.assign(exercise_set.begin(), exercise_set.end());
  }
  return orders;
}

std::string solve_accuracy_csv(const ReportInputs& in, const Orders& orders) {
  struct Counts {
    long long correct = 0;
    long long incorrect = 0;
    long long undecodable = 0;
  };
  std::map<std::pair<std::string, std::string>, Counts> cells;
  for (const auto& rec : in.attempts) {
    Counts& c = cells[{rec.student_model, format_temperature(rec.temperature)}];
    if (core::is_correct(rec.verdict)) {
      ++c.correct;
    } else if (core::is_incorrect(rec.verdict)) {
      ++c.incorrect;
    } else {
      ++c.undecodable;
    }
  }

  std::ostringstream out;
  out << "model,temperature,correct,incorrect,undecodable,accuracy\n";
  for (const std::string& model : orders.models) {
    for (const std::string& temperature : orders.temperatures) {
      auto found = cells.find({model, temperature});
      if (found == cells.end()) continue;
      const Counts& c = found->second;
      out << csv_field(model) << "," << temperature << "," << c.correct << ","
          << c.incorrect << "," << c.undecodable << ",";
      if (c.correct + c.incorrect == 0) {
        out << kAbsent;
      } else {
        out << format_accuracy(
            accuracy_from_counts(c.correct, c.incorrect).value);
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string presence_csv(const PresenceMatrix& matrix) {
  std::ostringstream out;
  out << "error_set";
  for (const auto& [temperature, model] :
       column_pairs(matrix.temperatures, matrix.models)) {
    out << "," << csv_field(column_label(temperature, model));
  }
  out << "\n";
  for (size_t row = 0; row < matrix.rows.size(); ++row) {
    out << csv_field(matrix.rows[row].label());
    for (bool present : matrix.presence[row]) {
      out << "," << (present ? kPresent : kAbsent);
    }
    out << "\n";
  }
  return out.str();
}

std::string revision_error_csv(const ReportInputs& in, const Orders& orders) {
  auto tally = tally_rounds(in.tournaments);
  std::map<std::string, const pipeline::ErrorDatasetEntry*> by_id;
  for (const auto& entry : in.entries) by_id[entry.entry_id] = &entry;

  // (temperature, model, kind) -> per-entry error rates, pooled across
  // exercises.
  std::map<std::tuple<std::string, std::string, PromptKind>,
           std::vector<double>>
      column_rates;
  std::set<PromptKind> kinds_seen;
  for (const auto& [key, counts] : tally) {
    const auto& [entry_id, kind] = key;
    kinds_seen.insert(kind);
    auto found = by_id.find(entry_id);
    if (found == by_id.end()) continue;
    const long long decided = counts.corrected + counts.wrong;
    if (decided == 0) continue;
    const pipeline::ErrorDatasetEntry& entry = *found->second;
    column_rates[{format_temperature(entry.temperature), entry.student_model,
                  kind}]
        .push_back(revision_rates(counts.corrected, decided).error.value);
  }

  std::ostringstream out;
  out << "prompt";
  const auto columns = column_pairs(orders.temperatures, orders.models);
  for (const auto& [temperature, model] : columns) {
    out << "," << csv_field(column_label(temperature, model));
  }
  out << "\n";
  for (PromptKind kind : prompts::hint_kinds()) {
    if (!kinds_seen.count(kind)) continue;
    out << prompts::prompt_kind_name(kind);
    for (const auto& [temperature, model] : columns) {
      auto found = column_rates.find({temperature, model, kind});
      if (found == column_rates.end()) {
        out << "," << kAbsent;
      } else {
        out << "," << format_rate(mean_revision_error(found->second));
      }
    }
    out << "\n";
  }
  return out.str();
}

json selection_to_json(const PromptSelection& selection) {
  auto wins_json = [](const std::map<PromptKind, int>& wins) {
    json out = json::object();
    for (const auto& [kind, count] : wins) {
      out[prompts::prompt_kind_name(kind)] = count;
    }
    return out;
  };
  json specialized{{"wins", wins_json(selection.specialized_wins)}};
  specialized["best"] = selection.best_specialized
                            ? json(prompts::prompt_kind_name(
                                  *selection.best_specialized))
                            : json(nullptr);
  json baseline{{"wins", wins_json(selection.baseline_wins)}};
  baseline["best"] =
      selection.best_baseline
          ? json(prompts::prompt_kind_name(*selection.best_baseline))
          : json(nullptr);
  return json{{"specialized", specialized}, {"baseline", baseline}};
}

std::string best_prompts_json(const ReportInputs& in) {
  RateTable table = revision_error_table(in.entries, in.tournaments);
  SelectionResult result = select_best_prompts(table, in.scope);
  json out;
  if (in.scope == SelectionScope::Global) {
    out["scope"] = "global";
    out["overall"] = selection_to_json(result.overall);
  } else {
    out["scope"] = "per_temperature";
    json per = json::object();
    for (const auto& [temperature, selection] : result.per_temperature) {
      per[temperature] = selection_to_json(selection);
    }
    out["per_temperature"] = per;
  }
  return out.dump(2) + "\n";
}

std::string validation_accuracy_csv(const ReportInputs& in,
                                    const Orders& orders) {
  struct Counts {
    long long before_correct = 0;
    long long before_incorrect = 0;
    long long before_undecodable = 0;
    long long revised_correct = 0;
    long long revised_incorrect = 0;
    long long revised_undecodable = 0;
  };
  std::map<std::pair<std::string, std::string>, Counts> cells;
  for (const auto& rec : in.validations) {
    Counts& c = cells[{rec.student_model, format_temperature(rec.temperature)}];
    if (core::is_correct(rec.before)) {
      ++c.before_correct;
    } else if (core::is_incorrect(rec.before)) {
      ++c.before_incorrect;
    } else {
      ++c.before_undecodable;
    }
    if (rec.after.has_value()) {
      if (core::is_correct(*rec.after)) {
        ++c.revised_correct;
      } else if (core::is_incorrect(*rec.after)) {
        ++c.revised_incorrect;
      } else {
        ++c.revised_undecodable;
      }
    }
  }

  std::ostringstream out;
  out << "model,temperature,phase,correct,incorrect,undecodable,accuracy\n";
  for (const std::string& model : orders.models) {
    for (const std::string& temperature : orders.temperatures) {
      auto found = cells.find({model, temperature});
      if (found == cells.end()) continue;
      const Counts& c = found->second;

      out << csv_field(model) << "," << temperature << ",before,"
          << c.before_correct << "," << c.before_incorrect << ","
          << c.before_undecodable << ",";
      if (c.before_correct + c.before_incorrect == 0) {
        out << kAbsent;
      } else {
        out << format_accuracy(
            accuracy_from_counts(c.before_correct, c.before_incorrect).value);
      }
      out << "\n";

      // After one hint and one revision: incorrect answers either became
      // correct, stayed incorrect, or dropped out as undecodable.
      const long long after_correct = c.before_correct + c.revised_correct;
      const long long after_incorrect = c.revised_incorrect;
      out << csv_field(model) << "," << temperature << ",after,"
          << after_correct << "," << after_incorrect << ","
          << c.revised_undecodable << ",";
      if (after_correct + after_incorrect == 0) {
        out << kAbsent;
      } else {
        out << format_accuracy(
            accuracy_from_counts(after_correct, after_incorrect).value);
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace

std::vector<std::string> emit_reports(const ReportInputs& inputs,
                                      const std::string& out_dir) {
  for (const std::string& target : inputs.targets) {
    if (target != "accuracy" && target != "presence" && target != "rates" &&
        target != "validation") {
      throw ConfigError("unknown report target \"" + target + "\"");
    }
  }
  auto wanted = [&](const char* target) {
    return inputs.targets.empty() || inputs.targets.count(target) > 0;
  };

  fs::create_directories(out_dir);
  const Orders orders = resolve_orders(inputs);
  std::vector<std::string> written;

  if (!inputs.attempts.empty() && wanted("accuracy")) {
    const std::string name = "solve_accuracy.csv";
    write_file(fs::path(out_dir) / name, solve_accuracy_csv(inputs, orders));
    written.push_back(name);
  }

  if (!inputs.entries.empty() && wanted("presence")) {
    for (const std::string& exercise_id : orders.exercise_ids) {
      PresenceMatrix matrix = error_presence_matrix(
          exercise_id, inputs.entries, orders.temperatures, orders.models);
      if (matrix.rows.empty()) continue;
      const std::string name = "error_presence_" + exercise_id + ".csv";
      write_file(fs::path(out_dir) / name, presence_csv(matrix));
      written.push_back(name);
    }
  }

  if (!inputs.tournaments.empty() && wanted("rates")) {
    const std::string rates_name = "revision_error_rates.csv";
    write_file(fs::path(out_dir) / rates_name,
               revision_error_csv(inputs, orders));
    written.push_back(rates_name);

    const std::string best_name = "best_prompts.json";
    write_file(fs::path(out_dir) / best_name, best_prompts_json(inputs));
    written.push_back(best_name);
  }

  if (!inputs.validations.empty() && wanted("validation")) {
    const std::string name = "validation_accuracy.csv";
    write_file(fs::path(out_dir) / name,
               validation_accuracy_csv(inputs, orders));
    written.push_back(name);
  }

  return written;
}

}  // namespace hintlab::metrics
