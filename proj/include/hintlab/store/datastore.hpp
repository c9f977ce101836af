#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hintlab::store {

// Layout on disk:
//   <root>/<run_id>/manifest        one JSON document, rewritten atomically
//   <root>/<run_id>/records.log     one RecordEnvelope JSON object per line
//   <root>/<run_id>/reports/        CSV/plot outputs
//
// The record log is append-only: a crash leaves a valid prefix, every line
// of which still parses, and resume scans it to find completed work.

struct RunManifest {
  std::string run_id;
  std::string created_at;  // ISO-8601 UTC
  std::string kind;        // "stage1" | "stage2" | "validate"
  std::string language;    // template language tag
  nlohmann::json config;   // full config snapshot (credential env names only)
  nlohmann::json cursor;   // last completed cell key, advisory for resume
  bool finalized = false;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

// One persisted record: a version/type header, timestamp, and a content hash
// over the payload's canonical serialization so torn or edited lines are
// detected at load time.
struct RecordEnvelope {
  int schema_version = 1;
  std::string record_type;  // "attempt" | "error_entry" | "tournament" | ...
  std::string timestamp;
  std::string content_hash;
  nlohmann::json payload;
};

struct LoadedRecord {
  std::string record_type;
  nlohmann::json payload;
};

struct CorruptionReport {
  size_t line_number = 0;  // 1-based
  std::string reason;
};

struct LoadResult {
  std::vector<LoadedRecord> records;
  std::vector<CorruptionReport> corrupt;
};

// FNV-1a 64-bit over the payload's compact JSON dump, hex-encoded.
std::string content_hash(const nlohmann::json& payload);

class RunStore {
 public:
  explicit RunStore(std::string root_dir);

  const std::string& root() const { return root_; }
  std::string run_dir(const std::string& run_id) const;
  bool run_exists(const std::string& run_id) const;
  std::vector<std::string> list_runs() const;

  // Creates the run directory and manifest. Fails if the run already exists.
  void create_run(const RunManifest& manifest);

  RunManifest read_manifest(const std::string& run_id) const;
  // Atomic rewrite (temp file + rename); refuses to un-finalize.
  void write_manifest(const RunManifest& manifest);
  void advance_cursor(const std::string& run_id, const nlohmann::json& cursor);
  void finalize(const std::string& run_id);

  // Appends one envelope line; returns the record ordinal (0-based).
  size_t append(const std::string& run_id, const std::string& record_type,
                const nlohmann::json& payload);

  // Yields payloads in append order; lines that fail to parse or whose hash
  // does not match are reported and skipped. Empty filter = all types.
  LoadResult load(const std::string& run_id,
                  const std::string& record_type_filter = "") const;

 private:
  std::string manifest_path(const std::string& run_id) const;
  std::string log_path(const std::string& run_id) const;

  std::string root_;

  // Appends from concurrent cells funnel through this lock (single-writer
  // sink); the ordinal cache avoids rescanning the log on every append.
  mutable std::mutex append_mutex_;
  mutable std::map<std::string, size_t> next_ordinal_;
};

}  // namespace hintlab::store
