#include "hintlab/store/datastore.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hintlab/errors.hpp"

namespace hintlab::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string now_iso8601_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string content_hash(const json& payload) {
  const std::string bytes = payload.dump();
  uint64_t hash = 1469598103934665603ull;  // FNV offset basis
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;  // FNV prime
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

json RunManifest::to_json() const {
  return json{{"run_id", run_id},       {"created_at", created_at},
              {"kind", kind},           {"language", language},
              {"config", config},       {"cursor", cursor},
              {"finalized", finalized}, {"schema_version", 1}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.created_at = j.at("created_at").get<std::string>();
  m.kind = j.at("kind").get<std::string>();
  m.language = j.value("language", "fr");
  m.config = j.value("config", json::object());
  m.cursor = j.value("cursor", json::object());
  m.finalized = j.value("finalized", false);
  return m;
}

RunStore::RunStore(std::string root_dir) : root_(std::move(root_dir)) {}

std::string RunStore::run_dir(const std::string& run_id) const {
  return (fs::path(root_) / run_id).string();
}

std::string RunStore::manifest_path(const std::string& run_id) const {
  return (fs::path(run_dir(run_id)) / "manifest").string();
}

std::string RunStore::log_path(const std::string& run_id) const {
  return (fs::path(run_dir(run_id)) / "records.log").string();
}

bool RunStore::run_exists(const std::string& run_id) const {
  return fs::exists(manifest_path(run_id));
}

std::vector<std::string> RunStore::list_runs() const {
  std::vector<std::string> out;
  if (!fs::exists(root_)) return out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest")) {
      out.push_back(entry.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void RunStore::create_run(const RunManifest& manifest) {
  if (manifest.run_id.empty()) {
    throw ConfigError("create_run: empty run_id");
  }
  fs::path dir = run_dir(manifest.run_id);
  if (fs::exists(dir / "manifest")) {
    throw IoError("run already exists: " + manifest.run_id);
  }
  std::error_code ec;
  fs::create_directories(dir / "reports", ec);
  if (ec) {
    throw IoError("cannot create run directory " + dir.string() + ": " +
                  ec.message());
  }
  RunManifest stamped = manifest;
  if (stamped.created_at.empty()) stamped.created_at = now_iso8601_utc();
  write_manifest(stamped);
  // Ensure the log file exists so a run with zero records still loads.
  std::ofstream(log_path(manifest.run_id), std::ios::app);
}

RunManifest RunStore::read_manifest(const std::string& run_id) const {
  std::ifstream in(manifest_path(run_id));
  if (!in) {
    throw MissingRun("no run named '" + run_id + "' under " + root_);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("manifest for run " + run_id + " is unreadable: " + e.what());
  }
  return RunManifest::from_json(j);
}

void RunStore::write_manifest(const RunManifest& manifest) {
  fs::path final_path = manifest_path(manifest.run_id);
  if (fs::exists(final_path)) {
    RunManifest current = read_manifest(manifest.run_id);
    if (current.finalized && !manifest.finalized) {
      throw RunFinalized("run " + manifest.run_id +
                         " is finalized; manifest cannot be reopened");
    }
  }
  fs::path tmp_path = final_path;
  tmp_path += ".tmp";
  {
    std::ofstream out(tmp_path, std::ios::trunc);
    if (!out) {
      throw IoError("cannot write manifest for run " + manifest.run_id);
    }
    out << manifest.to_json().dump(2) << "\n";
  }
  std::error_code ec;
  fs::rename(tmp_path, final_path, ec);
  if (ec) {
    throw IoError("cannot replace manifest for run " + manifest.run_id + ": " +
                  ec.message());
  }
}

void RunStore::advance_cursor(const std::string& run_id, const json& cursor) {
  RunManifest m = read_manifest(run_id);
  if (m.finalized) {
    throw RunFinalized("run " + run_id + " is finalized");
  }
  m.cursor = cursor;
  write_manifest(m);
}

void RunStore::finalize(const std::string& run_id) {
  RunManifest m = read_manifest(run_id);
  m.finalized = true;
  write_manifest(m);
  std::lock_guard<std::mutex> guard(append_mutex_);
  next_ordinal_.erase(run_id);
}

size_t RunStore::append(const std::string& run_id, const std::string& record_type,
                        const json& payload) {
  std::lock_guard<std::mutex> guard(append_mutex_);

  size_t ordinal = 0;
  bool tail_is_partial = false;
  auto cached = next_ordinal_.find(run_id);
  if (cached == next_ordinal_.end()) {
    RunManifest m = read_manifest(run_id);
    if (m.finalized) {
      throw RunFinalized("append to finalized run " + run_id);
    }
    // First append through this handle: the log itself is the source of
    // truth for the next ordinal. A log cut off mid-record (crash, torn
    // write) ends without a newline; new records must start a fresh line or
    // they would fuse with the partial tail and be unreadable.
    std::ifstream in(log_path(run_id), std::ios::binary);
    char c;
    char last = '\n';
    while (in.get(c)) {
      if (c == '\n') ++ordinal;
      last = c;
    }
    if (last != '\n') {
      tail_is_partial = true;
      ++ordinal;  // the partial tail occupies a line number of its own
    }
  } else {
    ordinal = cached->second;
  }

  json envelope = {{"v", 1},
                   {"type", record_type},
                   {"ts", now_iso8601_utc()},
                   {"hash", content_hash(payload)},
                   {"payload", payload}};

  std::ofstream out(log_path(run_id), std::ios::app);
  if (!out) {
    throw IoError("cannot append to record log of run " + run_id);
  }
  if (tail_is_partial) out << "\n";
  out << envelope.dump() << "\n";
  out.flush();
  if (!out) {
    throw IoError("write to record log of run " + run_id + " failed");
  }
  next_ordinal_[run_id] = ordinal + 1;
  return ordinal;
}

LoadResult RunStore::load(const std::string& run_id,
                          const std::string& record_type_filter) const {
  if (!run_exists(run_id)) {
    throw MissingRun("no run named '" + run_id + "' under " + root_);
  }
  LoadResult result;
  std::ifstream in(log_path(run_id));
  if (!in) return result;  // empty log

  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json envelope = json::parse(line, nullptr, false);
    if (envelope.is_discarded() || !envelope.is_object() ||
        !envelope.contains("type") || !envelope.contains("payload") ||
        !envelope.contains("hash")) {
      result.corrupt.push_back({line_number, "unparseable or incomplete line"});
      continue;
    }
    if (content_hash(envelope["payload"]) != envelope["hash"].get<std::string>()) {
      result.corrupt.push_back({line_number, "content hash mismatch"});
      continue;
    }
    std::string type = envelope["type"].get<std::string>();
    if (!record_type_filter.empty() && type != record_type_filter) continue;
    result.records.push_back({std::move(type), envelope["payload"]});
  }
  return result;
}

}  // namespace hintlab::store
