#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hintlab/errors.hpp"
#include "hintlab/store/datastore.hpp"

using namespace hintlab;
using namespace hintlab::store;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempRoot {
  fs::path path;
  TempRoot() {
    path = fs::temp_directory_path() /
           ("hintlab-store-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempRoot() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

RunManifest manifest_named(const std::string& run_id) {
  RunManifest m;
  m.run_id = run_id;
  m.kind = "stage1";
  m.language = "fr";
  m.config = json{{"num_simulations", 40}};
  return m;
}

}  // namespace

TEST_CASE("runs are created once and listed") {
  TempRoot root;
  RunStore store(root.path.string());
  CHECK(store.list_runs().empty());
  CHECK_FALSE(store.run_exists("r1"));

  store.create_run(manifest_named("r1"));
  CHECK(store.run_exists("r1"));
  CHECK(store.list_runs() == std::vector<std::string>{"r1"});
  CHECK_THROWS_AS(store.create_run(manifest_named("r1")), IoError);

  auto m = store.read_manifest("r1");
  CHECK(m.run_id == "r1");
  CHECK(m.kind == "stage1");
  CHECK_FALSE(m.created_at.empty());
  CHECK_FALSE(m.finalized);
  CHECK(m.config.at("num_simulations") == 40);

  CHECK_THROWS_AS(store.read_manifest("ghost"), MissingRun);
  CHECK_THROWS_AS(store.load("ghost"), MissingRun);
}

TEST_CASE("appended records come back in order with ordinals") {
  TempRoot root;
  RunStore store(root.path.string());
  store.create_run(manifest_named("r1"));

  CHECK(store.append("r1", "attempt", json{{"i", 0}}) == 0);
  CHECK(store.append("r1", "attempt", json{{"i", 1}}) == 1);
  CHECK(store.append("r1", "tournament", json{{"i", 2}}) == 2);

  auto all = store.load("r1");
  CHECK(all.corrupt.empty());
  REQUIRE(all.records.size() == 3);
  CHECK(all.records[0].record_type == "attempt");
  CHECK(all.records[0].payload.at("i") == 0);
  CHECK(all.records[2].record_type == "tournament");

  auto filtered = store.load("r1", "attempt");
  REQUIRE(filtered.records.size() == 2);
  CHECK(filtered.records[1].payload.at("i") == 1);

  SUBCASE("a fresh handle resumes ordinals from the log") {
    RunStore other(root.path.string());
    CHECK(other.append("r1", "attempt", json{{"i", 3}}) == 3);
  }
}

TEST_CASE("finalized runs refuse writes") {
  TempRoot root;
  RunStore store(root.path.string());
  store.create_run(manifest_named("r1"));
  store.append("r1", "attempt", json{{"i", 0}});
  store.finalize("r1");
  CHECK(store.read_manifest("r1").finalized);
  CHECK_THROWS_AS(store.append("r1", "attempt", json{{"i", 1}}), RunFinalized);
  CHECK_THROWS_AS(store.advance_cursor("r1", json{{"cell", 1}}), RunFinalized);

  auto reopened = manifest_named("r1");
  CHECK_THROWS_AS(store.write_manifest(reopened), RunFinalized);
  // Reads still work.
  CHECK(store.load("r1").records.size() == 1);
}

TEST_CASE("cursor updates are persisted") {
  TempRoot root;
  RunStore store(root.path.string());
  store.create_run(manifest_named("r1"));
  store.advance_cursor("r1", json{{"exercise", "ex1-mod1"}, {"index", 12}});
  auto m = store.read_manifest("r1");
  CHECK(m.cursor.at("index") == 12);
}

TEST_CASE("torn and tampered lines are reported, not loaded") {
  TempRoot root;
  RunStore store(root.path.string());
  store.create_run(manifest_named("r1"));
  store.append("r1", "attempt", json{{"i", 0}});
  store.append("r1", "attempt", json{{"i", 1}});
  store.append("r1", "attempt", json{{"i", 2}});

  auto log_path = root.path / "r1" / "records.log";
  std::vector<std::string> lines;
  {
    std::ifstream in(log_path);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  REQUIRE(lines.size() == 3);
  // Tear the middle line in half and flip a payload digit in the last one
  // without recomputing its hash.
  lines[1] = lines[1].substr(0, lines[1].size() / 2);
  auto pos = lines[2].rfind("\"i\":2");
  REQUIRE(pos != std::string::npos);
  lines[2].replace(pos, 5, "\"i\":9");
  {
    std::ofstream out(log_path, std::ios::trunc);
    for (auto& line : lines) out << line << "\n";
  }

  auto result = store.load("r1");
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].payload.at("i") == 0);
  REQUIRE(result.corrupt.size() == 2);
  CHECK(result.corrupt[0].line_number == 2);
  CHECK(result.corrupt[0].reason == "unparseable or incomplete line");
  CHECK(result.corrupt[1].line_number == 3);
  CHECK(result.corrupt[1].reason == "content hash mismatch");
}

TEST_CASE("appending after a torn tail starts a fresh line") {
  TempRoot root;
  {
    RunStore store(root.path.string());
    store.create_run(manifest_named("r1"));
    store.append("r1", "attempt", json{{"i", 0}});
    store.append("r1", "attempt", json{{"i", 1}});
  }

  // Chop the log mid-way through the last record, as a crash would.
  auto log_path = root.path / "r1" / "records.log";
  auto size = fs::file_size(log_path);
  fs::resize_file(log_path, size - 10);

  RunStore store(root.path.string());
  CHECK(store.append("r1", "attempt", json{{"i", 1}}) == 2);
  store.append("r1", "attempt", json{{"i", 2}});

  auto result = store.load("r1");
  REQUIRE(result.records.size() == 3);
  CHECK(result.records[0].payload.at("i") == 0);
  CHECK(result.records[1].payload.at("i") == 1);
  CHECK(result.records[2].payload.at("i") == 2);
  REQUIRE(result.corrupt.size() == 1);
  CHECK(result.corrupt[0].line_number == 2);
  CHECK(result.corrupt[0].reason == "unparseable or incomplete line");
}

TEST_CASE("content hashes are stable and canonical") {
  // Key order must not matter: hashing happens over the canonical dump.
  json a = json::parse(R"({"x": 1, "y": "z"})");
  json b = json::parse(R"({"y": "z", "x": 1})");
  CHECK(content_hash(a) == content_hash(b));
  CHECK(content_hash(a).size() == 16);
  CHECK(content_hash(json{{"x", 2}}) != content_hash(json{{"x", 1}}));
}
