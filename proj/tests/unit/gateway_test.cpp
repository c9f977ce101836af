#include "doctest.h"

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hintlab/core/types.hpp"
#include "hintlab/errors.hpp"
#include "hintlab/llm/backend.hpp"
#include "hintlab/llm/mock_backend.hpp"

using namespace hintlab;
using namespace hintlab::llm;
using nlohmann::json;

namespace {

// Fails the first `fail_times` calls, then answers.
class FlakyBackend : public Backend {
 public:
  FlakyBackend(int fail_times, bool transient)
      : Backend(0), fail_times_(fail_times), transient_(transient) {}

  CompletionResult complete_once(const MessageList&,
                                 const CompletionParams&) override {
    if (calls_.fetch_add(1) < fail_times_) {
      throw TransportError("upstream unavailable", 1, transient_);
    }
    CompletionResult r;
    r.text = "recovered";
    r.prompt_tokens = 11;
    r.completion_tokens = 7;
    return r;
  }
  std::string backend_id() const override { return "flaky"; }

  int calls() const { return calls_.load(); }

 private:
  std::atomic<int> calls_{0};
  int fail_times_;
  bool transient_;
};

std::vector<core::Exercise> exercises() {
  return core::load_exercises(std::string(HINTLAB_FIXTURES_DIR) +
                              "/exercises_en.json");
}

MessageList solve_messages(const core::Exercise& ex) {
  return {{Role::System, "You are a high school student."},
          {Role::User,
           "Your objective is to answer the questions in the exercises by "
           "following the given instructions.\nExercise and question: " +
               ex.statement + "\nInstructions: " + ex.instruction}};
}

CompletionParams params_for(const std::string& model, double temp,
                            int ordinal) {
  CompletionParams p;
  p.model_id = model;
  p.temperature = temp;
  p.sample_ordinal = ordinal;
  p.retry_budget = 2;
  return p;
}

GatewaySettings fast_settings(bool capture = false) {
  GatewaySettings s;
  s.base_backoff_ms = 1;
  s.max_backoff_ms = 4;
  s.capture_messages = capture;
  return s;
}

}  // namespace

TEST_CASE("requests are validated before any backend work") {
  Gateway gateway(fast_settings());
  FlakyBackend backend(0, true);
  auto ex = exercises().front();
  auto messages = solve_messages(ex);

  auto params = params_for("m", 0.5, 0);
  params.temperature = 1.5;
  CHECK_THROWS_AS(gateway.complete(messages, params, backend), ConfigError);

  params = params_for("m", 0.5, 0);
  CHECK_THROWS_AS(gateway.complete({}, params, backend), ConfigError);

  MessageList user_first{{Role::User, "hello"}};
  CHECK_THROWS_AS(gateway.complete(user_first, params, backend), ConfigError);

  params.max_tokens = 0;
  CHECK_THROWS_AS(gateway.complete(messages, params, backend), ConfigError);
  CHECK(backend.calls() == 0);
}

TEST_CASE("transient transport failures burn the retry budget") {
  CallLog log;
  Gateway gateway(fast_settings(), &log);

  SUBCASE("recovery inside the budget") {
    FlakyBackend backend(2, true);
    auto text = gateway.complete(solve_messages(exercises().front()),
                                 params_for("m", 0.2, 0), backend);
    CHECK(text == "recovered");
    CHECK(backend.calls() == 3);
    REQUIRE(log.size() == 1);
    auto entry = log.snapshot().front();
    CHECK(entry.ok);
    CHECK(entry.transport_attempts == 3);
    CHECK(entry.prompt_tokens == 11);
    CHECK(entry.messages.empty());  // capture off
  }

  SUBCASE("budget exhaustion surfaces the failure") {
    FlakyBackend backend(5, true);
    CHECK_THROWS_AS(gateway.complete(solve_messages(exercises().front()),
                                     params_for("m", 0.2, 0), backend),
                    TransportError);
    CHECK(backend.calls() == 3);  // 1 + retry_budget
    auto entry = log.snapshot().front();
    CHECK_FALSE(entry.ok);
    CHECK(entry.transport_attempts == 3);
  }

  SUBCASE("non-transient failures are not retried") {
    FlakyBackend backend(1, false);
    try {
      gateway.complete(solve_messages(exercises().front()),
                       params_for("m", 0.2, 0), backend);
      FAIL("expected TransportError");
    } catch (const TransportError& e) {
      CHECK(e.attempts == 1);
      CHECK_FALSE(e.transient);
    }
    CHECK(backend.calls() == 1);
  }
}

TEST_CASE("the call log captures messages only when asked") {
  CallLog log;
  Gateway gateway(fast_settings(true), &log);
  FlakyBackend backend(0, true);
  auto messages = solve_messages(exercises().front());
  gateway.complete(messages, params_for("model-x", 0.8, 4), backend);
  auto entry = log.snapshot().front();
  CHECK(entry.model_id == "model-x");
  CHECK(entry.backend_id == "flaky");
  CHECK(entry.temperature == 0.8);
  CHECK(entry.sample_ordinal == 4);
  CHECK(entry.messages == messages);
}

TEST_CASE("the scripted mock is a pure function of messages and params") {
  auto exs = exercises();
  json script = {
      {"rules",
       {{{"when", {{"kind", "solve"}}},
         {"do",
          {{{"behavior", "correct"}},
           {{"behavior", "malformed"}, {"text", "not json"}}}}}}}};
  MockBackend backend(script, exs);
  Gateway gateway(fast_settings());

  auto messages = solve_messages(exs.front());
  auto first = gateway.complete(messages, params_for("m", 0.2, 0), backend);
  auto again = gateway.complete(messages, params_for("m", 0.2, 0), backend);
  CHECK(first == again);
  CHECK(first.find(exs.front().accepted_answers.front()) != std::string::npos);

  // The do-list cycles on the sample ordinal.
  auto odd = gateway.complete(messages, params_for("m", 0.2, 1), backend);
  CHECK(odd == "not json");
  auto wrapped = gateway.complete(messages, params_for("m", 0.2, 2), backend);
  CHECK(wrapped == first);
}

TEST_CASE("a strict script turns unmatched requests into misses") {
  auto exs = exercises();
  json script = {{"strict", true}, {"rules", json::array()}};
  MockBackend backend(script, exs);
  Gateway gateway(fast_settings());
  CHECK_THROWS_AS(gateway.complete(solve_messages(exs.front()),
                                   params_for("m", 0.2, 0), backend),
                  MockScriptMiss);
}

TEST_CASE("the in-flight bound is honoured under concurrent load") {
  auto exs = exercises();
  json script = {
      {"rules",
       {{{"when", {{"kind", "solve"}}},
         {"delay_ms", 15},
         {"do", {{{"behavior", "correct"}}}}}}}};
  MockBackend backend(script, exs, 2);
  Gateway gateway(fast_settings());
  auto messages = solve_messages(exs.front());

  std::vector<std::thread> workers;
  std::atomic<int> failures{0};
  for (int i = 0; i < 8; ++i) {
    workers.emplace_back([&, i] {
      try {
        gateway.complete(messages, params_for("m", 0.2, i), backend);
      } catch (...) {
        failures.fetch_add(1);
      }
    });
  }
  for (auto& w : workers) w.join();
  CHECK(failures.load() == 0);
  CHECK(backend.max_in_flight_observed() >= 1);
  CHECK(backend.max_in_flight_observed() <= 2);
}
