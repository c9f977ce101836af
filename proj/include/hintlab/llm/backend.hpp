#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hintlab/llm/chat.hpp"

namespace hintlab::llm {

// One chat-completion backend (HTTP endpoint or scripted mock). Implements a
// single uninstrumented call; retries, backoff, logging, and the in-flight
// bound live in Gateway. Instances are shared across concurrent tasks.
class Backend {
 public:
  explicit Backend(int max_in_flight = 0);  // 0 = unbounded
  virtual ~Backend() = default;

  virtual CompletionResult complete_once(const MessageList& messages,
                                         const CompletionParams& params) = 0;
  virtual std::string backend_id() const = 0;

  // RAII in-flight slot; blocks while max_in_flight calls are outstanding.
  class Slot {
   public:
    explicit Slot(Backend* owner) : owner_(owner) {}
    Slot(Slot&& other) noexcept : owner_(other.owner_) { other.owner_ = nullptr; }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;
    Slot& operator=(Slot&&) = delete;
    ~Slot();

   private:
    Backend* owner_;
  };
  Slot acquire_slot();

 private:
  void release_slot();

  int max_in_flight_;
  int in_flight_ = 0;
  std::mutex slot_mutex_;
  std::condition_variable slot_available_;
};

// One completed (or failed) gateway call.
struct CallLogEntry {
  std::string model_id;
  std::string backend_id;
  double latency_ms = 0.0;
  std::optional<long long> prompt_tokens;    // absent = unknown
  std::optional<long long> completion_tokens;
  int transport_attempts = 1;  // total tries including the successful one
  bool ok = false;
  double temperature = 0.0;
  int sample_ordinal = 0;
  MessageList messages;  // populated only when capture_messages is on
};

// Append-only sink behind a single-writer lock; shared by concurrent cells.
class CallLog {
 public:
  void append(CallLogEntry entry);
  std::vector<CallLogEntry> snapshot() const;
  size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<CallLogEntry> entries_;
};

struct GatewaySettings {
  int base_backoff_ms = 100;  // doubles per retry
  int max_backoff_ms = 2000;
  bool capture_messages = false;  // store full message lists in the call log
};

// The one entry point the pipelines call: validates the request, holds an
// in-flight slot on the backend, retries transient transport failures up to
// params.retry_budget with exponential backoff (identical messages and
// params), and records every call in the log.
class Gateway {
 public:
  explicit Gateway(GatewaySettings settings = {}, CallLog* log = nullptr);

  std::string complete(const MessageList& messages,
                       const CompletionParams& params, Backend& backend);

 private:
  GatewaySettings settings_;
  CallLog* log_;
};

}  // namespace hintlab::llm
