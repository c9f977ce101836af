#include "hintlab/llm/backend.hpp"

#include <chrono>
#include <thread>

#include "hintlab/errors.hpp"

namespace hintlab::llm {

Backend::Backend(int max_in_flight) : max_in_flight_(max_in_flight) {}

Backend::Slot Backend::acquire_slot() {
  if (max_in_flight_ > 0) {
    std::unique_lock<std::mutex> lock(slot_mutex_);
    slot_available_.wait(lock, [this] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
  }
  return Slot(this);
}

void Backend::release_slot() {
  if (max_in_flight_ > 0) {
    {
      std::lock_guard<std::mutex> lock(slot_mutex_);
      --in_flight_;
    }
    slot_available_.notify_one();
  }
}

Backend::Slot::~Slot() {
  if (owner_) owner_->release_slot();
}

void CallLog::append(CallLogEntry entry) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.push_back(std::move(entry));
}

std::vector<CallLogEntry> CallLog::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_;
}

size_t CallLog::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

Gateway::Gateway(GatewaySettings settings, CallLog* log)
    : settings_(settings), log_(log) {}

std::string Gateway::complete(const MessageList& messages,
                              const CompletionParams& params,
                              Backend& backend) {
  if (messages.empty()) {
    throw ConfigError("complete: empty message list");
  }
  if (messages.front().role != Role::System) {
    throw ConfigError("complete: first message must have the system role");
  }
  for (const auto& m : messages) {
    if (m.content.empty()) throw ConfigError("complete: empty message content");
  }
  if (params.temperature < 0.0 || params.temperature > 1.0) {
    throw ConfigError("complete: temperature out of [0,1]");
  }
  if (params.max_tokens <= 0) {
    throw ConfigError("complete: max_tokens must be positive");
  }
  if (params.retry_budget < 0) {
    throw ConfigError("complete: negative retry_budget");
  }

  int backoff_ms = settings_.base_backoff_ms;
  for (int attempt = 0;; ++attempt) {
    auto started = std::chrono::steady_clock::now();
    try {
      auto slot = backend.acquire_slot();
      CompletionResult result = backend.complete_once(messages, params);
      if (log_) {
        CallLogEntry entry;
        entry.model_id = params.model_id;
        entry.backend_id = backend.backend_id();
        entry.latency_ms =
            std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - started)
                .count();
        entry.prompt_tokens = result.prompt_tokens;
        entry.completion_tokens = result.completion_tokens;
        entry.transport_attempts = attempt + 1;
        entry.ok = true;
        entry.temperature = params.temperature;
        entry.sample_ordinal = params.sample_ordinal;
        if (settings_.capture_messages) entry.messages = messages;
        log_->append(std::move(entry));
      }
      return result.text;
    } catch (const TransportError& e) {
      if (!e.transient || attempt >= params.retry_budget) {
        if (log_) {
          CallLogEntry entry;
          entry.model_id = params.model_id;
          entry.backend_id = backend.backend_id();
          entry.transport_attempts = attempt + 1;
          entry.ok = false;
          entry.temperature = params.temperature;
          entry.sample_ordinal = params.sample_ordinal;
          if (settings_.capture_messages) entry.messages = messages;
          log_->append(std::move(entry));
        }
        throw TransportError(std::string(e.what()) + " (after " +
                                 std::to_string(attempt + 1) + " attempts)",
                             attempt + 1, e.transient);
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms = std::min(backoff_ms * 2, settings_.max_backoff_ms);
    }
  }
}

}  // namespace hintlab::llm
