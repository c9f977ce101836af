#pragma once

#include <stdexcept>
#include <string>

namespace hintlab {

// Base class for everything thrown by this library, so callers can catch
// hintlab::Error at the top level and still get typed handling below it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid or inconsistent run configuration; raised before any backend call.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Transport-level failure. Transient failures (connection errors, 5xx, 429)
// are retried by the gateway up to the retry budget; non-transient ones
// (e.g. 4xx rejections) surface immediately.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts_made,
                 bool is_transient = true)
      : Error(what), attempts(attempts_made), transient(is_transient) {}
  int attempts = 0;
  bool transient = true;
};

// The scripted mock had no applicable rule for a request.
class MockScriptMiss : public Error {
 public:
  explicit MockScriptMiss(const std::string& what) : Error(what) {}
};

// No structured payload could be extracted from a model's raw output.
class DecodingFailure : public Error {
 public:
  DecodingFailure(const std::string& what, std::string raw_text)
      : Error(what), raw(std::move(raw_text)) {}
  std::string raw;
};

// An error label that maps to no taxonomy member.
class UnknownLabel : public Error {
 public:
  UnknownLabel(const std::string& what, std::string label_text)
      : Error(what), label(std::move(label_text)) {}
  std::string label;
};

// Canonicalization or aggregation over an empty collection.
class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error(what) {}
};

// Metric requested for a cell with a zero denominator.
class EmptyCell : public Error {
 public:
  explicit EmptyCell(const std::string& what) : Error(what) {}
};

// A required placeholder value was not provided to render().
class MissingField : public Error {
 public:
  explicit MissingField(const std::string& what) : Error(what) {}
};

// A field was provided that the prompt kind forbids (attempt on a baseline).
class ForbiddenField : public Error {
 public:
  explicit ForbiddenField(const std::string& what) : Error(what) {}
};

// Datastore: write attempted against a finalized run.
class RunFinalized : public Error {
 public:
  explicit RunFinalized(const std::string& what) : Error(what) {}
};

// Datastore/CLI: the named run does not exist.
class MissingRun : public Error {
 public:
  explicit MissingRun(const std::string& what) : Error(what) {}
};

// Filesystem-level failure.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace hintlab
