#pragma once

#include <stdexcept>
#include <string>

namespace freact {

// Base for every error this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (empty question, round < 1, ...).
struct InvalidInput : Error {
  using Error::Error;
};

// A prompt template failed validation at load time.
struct TemplateError : Error {
  using Error::Error;
};

// Transport/HTTP failure that survived the retry policy.
struct BackendError : Error {
  BackendError(int status_code, const std::string& body_excerpt, const std::string& message)
      : Error(message), status(status_code), body(body_excerpt) {}
  int status;        // HTTP status, or 0 for transport-level failures
  std::string body;  // response body excerpt, possibly empty
};

// Scripted backend ran out of canned responses. Signals a broken test setup,
// so it deliberately does not derive from BackendError.
struct ScriptExhausted : Error {
  using Error::Error;
};

// Scripted backend saw a prompt that misses an expected substring.
struct ScriptMismatch : Error {
  using Error::Error;
};

// A script or fixture file failed to parse.
struct FixtureFormatError : Error {
  using Error::Error;
};

// Replay fixture has no entry for an action the episode executed.
struct FixtureMiss : Error {
  using Error::Error;
};

// Live tool transport failure after retries. The engine converts this into a
// synthetic observation and keeps going.
struct ToolError : Error {
  using Error::Error;
};

struct DatasetFormatError : Error {
  using Error::Error;
};

// Episodes and tasks passed to aggregate() do not line up by id.
struct AlignmentError : Error {
  using Error::Error;
};

struct SchemaVersionError : Error {
  using Error::Error;
};

struct TraceParseError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace freact
