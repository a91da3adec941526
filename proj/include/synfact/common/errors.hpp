#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace synfact {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing configuration: unknown language, unsupported compression,
/// unreadable config file, invalid field values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed XML in a dump. `byte_offset` points into the decompressed stream.
class XmlError : public Error {
 public:
  XmlError(const std::string& what, std::uint64_t byte_offset)
      : Error(what + " (at byte " + std::to_string(byte_offset) + ")"), byte_offset_(byte_offset) {}
  std::uint64_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

/// Model output that cannot be turned into a GenerationJudgment.
class ParseFailure : public Error {
 public:
  using Error::Error;
};

/// Non-retryable endpoint error (HTTP 4xx other than 408/429).
class EndpointError : public Error {
 public:
  EndpointError(const std::string& what, int status) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Retries exhausted; the work item can be resumed later.
class UnavailableError : public Error {
 public:
  UnavailableError(const std::string& what, int attempts) : Error(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

/// A service answered, but with a payload that violates the wire protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Invariant violation detected in pipeline output (e.g. subset property).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace synfact
