#pragma once

#include <stdexcept>
#include <string>

namespace keo {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (files, LLM output). Carries a line number when known.
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg, long line = -1)
      : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line_(line) {}
  long line() const { return line_; }

private:
  long line_;
};

// Contract violation on otherwise well-formed input (bad config, missing artifact).
class ValidationError : public Error {
public:
  using Error::Error;
};

// Network-level failure. retryable() distinguishes transient transport faults
// from definitive remote rejections.
class TransportError : public Error {
public:
  TransportError(const std::string& msg, bool retryable) : Error(msg), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

private:
  bool retryable_;
};

// Replay-mode lookup failure; names the request hash that had no transcript.
class ReplayMissError : public Error {
public:
  explicit ReplayMissError(const std::string& request_hash)
      : Error("no recorded transcript for request hash " + request_hash), hash_(request_hash) {}
  const std::string& request_hash() const { return hash_; }

private:
  std::string hash_;
};

// Judge output that could not be turned into a complete report. Keeps the raw
// text so the caller can log or re-prompt.
class JudgeParseError : public Error {
public:
  JudgeParseError(const std::string& msg, std::string raw)
      : Error(msg), raw_(std::move(raw)) {}
  const std::string& raw_output() const { return raw_; }

private:
  std::string raw_;
};

}  // namespace keo
