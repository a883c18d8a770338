#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace mmr {

// Base class for every error raised by the library. `code()` is a stable,
// machine-readable identifier (e.g. "parse-error", "unknown-field").
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Malformed input bytes. Line is 1-based; offset is the byte offset into the
// input where the problem was detected.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t offset,
             std::string code = "parse-error")
      : Error(std::move(code), message + " (line " + std::to_string(line) +
                                   ", offset " + std::to_string(offset) + ")"),
        line_(line),
        offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

}  // namespace mmr
