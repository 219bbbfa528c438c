#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace clockmps {

/// Malformed input text; `line` is 1-based (0 when not line-specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& reason)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + reason
                                    : reason),
        line_(line),
        reason_(reason) {}

  int line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  int line_;
  std::string reason_;
};

/// A requested size does not fit the configured desk-scale budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, std::uint64_t required, std::uint64_t limit)
      : std::runtime_error(what + ": requires " + std::to_string(required) +
                           ", limit " + std::to_string(limit)),
        required_(required),
        limit_(limit) {}

  std::uint64_t required() const { return required_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t required_;
  std::uint64_t limit_;
};

}  // namespace clockmps
