/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbb {

/// A caller broke a documented precondition (bad index, length mismatch, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed instance or configuration text.  `line()` is 1-based, 0 if unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
  {
  }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Problem too large for an exhaustive method.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A certificate does not belong to the instance it is checked against.
class VerificationRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cbb
