// Copyright (C) 2026 The logoseek authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace logoseek {

/// Base class for all errors raised by the library on bad input or bad data.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input text could not be decoded (bad syntax, wrong field type, bad header).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Decoded data violates a documented invariant (bounds, uniqueness, ranges).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A library-internal invariant broke. Maps to exit code 2 in the CLI.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace logoseek
