// Copyright 2026 The qweak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qweak {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument (level out of range, bad bitstring length, ...).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// The dense backend refuses a state larger than its qubit limit.
class MemoryOutError : public Error {
  public:
    MemoryOutError(std::size_t qubits, std::size_t limit)
        : Error("memory out: dense state of " + std::to_string(qubits) + " qubits (2^" + std::to_string(qubits) +
                " amplitudes) exceeds the dense limit of " + std::to_string(limit) + " qubits"),
          qubits_(qubits),
          limit_(limit) {
    }

    std::size_t qubits() const {
        return qubits_;
    }
    std::size_t limit() const {
        return limit_;
    }

  private:
    std::size_t qubits_;
    std::size_t limit_;
};

/// Probability vector that is not a distribution (negative entries, bad total).
class DistributionError : public Error {
  public:
    using Error::Error;
};

/// Circuit text that does not parse. Line and column are 1-based.
class ParseError : public Error {
  public:
    ParseError(const std::string &message, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {
    }

    std::size_t line() const {
        return line_;
    }
    std::size_t column() const {
        return column_;
    }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// Valid OpenQASM outside the supported subset (`if`, `gate`, `opaque`, ...).
class UnsupportedFeatureError : public ParseError {
  public:
    UnsupportedFeatureError(const std::string &feature, std::size_t line, std::size_t column)
        : ParseError("unsupported feature: " + feature, line, column) {
    }
};

}  // namespace qweak
