// Copyright 2026 The exposure-probe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace xprobe {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value lies outside the domain of an operation (e.g. a probability <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A window or sequence has the wrong number of tokens.
class LengthError : public Error {
 public:
  using Error::Error;
};

// Span outside of the document it is supposed to index.
class SpanError : public Error {
 public:
  using Error::Error;
};

// Unrecognized magic bytes or format version in a binary container.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Integrity trailer does not match the payload (truncation, corruption).
class ChecksumError : public Error {
 public:
  using Error::Error;
};

// A JSON-lines record violates its schema.  `line` is 1-based.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : Error("record " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input/output failure (unreadable file, unwritable directory).
class IoError : public Error {
 public:
  using Error::Error;
};

// Wraps a failure with the pipeline stage it happened in.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage \"" + stage + "\": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace xprobe
