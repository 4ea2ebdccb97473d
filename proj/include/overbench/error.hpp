/*
 * Copyright 2026 The overbench Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace overbench {

// Every error carries the category the CLI maps onto its exit code.
enum class ErrorKind {
  Validation,    // bad input or configuration; exit 2
  Integrity,     // trace or history content is inconsistent; exit 3
  Io,            // filesystem failure; exit 3
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::Validation, what) {}
};

// Contract violations detected when wiring components together, e.g. a
// single-producer queue declared with several producers.
class ConfigurationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InsufficientDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ComparabilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what)
      : Error(ErrorKind::Integrity, what) {}
};

class FormatError : public IntegrityError {
 public:
  using IntegrityError::IntegrityError;
};

class SchemaMismatchError : public IntegrityError {
 public:
  using IntegrityError::IntegrityError;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

// Another writer holds the history lock. Callers may retry.
class LockConflictError : public IoError {
 public:
  using IoError::IoError;
};

// Raised by enqueue once the queue is shut down or aborted.
class ClosedChannelError : public Error {
 public:
  explicit ClosedChannelError(const std::string& what)
      : Error(ErrorKind::Integrity, what) {}
};

}  // namespace overbench
