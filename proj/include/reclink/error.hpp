// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reclink {

enum class ErrorKind {
  kConfig,
  kIo,
  kSchema,
  kFormat,
  kCacheInvalid,
  kBuild,
  kCalibration,
  kDimensionMismatch,
  kBackendUnavailable,
  kProtocol,
  kBackendContract,
  kSelectParse,
  kRerankerBackend,
  kSplit,
  kEvaluation,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library. The kind decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// 0 success, 1 config, 2 I/O or format, 3 backend, 4 evaluation/truth.
int exit_code(ErrorKind kind);

}  // namespace reclink
