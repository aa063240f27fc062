// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/error.hpp"

namespace reclink {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kCacheInvalid: return "cache-invalid";
    case ErrorKind::kBuild: return "build";
    case ErrorKind::kCalibration: return "calibration";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kBackendUnavailable: return "backend-unavailable";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kBackendContract: return "backend-contract";
    case ErrorKind::kSelectParse: return "select-parse";
    case ErrorKind::kRerankerBackend: return "reranker-backend";
    case ErrorKind::kSplit: return "split";
    case ErrorKind::kEvaluation: return "evaluation";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kCalibration:
      return 1;
    case ErrorKind::kIo:
    case ErrorKind::kSchema:
    case ErrorKind::kFormat:
    case ErrorKind::kCacheInvalid:
    case ErrorKind::kBuild:
      return 2;
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kBackendUnavailable:
    case ErrorKind::kProtocol:
    case ErrorKind::kBackendContract:
    case ErrorKind::kSelectParse:
    case ErrorKind::kRerankerBackend:
      return 3;
    case ErrorKind::kSplit:
    case ErrorKind::kEvaluation:
      return 4;
  }
  return 1;
}

}  // namespace reclink
