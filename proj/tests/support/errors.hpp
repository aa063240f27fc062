// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "reclink/error.hpp"

namespace testing_util {

/// Kind of the reclink::Error thrown by `body`, or nullopt.
inline std::optional<reclink::ErrorKind> error_kind(const std::function<void()>& body) {
  try {
    body();
  } catch (const reclink::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

/// what() of the reclink::Error thrown by `body`, or "".
inline std::string error_message(const std::function<void()>& body) {
  try {
    body();
  } catch (const reclink::Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace testing_util
