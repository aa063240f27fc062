// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reclink {

/// Entry point of the `reclink` tool. `args` excludes the program name.
/// Data goes to `out` (or --out), progress and errors to `err`. Returns the
/// process exit code: 0 success, 1 config, 2 I/O or format, 3 backend,
/// 4 evaluation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reclink
