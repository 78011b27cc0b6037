// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace winoq::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

// Runs `winoq <subcommand> [flags]`. `args` excludes the program name.
// Reports go to the --out file when given, otherwise to `out`; progress
// lines go to `out` when a report file is used and to `err` otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace winoq::cli
