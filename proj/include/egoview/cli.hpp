// Copyright 2026 The egoview Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "egoview/error.hpp"

namespace egoview::cli {

inline constexpr std::string_view kToolVersion = "0.3.0";

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kSchema = 2,
  kReference = 3,
  kService = 4,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Runs one command line (args[0] is the program name). Human-readable
/// summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace egoview::cli
