// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iostream>
#include <memory>

#include "originlens/netlayers.hpp"

namespace originlens::cli {

/// Exit codes. Status codes follow the verdict; 1 is any operational error.
enum ExitCode : int {
  kExitVerified = 0,
  kExitError = 1,
  kExitAiGenerated = 2,
  kExitWarning = 3,
  kExitInvalid = 4,
  kExitNoData = 5,
};

struct CliContext {
  std::istream* in = &std::cin;
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
  bool ansi = false;                     // colour the human report
  std::shared_ptr<Transport> transport;  // null: HTTP when a network layer is enabled
};

int run_cli(int argc, const char* const* argv, const CliContext& context);

}  // namespace originlens::cli
