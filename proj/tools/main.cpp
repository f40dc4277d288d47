// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <unistd.h>

#include "cli.hpp"

int main(int argc, char** argv) {
  originlens::cli::CliContext ctx;
  ctx.ansi = ::isatty(STDOUT_FILENO) == 1;
  return originlens::cli::run_cli(argc, argv, ctx);
}
