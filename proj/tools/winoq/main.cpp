// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "winoq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return winoq::cli::run(args, std::cout, std::cerr);
}
