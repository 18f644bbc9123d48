// Copyright 2026 The pricelab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Runs the ten acceptance checks and prints one line per check. Exits 0 once
// every check has run; pass --strict to exit 1 when any check fails.
// --report FILE also writes the lines to FILE.

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "pricelab/validate.hpp"

int main(int argc, char **argv) {
  bool strict = false;
  std::string report;
  pricelab::ValidateOptions opts;
  opts.workers = 4;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) {
      opts.workers = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--scale1-reps") == 0 && i + 1 < argc) {
      opts.scale1_reps = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--report") == 0 && i + 1 < argc) {
      report = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--strict] [--workers K] [--scale1-reps N] [--report FILE]\n";
      return 2;
    }
  }
  opts.scratch_dir = std::filesystem::temp_directory_path().string();
  std::ofstream out;
  if (!report.empty()) {
    out.open(report);
  }
  auto emit = [&](const std::string &line) {
    std::cout << line << std::endl;
    if (out) {
      out << line << "\n" << std::flush;
    }
  };
  int failed = 0;
  for (int id = 1; id <= 10; ++id) {
    try {
      const pricelab::CheckResult r = pricelab::run_acceptance_check(id, opts);
      emit(pricelab::format_check(r));
      failed += !r.pass;
    } catch (const std::exception &e) {
      emit("[FAIL] " + std::to_string(id) + ": error: " + e.what());
      return 2;
    }
  }
  emit(std::to_string(10 - failed) + "/10 criteria passed");
  return strict && failed > 0 ? 1 : 0;
}
