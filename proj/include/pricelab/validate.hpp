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

#ifndef PRICELAB_VALIDATE_HPP
#define PRICELAB_VALIDATE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pricelab {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidateOptions {
  int workers = 1;
  std::uint64_t seed = 20260101;
  /// Replications for the Scale-1 regret-scaling and noise checks.
  int scale1_reps = 100;
  /// Scratch directory for the manifest rerun check.
  std::string scratch_dir = ".";
  /// Log sink for progress lines; may be empty.
  std::function<void(const std::string &)> log;
};

/// Names of the acceptance checks, indexed 1..10.
std::vector<std::string> acceptance_names();

/// Runs one acceptance check (1..10).
CheckResult run_acceptance_check(int id, const ValidateOptions &opts);

/// Formats "[PASS] 3 regret scaling: ..." for display.
std::string format_check(const CheckResult &r);

} // namespace pricelab

#endif // PRICELAB_VALIDATE_HPP
