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

#ifndef PRICELAB_SIM_HPP
#define PRICELAB_SIM_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "pricelab/policies.hpp"

namespace pricelab {

/// N(0, sigma^2) per component, clamped below at -mean.
Vecd sample_noise(double sigma, const Vecd &mean_demand, Rng &rng);

struct EnvState {
  Vecd c;
  int t = 1;
  double revenue = 0.0;
};

enum class Curtailment { index_order, proportional };

struct StepOutcome {
  Vecd realized;
  Vecd served;
  double revenue = 0.0;
  Vecd c_after;
};

/// Sells min(d_j, capacity bound) product by product in ascending index.
/// Capacity below 1e-12 is treated as exhausted and set to exactly 0.
StepOutcome serve(const Vecd &capacity, const Vecd &demand, const Matd &A,
                  Curtailment mode = Curtailment::index_order);

struct PeriodRecord {
  int t = 0;
  Vecd price;
  Vecd realized;
  Vecd served;
  double revenue = 0.0;
  Vecd capacity;
  Branch branch = Branch::resolve;
};

struct EpisodeOptions {
  bool record = false;
  Curtailment curtailment = Curtailment::index_order;
  /// Estimators see demand before rejection zeroes it.
  bool observe_rejected = true;
  /// Precomputed benchmark; computed from the instance when absent.
  std::optional<double> fluid_value;
};

struct EpisodeResult {
  double total_revenue = 0.0;
  double fluid_value = 0.0;
  double regret = 0.0;
  std::vector<PeriodRecord> trajectory;
  /// First period at whose end each resource hit zero, or -1.
  std::vector<int> depletion_times;
};

/// Streams are derived from `seed`: noise, policy and online surrogate draws
/// each get their own generator, shared by every policy run on that seed.
EpisodeResult run_episode(const PricingInstance<double> &inst,
                          const PolicyConfig &cfg, std::uint64_t seed,
                          const EpisodeOptions &opts = {});

void write_trajectory_csv(std::ostream &os, const EpisodeResult &res);

} // namespace pricelab

#endif // PRICELAB_SIM_HPP
