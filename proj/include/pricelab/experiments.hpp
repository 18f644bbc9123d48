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

#ifndef PRICELAB_EXPERIMENTS_HPP
#define PRICELAB_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pricelab/sim.hpp"

namespace pricelab {

class GenerationFailed : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NotFittable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// fixed: [box_lower, box_upper]. nonnegative: largest U keeping mean demand
/// nonnegative on the box. scaled: a multiple of the largest optimal price.
enum class BoxRule { fixed, nonnegative, scaled };

std::string to_string(BoxRule r);
BoxRule box_rule_from_string(const std::string &s);

struct ScaleSpec {
  std::string label = "custom";
  Index m = 1;
  Index n = 4;
  double alpha_lo = 5.0;
  double alpha_hi = 10.0;
  double b_lo = -1.0;
  double b_hi = 0.0;
  double box_lower = 0.0;
  double box_upper = 10.0;
  /// How the upper price is chosen per instance; box_upper caps it.
  BoxRule box_rule = BoxRule::nonnegative;
  /// For BoxRule::scaled: U = box_scale * max_j p*_j.
  double box_scale = 1.5;
  double sigma = 1.0;
  /// B is shifted by -(lambda_max + shift_margin) I. Zero leaves B + B^T
  /// singular, so the default keeps a unit curvature margin.
  double shift_margin = 1.0;
  /// When positive, one product's intercept is lowered until its optimal
  /// demand equals this value.
  double near_zero_demand = 0.0;

  void validate() const;
};

/// Scale 1: m=10, n=20. Scale 2: m=1, n=4.
ScaleSpec scale_preset(int scale);

/// Largest U in (lower, cap] with alpha + B p >= 0 for all p in [lower, U]^n.
/// Returns a value <= lower when none exists.
double nonnegative_upper(const DemandParams<double> &params, double lower,
                         double cap);

/// Maximizer of revenue over the price box with nonnegative mean demand.
Vecd box_optimal_demand(const LinearDemandModel<double> &model,
                        const PriceBox<double> &box);

/// Instance with c0 = T A d*, so every resource binds at the fluid optimum.
PricingInstance<double> generate_instance(const ScaleSpec &scale, int T,
                                          std::uint64_t seed);

/// Policy recipe. Anchors and surrogates are built per episode from the
/// generated instance.
struct PolicySpec {
  std::string name;
  PolicyKind kind = PolicyKind::full_info;
  double zeta = 1.0;
  double sigma0 = 1.0;
  double tau = 1.0;
  double eps0 = 0.1;
  /// When set, eps0 = T^eps0_power.
  std::optional<double> eps0_power;
  double rho = 0.65;
  int offline_n = 500;
  double misspec = 0.2;
  /// Surrogate noise scale; defaults to the instance sigma.
  std::optional<double> noise_sd;
  double lambda = 0.0;
  bool gaussian_perturbation = false;
  bool force_zero_gamma = false;

  std::string label() const { return name.empty() ? to_string(kind) : name; }
};

enum class SweepParam { none, horizon, epsilon0, rho, zeta, sigma };

std::string to_string(SweepParam p);
SweepParam sweep_param_from_string(const std::string &s);

struct SweepSpec {
  SweepParam param = SweepParam::none;
  std::vector<double> grid;
};

struct ExperimentConfig {
  ScaleSpec scale;
  std::vector<int> horizons;
  int reps = 1;
  std::vector<PolicySpec> policies;
  SweepSpec sweep;
  std::uint64_t master_seed = 1;
  std::string output = "out";
  int workers = 1;
  Curtailment curtailment = Curtailment::index_order;
  bool observe_rejected = true;

  void validate() const;
};

struct AggregateCell {
  std::string policy;
  int T = 0;
  std::string sweep_param = "none";
  double sweep_value = 0.0;
  int reps = 0;
  double mean_regret = 0.0;
  double std = 0.0;
  double stderr_ = 0.0;
  int failures = 0;
  /// Per-rep regrets in rep order; NaN marks a failed episode.
  std::vector<double> values;
};

/// Mean, sample std (n-1) and std / sqrt(n) over the finite entries.
void aggregate(AggregateCell &cell);

/// Per-episode seed for replication `rep`. Shared by every policy, horizon and
/// sweep value, which is what makes comparisons paired.
std::uint64_t episode_seed(std::uint64_t master, int rep);

/// Builds the episode-level policy configuration for one recipe.
PolicyConfig realize_policy(const PolicySpec &spec,
                            const PricingInstance<double> &inst,
                            std::uint64_t ep_seed);

/// Certified anchor: p0 the fluid-optimal price, d0 = f(p0) + delta with
/// ||delta|| = eps0 in a uniformly random direction.
Anchor make_anchor(const PricingInstance<double> &inst, double eps0, Rng &rng);

struct SurrogateBundle {
  std::shared_ptr<const SurrogateModel<double>> model;
  std::shared_ptr<const OfflineDataset<double>> offline;
};

/// Misspecified surrogate: intercept and slope entries scaled by independent
/// factors in [1 - misspec, 1 + misspec].
SurrogateBundle make_surrogate(const PricingInstance<double> &inst, double rho,
                               double noise_sd, int offline_n, double misspec,
                               Rng &rng);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

std::vector<AggregateCell> run_grid(const ExperimentConfig &cfg,
                                    const ProgressFn &progress = {});

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares slope of log(mean) on log(T); nonpositive means dropped.
ScalingFit fit_scaling_exponent(const std::vector<double> &T,
                                const std::vector<double> &mean_regret);

void emit_csv(const std::vector<AggregateCell> &cells, std::ostream &os);
void emit_csv(const std::vector<AggregateCell> &cells, const std::string &path);

/// Canned sweeps; an empty grid selects the default one.
ExperimentConfig canned_sweep(SweepParam kind, int scale,
                              const std::vector<double> &grid);

} // namespace pricelab

#endif // PRICELAB_EXPERIMENTS_HPP
