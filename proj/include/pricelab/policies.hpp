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

#ifndef PRICELAB_POLICIES_HPP
#define PRICELAB_POLICIES_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pricelab/estimators.hpp"
#include "pricelab/fluid.hpp"
#include "pricelab/model.hpp"
#include "pricelab/rng.hpp"
#include "pricelab/surrogate.hpp"

namespace pricelab {

using Vecd = Vec<double>;
using Matd = Mat<double>;

enum class PolicyKind { full_info, learning, informed, surrogate, surrogate_informed };

std::string to_string(PolicyKind k);
PolicyKind policy_kind_from_string(const std::string &s);

struct Anchor {
  Vecd p0;
  Vecd d0;
  double eps0 = 0.0;
};

struct SurrogateWiring {
  std::shared_ptr<const SurrogateModel<double>> model;
  std::shared_ptr<const OfflineDataset<double>> offline;
  /// Ridge; nonpositive selects 1e-3 trace / n.
  double lambda = 0.0;
  /// Keeps the coefficient at zero. Pseudo-observations then equal raw ones.
  bool force_zero_gamma = false;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::full_info;
  double zeta = 1.0;
  double sigma0 = 1.0;
  double tau = 1.0;
  /// Gaussian exploration directions instead of cycling basis vectors.
  bool gaussian_perturbation = false;
  std::optional<Anchor> anchor;
  std::optional<SurrogateWiring> surrogate;

  void validate(Index n) const;
};

/// What a policy may see of the market. The true demand law is present only
/// for the full-information policy.
struct MarketView {
  Matd A;
  PriceBox<double> box;
  int T = 1;
  std::optional<LinearDemandModel<double>> truth;

  Index n() const { return box.dim; }
};

enum class Branch { resolve, explore, epoch, anchor, anchor_warmup, infeasible };

std::string to_string(Branch b);

struct PolicyDecision {
  Vecd price;
  Vecd predicted_demand;
  /// 1 for products whose demand is rejected this period.
  std::vector<char> rejected;
  double threshold = 0.0;
  Branch branch = Branch::resolve;
};

class Policy {
public:
  virtual ~Policy() = default;
  /// Decision for period t (1-based) given remaining capacity.
  virtual PolicyDecision decide(int t, const Vecd &capacity) = 0;
  /// Demand observed after pricing at p. signal is the surrogate reading
  /// when one is wired.
  virtual void observe(int t, const Vecd &p, const Vecd &demand,
                       const Vecd *signal) = 0;
  /// Running mean of implemented prices.
  virtual const Vecd &mean_price() const = 0;
};

enum class InformedBranch { anchor, fallback };

/// Fallback iff eps0^2 T > tau sqrt(T).
InformedBranch informed_select(double eps0, int T, double tau);

/// Price that targets demand d for the kept products with every product in
/// `at_upper` held at the box's upper bound. Not clipped.
Vecd price_for_demand(const DemandParams<double> &params, const Vecd &d,
                      const std::vector<char> &at_upper, double upper);

/// base + step, clipped to the box. A step component that would leave the
/// box is reflected when the reflected value stays inside.
Vecd perturb_in_box(const Vecd &base, const Vecd &step,
                    const PriceBox<double> &box);

std::unique_ptr<Policy> make_policy(const MarketView &view,
                                    const PolicyConfig &cfg, Rng rng);

/// Decision of the full-information policy at one period; exposed for tests.
PolicyDecision full_info_step(const LinearDemandModel<double> &model,
                              const Matd &A, const PriceBox<double> &box,
                              const Vecd &capacity, int t, int T, double zeta);

} // namespace pricelab

#endif // PRICELAB_POLICIES_HPP
