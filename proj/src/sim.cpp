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

#include "pricelab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pricelab {

namespace {
constexpr double kExhausted = 1e-12;
}

Vecd sample_noise(double sigma, const Vecd &mean_demand, Rng &rng) {
  if (sigma < 0) {
    throw std::invalid_argument("sample_noise: sigma < 0");
  }
  Vecd eps = normal_vector<double>(rng, mean_demand.size(), sigma);
  return eps.cwiseMax(-mean_demand);
}

StepOutcome serve(const Vecd &capacity, const Vecd &demand, const Matd &A,
                  Curtailment mode) {
  const Index n = demand.size();
  const Index m = A.rows();
  StepOutcome out;
  out.realized = demand;
  out.served = Vecd::Zero(n);
  Vecd c = capacity;
  if (mode == Curtailment::index_order) {
    for (Index j = 0; j < n; ++j) {
      double cap = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m; ++i) {
        if (A(i, j) > 0) {
          cap = std::min(cap, c(i) / A(i, j));
        }
      }
      const double s = std::max(0.0, std::min(demand(j), cap));
      out.served(j) = s;
      for (Index i = 0; i < m; ++i) {
        if (A(i, j) > 0) {
          c(i) -= A(i, j) * s;
          if (c(i) < kExhausted) {
            c(i) = 0.0;
          }
        }
      }
    }
  } else {
    // One common scale factor so that A * served fits every resource.
    const Vecd use = A * demand.cwiseMax(0.0);
    double scale = 1.0;
    for (Index i = 0; i < m; ++i) {
      if (use(i) > c(i)) {
        scale = std::min(scale, c(i) / use(i));
      }
    }
    out.served = scale * demand.cwiseMax(0.0);
    c -= A * out.served;
    for (Index i = 0; i < m; ++i) {
      if (c(i) < kExhausted) {
        c(i) = 0.0;
      }
    }
  }
  out.c_after = c;
  return out;
}

EpisodeResult run_episode(const PricingInstance<double> &inst,
                          const PolicyConfig &cfg, std::uint64_t seed,
                          const EpisodeOptions &opts) {
  inst.validate();
  const Index n = inst.n();
  const Index m = inst.m();
  MarketView view{inst.A, inst.box, inst.T, std::nullopt};
  if (cfg.kind == PolicyKind::full_info) {
    view.truth = inst.model;
  }
  std::unique_ptr<Policy> policy =
      make_policy(view, cfg, make_stream(seed, Stream::policy));
  Rng noise_rng = make_stream(seed, Stream::noise);
  Rng surr_rng = make_stream(seed, Stream::surrogate_online);
  const SurrogateModel<double> *surr =
      cfg.surrogate ? cfg.surrogate->model.get() : nullptr;

  EpisodeResult res;
  res.fluid_value = opts.fluid_value ? *opts.fluid_value : fluid_value(inst);
  res.depletion_times.assign(static_cast<std::size_t>(m), -1);
  EnvState env{inst.c0, 1, 0.0};
  for (int t = 1; t <= inst.T; ++t) {
    env.t = t;
    const PolicyDecision dec = policy->decide(t, env.c);
    const Vecd mean = demand_mean(inst.model, dec.price);
    const Vecd eps = sample_noise(inst.sigma, mean, noise_rng);
    const Vecd realized = mean + eps;
    Vecd offered = realized;
    for (Index j = 0; j < n; ++j) {
      if (dec.rejected[static_cast<std::size_t>(j)]) {
        offered(j) = 0.0;
      }
    }
    StepOutcome step = serve(env.c, offered, inst.A, opts.curtailment);
    const double rev = dec.price.dot(step.served);
    env.revenue += rev;
    env.c = step.c_after;
    for (Index i = 0; i < m; ++i) {
      if (env.c(i) <= 0.0 && res.depletion_times[static_cast<std::size_t>(i)] < 0) {
        res.depletion_times[static_cast<std::size_t>(i)] = t;
      }
    }
    Vecd signal;
    if (surr) {
      signal = sample_surrogate(*surr, dec.price, eps, surr_rng);
    }
    policy->observe(t, dec.price, opts.observe_rejected ? realized : offered,
                    surr ? &signal : nullptr);
    if (opts.record) {
      res.trajectory.push_back(PeriodRecord{t, dec.price, offered, step.served,
                                            rev, env.c, dec.branch});
    }
  }
  res.total_revenue = env.revenue;
  res.regret = res.fluid_value - res.total_revenue;
  return res;
}

void write_trajectory_csv(std::ostream &os, const EpisodeResult &res) {
  if (res.trajectory.empty()) {
    os << "t,revenue\n";
    return;
  }
  const Index n = res.trajectory.front().price.size();
  const Index m = res.trajectory.front().capacity.size();
  os << "t";
  for (Index j = 0; j < n; ++j) os << ",price_" << j;
  for (Index j = 0; j < n; ++j) os << ",realized_" << j;
  for (Index j = 0; j < n; ++j) os << ",served_" << j;
  os << ",revenue";
  for (Index i = 0; i < m; ++i) os << ",capacity_" << i;
  os << ",branch\n";
  os.precision(17);
  for (const PeriodRecord &r : res.trajectory) {
    os << r.t;
    for (Index j = 0; j < n; ++j) os << ',' << r.price(j);
    for (Index j = 0; j < n; ++j) os << ',' << r.realized(j);
    for (Index j = 0; j < n; ++j) os << ',' << r.served(j);
    os << ',' << r.revenue;
    for (Index i = 0; i < m; ++i) os << ',' << r.capacity(i);
    os << ',' << to_string(r.branch) << '\n';
  }
}

} // namespace pricelab
