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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "pricelab/experiments.hpp"
#include "pricelab/policies.hpp"
#include "pricelab/sim.hpp"

using namespace pricelab;

namespace {

Vecd vec(std::initializer_list<double> xs) {
  Vecd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) {
    v(i++) = x;
  }
  return v;
}

// Two independent products sharing one loose resource.
struct Fixture {
  LinearDemandModel<double> model{vec({5.0, 0.2}), -Matd::Identity(2, 2)};
  Matd A = Matd::Ones(1, 2);
  PriceBox<double> box{0.0, 5.0, 2};
  Vecd capacity = vec({1000.0});
};

PricingInstance<double> scale2(int T, std::uint64_t seed) {
  return generate_instance(scale_preset(2), T, seed);
}

MarketView view_of(const PricingInstance<double> &inst) {
  MarketView v;
  v.A = inst.A;
  v.box = inst.box;
  v.T = inst.T;
  v.truth = inst.model;
  return v;
}

std::vector<PolicySpec> all_specs() {
  std::vector<PolicySpec> out;
  for (PolicyKind k : {PolicyKind::full_info, PolicyKind::learning, PolicyKind::informed,
                       PolicyKind::surrogate, PolicyKind::surrogate_informed}) {
    PolicySpec s;
    s.kind = k;
    s.eps0 = 0.05;
    out.push_back(s);
  }
  return out;
}

} // namespace

TEST_SUITE("policies") {

TEST_CASE("informed_select examples") {
  CHECK(informed_select(0.2, 10000, 1.0) == InformedBranch::fallback);
  CHECK(informed_select(0.0, 10000, 1.0) == InformedBranch::anchor);
  CHECK(informed_select(0.0, 1, 1e-9) == InformedBranch::anchor);
  // 0.25 * 16 = 4 = sqrt(16): equality keeps the anchor.
  CHECK(informed_select(0.5, 16, 1.0) == InformedBranch::anchor);
}

TEST_CASE("perturb_in_box reflects steps that would leave the box") {
  const PriceBox<double> box(0.0, 2.0, 2);
  CHECK(perturb_in_box(vec({1.0, 1.0}), vec({0.5, 0.0}), box) == vec({1.5, 1.0}));
  CHECK(perturb_in_box(vec({1.8, 1.0}), vec({0.5, 0.0}), box).isApprox(vec({1.3, 1.0})));
  CHECK(perturb_in_box(vec({0.1, 1.0}), vec({0.0, -0.4}), box).isApprox(vec({0.1, 0.6})));
  // Neither side fits: clipped.
  CHECK(perturb_in_box(vec({1.8, 1.0}), vec({5.0, 0.0}), box) == vec({2.0, 1.0}));
}

TEST_CASE("price_for_demand") {
  Matd B(2, 2);
  B << -2.0, 0.5, 0.3, -1.0;
  const DemandParams<double> par{vec({6.0, 4.0}), B};
  const Vecd d = vec({2.0, 1.0});
  const Vecd p = price_for_demand(par, d, {0, 0}, 5.0);
  CHECK((par.alpha + B * p - d).norm() <= 1e-12);
  const Vecd q = price_for_demand(par, d, {1, 0}, 5.0);
  CHECK(q(0) == 5.0);
  CHECK(par.alpha(1) + B(1, 0) * 5.0 + B(1, 1) * q(1) == doctest::Approx(1.0));
}

TEST_CASE("full_info_step without rounding uses the fluid price") {
  const LinearDemandModel<double> m(vec({2.0}), Matd::Constant(1, 1, -1.0));
  const auto dec = full_info_step(m, Matd::Ones(1, 1), PriceBox<double>(0.0, 2.0, 1),
                                  vec({1000.0}), 1, 100, 1.0);
  CHECK(dec.price(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dec.rejected[0] == 0);
  CHECK(dec.branch == Branch::resolve);
}

TEST_CASE("full_info_step rounds a small fluid demand to zero") {
  Fixture f;
  const int T = 100;
  const int t = 97; // T - t + 1 = 4, threshold 0.5 at zeta 1
  const auto plain = full_info_step(f.model, f.A, f.box, f.capacity, t, T, 0.0);
  const auto rounded = full_info_step(f.model, f.A, f.box, f.capacity, t, T, 1.0);
  CHECK(plain.predicted_demand(1) == doctest::Approx(0.1));
  CHECK(rounded.predicted_demand(1) == 0.0);
  CHECK(rounded.price(1) >= plain.price(1));
  CHECK(rounded.price(1) == doctest::Approx(0.2));
  CHECK(rounded.price(0) == doctest::Approx(plain.price(0)));
}

TEST_CASE("full_info_step with no capacity rejects everything") {
  Fixture f;
  const auto dec = full_info_step(f.model, f.A, f.box, vec({0.0}), 5, 10, 1.0);
  CHECK(dec.rejected == std::vector<char>{1, 1});
  CHECK(dec.price == Vecd::Constant(2, f.box.upper));
}

TEST_CASE("learning schedule") {
  const auto inst = scale2(50, 3);
  PolicyConfig cfg;
  cfg.kind = PolicyKind::learning;
  auto pol = make_policy(view_of(inst), cfg, Rng(1));
  Vecd c = inst.c0;
  const Index n = inst.n();
  for (int t = 1; t <= 3 * n; ++t) {
    const auto dec = pol->decide(t, c);
    if (t <= n) {
      CHECK(dec.branch == Branch::explore);
    } else if ((t - 1) % n == 0) {
      CHECK(dec.branch == Branch::epoch);
    } else {
      CHECK(dec.branch == Branch::resolve);
    }
    pol->observe(t, dec.price, demand_mean(inst.model, dec.price), nullptr);
  }
}

TEST_CASE("informed with an exact anchor and no noise holds the optimal price") {
  auto inst = scale2(200, 4);
  inst.sigma = 0.0;
  const FluidProblem<double> prob{inst.model.params(), inst.A, inst.c0 / double(inst.T), inst.box,
                                  false};
  const Vecd p0 = solve_fluid(prob).p;
  PolicyConfig cfg;
  cfg.kind = PolicyKind::informed;
  cfg.sigma0 = 0.0;
  cfg.zeta = 0.0;
  cfg.anchor = Anchor{p0, demand_mean(inst.model, p0), 0.0};
  EpisodeOptions eo;
  eo.record = true;
  const auto res = run_episode(inst, cfg, 9, eo);
  for (const auto &r : res.trajectory) {
    CHECK((r.price - p0).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(std::abs(res.regret) <= 1e-6 * res.fluid_value);
}

TEST_CASE("informed perturbation at t = 1 is +sigma0 along the first axis") {
  const auto inst = scale2(100, 5);
  const FluidProblem<double> prob{inst.model.params(), inst.A, inst.c0 / double(inst.T), inst.box,
                                  false};
  const Vecd p0 = solve_fluid(prob).p;
  PolicyConfig cfg;
  cfg.kind = PolicyKind::informed;
  cfg.sigma0 = 0.25;
  cfg.anchor = Anchor{p0, demand_mean(inst.model, p0), 0.0};
  auto pol = make_policy(view_of(inst), cfg, Rng(1));
  const auto dec = pol->decide(1, inst.c0);
  REQUIRE(p0(0) + 0.25 <= inst.box.upper);
  CHECK((dec.price - p0).isApprox(0.25 * Vecd::Unit(inst.n(), 0)));
}

TEST_CASE("prices stay in the box and rejections follow the thresholds") {
  for (int seed = 0; seed < 50; ++seed) {
    const auto inst = scale2(60, 100 + seed);
    const std::uint64_t ep = 700 + seed;
    for (const PolicySpec &spec : all_specs()) {
      const PolicyConfig cfg = realize_policy(spec, inst, ep);
      auto pol = make_policy(view_of(inst), cfg, Rng(ep));
      Vecd c = inst.c0;
      Vecd sum = Vecd::Zero(inst.n());
      Rng noise(ep + 1);
      for (int t = 1; t <= inst.T; ++t) {
        const auto dec = pol->decide(t, c);
        CHECK((dec.price.array() >= inst.box.lower).all());
        CHECK((dec.price.array() <= inst.box.upper).all());
        const bool ruled = dec.branch != Branch::explore && spec.kind != PolicyKind::full_info &&
                           dec.branch != Branch::infeasible;
        for (Index i = 0; ruled && i < inst.n(); ++i) {
          CHECK((dec.rejected[static_cast<std::size_t>(i)] != 0) ==
                (dec.predicted_demand(i) <= dec.threshold));
        }
        const Vecd mean = demand_mean(inst.model, dec.price);
        const Vecd d = mean + sample_noise(inst.sigma, mean, noise);
        const Vecd signal = d;
        pol->observe(t, dec.price, d, &signal);
        const auto out = serve(c, d, inst.A);
        c = out.c_after;
        sum += dec.price;
        CHECK((pol->mean_price() - sum / double(t)).cwiseAbs().maxCoeff() <= 1e-10);
      }
    }
  }
}

TEST_CASE("episodes are deterministic") {
  const auto inst = scale2(80, 6);
  for (const PolicySpec &spec : all_specs()) {
    EpisodeOptions eo;
    eo.record = true;
    const auto a = run_episode(inst, realize_policy(spec, inst, 42), 42, eo);
    const auto b = run_episode(inst, realize_policy(spec, inst, 42), 42, eo);
    CHECK(a.total_revenue == b.total_revenue);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
      CHECK(a.trajectory[i].price == b.trajectory[i].price);
      CHECK(a.trajectory[i].served == b.trajectory[i].served);
    }
  }
}

TEST_CASE("screened-out anchors reduce to learning") {
  const auto inst = scale2(400, 7);
  PolicySpec learn;
  learn.kind = PolicyKind::learning;
  PolicySpec inf;
  inf.kind = PolicyKind::informed;
  inf.eps0 = 0.5; // 100 > 20
  PolicySpec zero;
  zero.kind = PolicyKind::surrogate;
  zero.force_zero_gamma = true;
  EpisodeOptions eo;
  eo.record = true;
  const auto a = run_episode(inst, realize_policy(learn, inst, 5), 5, eo);
  const auto b = run_episode(inst, realize_policy(inf, inst, 5), 5, eo);
  const auto c = run_episode(inst, realize_policy(zero, inst, 5), 5, eo);
  CHECK(a.total_revenue == b.total_revenue);
  CHECK(a.total_revenue == c.total_revenue);
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(a.trajectory[i].price == b.trajectory[i].price);
    CHECK(a.trajectory[i].price == c.trajectory[i].price);
  }
}

TEST_CASE("config validation") {
  PolicyConfig cfg;
  cfg.kind = PolicyKind::informed;
  CHECK_THROWS_AS(cfg.validate(2), std::invalid_argument);
  cfg.kind = PolicyKind::surrogate;
  CHECK_THROWS_AS(cfg.validate(2), std::invalid_argument);
  cfg.kind = PolicyKind::learning;
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(2), std::invalid_argument);
  CHECK(policy_kind_from_string(to_string(PolicyKind::surrogate_informed)) ==
        PolicyKind::surrogate_informed);
  CHECK_THROWS(policy_kind_from_string("greedy"));
}

} // TEST_SUITE
