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


#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "pricelab/fluid.hpp"
#include "pricelab/rng.hpp"

using namespace pricelab;
using Vecd = Vec<double>;
using Matd = Mat<double>;

namespace {

Vecd vec(std::initializer_list<double> xs) {
  Vecd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) {
    v(i++) = x;
  }
  return v;
}

DemandParams<double> scalar_params() {
  return {vec({2.0}), Matd::Constant(1, 1, -1.0)};
}

FluidProblem<double> scalar_problem(double rhs) {
  return {scalar_params(), Matd::Constant(1, 1, 1.0), vec({rhs}),
          PriceBox<double>(0.0, 2.0, 1), false};
}

double objective(const DemandParams<double> &par, const Vecd &p) {
  return p.dot(par.alpha + par.B * p);
}

bool feasible(const FluidProblem<double> &prob, const Vecd &p) {
  return ((prob.A * (prob.params.alpha + prob.params.B * p) - prob.rhs).array() <= 1e-12).all();
}

FluidProblem<double> random_problem(Rng &rng) {
  std::uniform_int_distribution<int> pn(1, 3);
  std::uniform_int_distribution<int> pm(1, 2);
  const Index n = pn(rng);
  const Index m = pm(rng);
  Vecd alpha = uniform_vector<double>(rng, n, 3.0, 6.0);
  Matd B = uniform_matrix<double>(rng, n, n, -1.0, 0.0);
  B -= (sym_lambda_max(B) + 0.5) * Matd::Identity(n, n);
  const Matd A = uniform_matrix<double>(rng, m, n, 0.0, 1.0);
  const double U = 2.0;
  const Vecd d_up = alpha + B * Vecd::Constant(n, U);
  const Vecd rhs = (A * d_up).array() + uniform_vector<double>(rng, m, 0.1, 3.0).array();
  return {{alpha, B}, A, rhs, PriceBox<double>(0.0, U, n), false};
}

} // namespace

TEST_SUITE("fluid") {

TEST_CASE("single product with binding capacity") {
  const auto prob = scalar_problem(0.5);
  const auto sol = solve_fluid(prob);
  // Grid oracle over p in {0, 0.001, ..., 2}.
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 2000; ++k) {
    const Vecd p = vec({0.001 * k});
    if (feasible(prob, p)) {
      best = std::max(best, objective(prob.params, p));
    }
  }
  CHECK(sol.p(0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(sol.d(0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.value == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(std::abs(sol.value - best) <= 1e-6);
  REQUIRE(sol.active.size() == 1);
  CHECK(sol.active[0] == 0);
  CHECK(sol.status == FluidStatus::optimal);
}

TEST_CASE("slack capacity gives the unconstrained optimum") {
  const auto sol = solve_fluid(scalar_problem(10.0));
  CHECK(sol.p(0) == doctest::Approx(1.0));
  CHECK(sol.d(0) == doctest::Approx(1.0));
  CHECK(sol.value == doctest::Approx(1.0));
  CHECK(sol.active.empty());
}

TEST_CASE("symmetric two-product problem") {
  FluidProblem<double> prob{{vec({5, 5}), -Matd::Identity(2, 2)},
                            Matd::Ones(1, 2), vec({4.0}),
                            PriceBox<double>(0.0, 5.0, 2), false};
  const auto sol = solve_fluid(prob);
  CHECK(sol.p(0) == doctest::Approx(3.0));
  CHECK(sol.p(1) == doctest::Approx(3.0));
  CHECK(sol.d(0) == doctest::Approx(2.0));
  CHECK(sol.value == doctest::Approx(12.0));
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 5000; ++i) {
    for (int k = 0; k <= 5000; ++k) {
      const double p0 = 0.001 * i;
      const double p1 = 0.001 * k;
      if ((5 - p0) + (5 - p1) <= 4.0 + 1e-12) {
        best = std::max(best, p0 * (5 - p0) + p1 * (5 - p1));
      }
    }
  }
  CHECK(std::abs(sol.value - best) <= 1e-5);
}

TEST_CASE("attraction thresholds") {
  CHECK(attraction_threshold(ThresholdKind::full_info, 1, 100, 1.0) == doctest::Approx(0.1));
  CHECK(attraction_threshold(ThresholdKind::learning, 16, 31, 1.0) == doctest::Approx(1.0));
  CHECK(attraction_threshold(ThresholdKind::informed, 4, 7, 2.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(attraction_threshold(ThresholdKind::learning, 0, 10, 1.0),
                  std::invalid_argument);
}

TEST_CASE("boundary_attract examples") {
  const Vecd a = boundary_attract(vec({0.05, 0.5}), 0.1);
  CHECK(a == vec({0.0, 0.5}));
  const Vecd d = vec({0.3, 0.0, 2.0});
  CHECK(Vecd(boundary_attract(d, 0.0)) == d);
  CHECK(Vecd(boundary_attract(d, 5.0)) == Vecd::Zero(3));
}

TEST_CASE("boundary_attract is idempotent") {
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const Vecd d = uniform_vector<double>(rng, 5, 0.0, 1.0);
    const double tau = 0.5 * (k % 3);
    const Vecd once = boundary_attract(d, tau);
    CHECK(Vecd(boundary_attract(once, tau)) == once);
  }
}

TEST_CASE("fluid_value examples") {
  PricingInstance<double> inst;
  inst.model = LinearDemandModel<double>(vec({2.0}), Matd::Constant(1, 1, -1.0));
  inst.A = Matd::Constant(1, 1, 1.0);
  inst.box = PriceBox<double>(0.0, 2.0, 1);
  inst.T = 40;
  inst.c0 = vec({0.5 * 40});
  CHECK(fluid_value(inst) == doctest::Approx(0.75 * 40));
  // c0 = T A d* with d* = 1: binding exactly at the unconstrained optimum.
  inst.c0 = vec({1.0 * 40});
  CHECK(fluid_value(inst) == doctest::Approx(40.0));
  inst.T = 1;
  inst.c0 = vec({0.5});
  CHECK(fluid_value(inst) == doctest::Approx(0.75));
}

TEST_CASE("infeasible capacity is a typed error") {
  FluidProblem<double> prob = scalar_problem(0.5);
  prob.box = PriceBox<double>(0.0, 1.0, 1);
  CHECK_THROWS_AS(solve_fluid(prob), FluidInfeasible);
}

TEST_CASE("depleted resources remove their products") {
  FluidProblem<double> prob{{vec({5, 5}), -Matd::Identity(2, 2)},
                            Matd{{1.0, 0.0}, {0.0, 1.0}}, vec({0.0, 10.0}),
                            PriceBox<double>(0.0, 5.0, 2), false};
  const auto sol = solve_fluid(prob);
  CHECK(sol.status == FluidStatus::reduced);
  CHECK(sol.removed[0] == 1);
  CHECK(sol.removed[1] == 0);
  CHECK(sol.p(0) == 5.0);
  CHECK(sol.d(0) == 0.0);
  CHECK(sol.p(1) == doctest::Approx(2.5));
  // Negative drift in the capacity is clamped like an exact zero.
  prob.rhs(0) = -1e-15;
  CHECK(solve_fluid(prob).removed[0] == 1);
}

TEST_CASE("solution invariants on random problems") {
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const auto prob = random_problem(rng);
    const auto sol = solve_fluid(prob);
    const Vecd f = prob.params.alpha + prob.params.B * sol.p;
    // Removed products carry a zero demand target.
    for (Index j = 0; j < f.size(); ++j) {
      CHECK(std::abs(sol.d(j) - (sol.removed[static_cast<std::size_t>(j)] ? 0.0 : f(j))) <= 1e-9);
    }
    CHECK(((prob.A * sol.d - prob.rhs.cwiseMax(0.0)).array() <= 1e-8).all());
    CHECK((sol.p.array() >= prob.box.lower).all());
    CHECK((sol.p.array() <= prob.box.upper).all());
    if (sol.status == FluidStatus::optimal) {
      CHECK(sol.kkt_residual <= 1e-8);
    }
  }
}

TEST_CASE("fluid value is nondecreasing in capacity") {
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    auto prob = random_problem(rng);
    const double v0 = solve_fluid(prob).value;
    prob.rhs += uniform_vector<double>(rng, prob.rhs.size(), 0.0, 0.5);
    CHECK(solve_fluid(prob).value >= v0 - 1e-9);
  }
}

TEST_CASE("revenue change under attraction is the exact quadratic expansion") {
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const Index n = 4;
    Vecd alpha = uniform_vector<double>(rng, n, 3.0, 6.0);
    Matd B = uniform_matrix<double>(rng, n, n, -1.0, 0.0);
    B -= (sym_lambda_max(B) + 0.5) * Matd::Identity(n, n);
    const LinearDemandModel<double> m(alpha, B);
    const Vecd d = uniform_vector<double>(rng, n, 0.0, 1.0);
    const double tau = 0.3;
    const Vecd dt = boundary_attract(d, tau);
    const Vecd delta = dt - d;
    const Matd bi = B.inverse();
    const Vecd grad = (bi + bi.transpose()) * d - bi * alpha;
    const double r = revenue_of_demand(m, d);
    const double expansion = r + grad.dot(delta) + delta.dot(bi * delta);
    CHECK(revenue_of_demand(m, dt) == doctest::Approx(expansion).epsilon(1e-12));
    const double bound = Eigen::JacobiSVD<Matd>(bi).singularValues()(0) * static_cast<double>(n) * tau * tau +
                         std::abs(grad.dot(delta));
    CHECK(r - revenue_of_demand(m, dt) <= bound + 1e-12);
  }
}

} // TEST_SUITE
