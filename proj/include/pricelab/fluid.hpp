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

#ifndef PRICELAB_FLUID_HPP
#define PRICELAB_FLUID_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pricelab/model.hpp"
#include "pricelab/qp.hpp"

namespace pricelab {

class FluidInfeasible : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One period of the fluid program:
///   max p^T (alpha + B p)  s.t.  p in box,  A (alpha + B p) <= rhs.
/// Resources with rhs <= 0 are depleted. The slope need not come from a
/// validated model, but B + B^T must be negative definite.
template <typename Scalar>
struct FluidProblem {
  DemandParams<Scalar> params;
  Mat<Scalar> A;
  Vec<Scalar> rhs;
  PriceBox<Scalar> box;
  /// Adds alpha + B p >= 0. Off for the per-period program.
  bool demand_nonnegative = false;
};

enum class FluidStatus { optimal, reduced, degenerate_boundary };

template <typename Scalar>
struct FluidSolution {
  Vec<Scalar> p;
  /// Mean demand at p; zero for products removed by depletion.
  Vec<Scalar> d;
  Scalar value = Scalar(0);
  FluidStatus status = FluidStatus::optimal;
  /// Binding resource rows.
  std::vector<Index> active;
  /// Products removed because they use a depleted resource.
  std::vector<char> removed;
  Scalar kkt_residual = Scalar(0);
};

struct FluidOptions {
  double tol = 1e-8;
  /// Active-set iteration cap; negative picks a size-based default.
  int max_iterations = -1;
};

namespace detail {

// Penalized projected gradient on the box. Used only when the active-set
// method hits its iteration cap.
template <typename Scalar>
Vec<Scalar> penalty_projected_gradient(const Mat<Scalar> &Q,
                                       const Vec<Scalar> &c,
                                       const Mat<Scalar> &G,
                                       const Vec<Scalar> &h, Scalar lo,
                                       Scalar hi, Vec<Scalar> x) {
  const Scalar qnorm = sym_lambda_max(Q);
  const Scalar gnorm = G.rows() > 0 ? (G.transpose() * G).norm() : Scalar(0);
  for (Scalar mu = Scalar(10); mu <= Scalar(1e10); mu *= Scalar(10)) {
    const Scalar lip = qnorm + mu * gnorm;
    for (int k = 1; k <= 5000; ++k) {
      const Vec<Scalar> viol = (G * x - h).cwiseMax(Scalar(0));
      const Vec<Scalar> grad = Q * x + c + mu * G.transpose() * viol;
      const Scalar step = Scalar(1) / (lip * std::sqrt(Scalar(1) + Scalar(k) / Scalar(1000)));
      const Vec<Scalar> next = (x - step * grad).cwiseMax(lo).cwiseMin(hi);
      const Scalar move = (next - x).cwiseAbs().maxCoeff();
      x = next;
      if (move < Scalar(1e-14)) {
        break;
      }
    }
  }
  return x;
}

} // namespace detail

/// Solves the fluid program. Products that consume a depleted resource get
/// price upper and demand target 0, and the program is re-posed over the
/// rest (status reduced). Throws FluidInfeasible when no price in the box
/// meets the remaining resource rows.
template <typename Scalar>
FluidSolution<Scalar> solve_fluid(const FluidProblem<Scalar> &prob,
                                  const FluidOptions &opts = {}) {
  const DemandParams<Scalar> &par = prob.params;
  const Index n = par.n();
  const Index m = prob.A.rows();
  if (par.B.rows() != n || par.B.cols() != n || prob.A.cols() != n ||
      prob.rhs.size() != m || prob.box.dim != n) {
    throw std::invalid_argument("solve_fluid: dimension mismatch");
  }
  const Scalar L = prob.box.lower;
  const Scalar U = prob.box.upper;
  const Vec<Scalar> rhs = prob.rhs.cwiseMax(Scalar(0));

  FluidSolution<Scalar> sol;
  sol.removed.assign(static_cast<std::size_t>(n), 0);
  std::vector<char> depleted(static_cast<std::size_t>(m), 0);
  for (Index i = 0; i < m; ++i) {
    if (rhs(i) <= Scalar(0)) {
      depleted[static_cast<std::size_t>(i)] = 1;
      for (Index j = 0; j < n; ++j) {
        if (prob.A(i, j) > Scalar(0)) {
          sol.removed[static_cast<std::size_t>(j)] = 1;
        }
      }
    }
  }
  std::vector<Index> keep;
  std::vector<Index> gone;
  for (Index j = 0; j < n; ++j) {
    (sol.removed[static_cast<std::size_t>(j)] ? gone : keep).push_back(j);
  }
  const Index r = static_cast<Index>(keep.size());
  std::vector<Index> rows;
  for (Index i = 0; i < m; ++i) {
    if (!depleted[static_cast<std::size_t>(i)]) {
      rows.push_back(i);
    }
  }

  sol.p = Vec<Scalar>::Constant(n, U);
  sol.d = Vec<Scalar>::Zero(n);
  sol.status = gone.empty() ? FluidStatus::optimal : FluidStatus::reduced;
  if (r == 0) {
    return sol;
  }

  Mat<Scalar> Brr(r, r);
  Vec<Scalar> a(r);
  for (Index i = 0; i < r; ++i) {
    a(i) = par.alpha(keep[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < r; ++j) {
      Brr(i, j) = par.B(keep[static_cast<std::size_t>(i)],
                        keep[static_cast<std::size_t>(j)]);
    }
    for (Index g : gone) {
      a(i) += par.B(keep[static_cast<std::size_t>(i)], g) * U;
    }
  }
  const Index nres = static_cast<Index>(rows.size());
  Mat<Scalar> Ar(nres, r);
  Vec<Scalar> br(nres);
  for (Index k = 0; k < nres; ++k) {
    br(k) = rhs(rows[static_cast<std::size_t>(k)]);
    for (Index j = 0; j < r; ++j) {
      Ar(k, j) = prob.A(rows[static_cast<std::size_t>(k)],
                        keep[static_cast<std::size_t>(j)]);
    }
  }

  // Rows: resources, then p <= U, then -p <= -L, then optional -d <= 0.
  const Index nnn = prob.demand_nonnegative ? r : 0;
  Mat<Scalar> G(nres + 2 * r + nnn, r);
  Vec<Scalar> h(nres + 2 * r + nnn);
  G.topRows(nres) = Ar * Brr;
  h.head(nres) = br - Ar * a;
  G.middleRows(nres, r) = Mat<Scalar>::Identity(r, r);
  h.segment(nres, r).setConstant(U);
  G.middleRows(nres + r, r) = -Mat<Scalar>::Identity(r, r);
  h.segment(nres + r, r).setConstant(-L);
  if (nnn > 0) {
    G.bottomRows(r) = -Brr;
    h.tail(r) = a;
  }
  const Mat<Scalar> Q = -(Brr + Brr.transpose());
  const Vec<Scalar> c = -a;

  auto qp = solve_dense_qp<Scalar>(Q, c, G, h, Scalar(1e-12),
                                   opts.max_iterations);
  Vec<Scalar> pr;
  if (qp.status == QpStatus::infeasible) {
    throw FluidInfeasible("solve_fluid: no price in the box meets capacity");
  } else if (qp.status == QpStatus::iteration_limit) {
    pr = detail::penalty_projected_gradient<Scalar>(Q, c, G.topRows(nres),
                                                    h.head(nres), L, U, qp.x);
    sol.status = FluidStatus::degenerate_boundary;
    // Residual of the projected-gradient fixed point.
    const Vec<Scalar> grad = Q * pr + c;
    const Vec<Scalar> step = (pr - grad).cwiseMax(L).cwiseMin(U) - pr;
    sol.kkt_residual = std::max(step.cwiseAbs().maxCoeff(),
                                (G * pr - h).maxCoeff());
  } else {
    pr = qp.x.cwiseMax(L).cwiseMin(U);
    sol.kkt_residual = qp.kkt_residual;
    for (Index k : qp.active) {
      if (k < nres) {
        sol.active.push_back(rows[static_cast<std::size_t>(k)]);
      }
    }
    std::sort(sol.active.begin(), sol.active.end());
  }

  const Vec<Scalar> dr = a + Brr * pr;
  for (Index j = 0; j < r; ++j) {
    sol.p(keep[static_cast<std::size_t>(j)]) = pr(j);
    sol.d(keep[static_cast<std::size_t>(j)]) = dr(j);
  }
  sol.value = pr.dot(dr);
  return sol;
}

enum class ThresholdKind { full_info, learning, informed };

template <typename Scalar>
Scalar attraction_threshold(ThresholdKind kind, int t, int T, Scalar zeta) {
  if (t < 1 || t > T || zeta < Scalar(0)) {
    throw std::invalid_argument("attraction_threshold: need 1 <= t <= T");
  }
  const Scalar rem = Scalar(T - t + 1);
  const Scalar tt = Scalar(t);
  switch (kind) {
  case ThresholdKind::full_info:
    return zeta / std::sqrt(rem);
  case ThresholdKind::learning:
    return zeta * (Scalar(1) / std::sqrt(std::sqrt(rem)) +
                   Scalar(1) / std::sqrt(std::sqrt(tt)));
  case ThresholdKind::informed:
    return zeta * (Scalar(1) / std::sqrt(rem) + Scalar(1) / std::sqrt(tt));
  }
  return zeta;
}

/// Rounds components below the threshold to zero.
template <typename Derived>
Vec<typename Derived::Scalar>
boundary_attract(const Eigen::MatrixBase<Derived> &d,
                 typename Derived::Scalar threshold) {
  using Scalar = typename Derived::Scalar;
  return (d.array() >= threshold).select(d, Scalar(0));
}

/// Horizon benchmark T * value(fluid at c0 / T).
template <typename Scalar>
Scalar fluid_value(const PricingInstance<Scalar> &inst,
                   const FluidOptions &opts = {}) {
  FluidProblem<Scalar> prob{inst.model.params(), inst.A,
                            inst.c0 / Scalar(inst.T), inst.box, false};
  return Scalar(inst.T) * solve_fluid(prob, opts).value;
}

} // namespace pricelab

#endif // PRICELAB_FLUID_HPP
