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

#ifndef PRICELAB_QP_HPP
#define PRICELAB_QP_HPP

#include <algorithm>
#include <limits>
#include <vector>

#include "pricelab/linalg.hpp"

namespace pricelab {

enum class QpStatus { optimal, infeasible, iteration_limit };

template <typename Scalar>
struct QpResult {
  QpStatus status = QpStatus::optimal;
  Vec<Scalar> x;
  /// Indices into the rows of G of the constraints held active at x.
  std::vector<Index> active;
  /// Multipliers for `active`, in the same order. Nonnegative at optimum.
  Vec<Scalar> multipliers;
  Scalar kkt_residual = Scalar(0);
  int iterations = 0;
};

/// Strictly convex dense QP
///
///   minimize   1/2 x^T Q x + c^T x
///   subject to G x <= h
///
/// solved with the dual active-set method of Goldfarb and Idnani. The method
/// starts from the unconstrained minimizer and adds the most violated
/// constraint at each major step, so no feasible starting point is needed and
/// infeasibility is detected when a violated constraint cannot be satisfied.
///
/// Sizes here are small (tens of variables), so the reduced systems are
/// refactored at every step instead of carrying QR updates.
template <typename Scalar>
QpResult<Scalar> solve_dense_qp(const Mat<Scalar> &Q, const Vec<Scalar> &c,
                                const Mat<Scalar> &G, const Vec<Scalar> &h,
                                Scalar tol = Scalar(1e-10),
                                int max_iterations = -1) {
  const Index n = Q.rows();
  const Index mc = G.rows();
  if (Q.cols() != n || c.size() != n || (mc > 0 && G.cols() != n) ||
      h.size() != mc) {
    throw std::invalid_argument("solve_dense_qp: dimension mismatch");
  }
  QpResult<Scalar> out;
  if (max_iterations < 0) {
    max_iterations = static_cast<int>(10 * (n + mc) + 50);
  }

  Eigen::LLT<Mat<Scalar>> llt(Q);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("solve_dense_qp: Q is not positive definite");
  }
  const Mat<Scalar> qinv = llt.solve(Mat<Scalar>::Identity(n, n));

  Vec<Scalar> x = -(qinv * c);
  std::vector<Index> act;
  std::vector<Scalar> u;
  std::vector<char> is_active(static_cast<std::size_t>(mc), 0);

  // Violation scale per row so the stopping rule is insensitive to units.
  Vec<Scalar> row_scale(mc);
  for (Index i = 0; i < mc; ++i) {
    row_scale(i) = Scalar(1) + std::abs(h(i)) + G.row(i).cwiseAbs().maxCoeff();
  }

  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  int iter = 0;
  while (true) {
    // Most violated inactive constraint, lowest index on ties.
    Index p = -1;
    Scalar worst = Scalar(0);
    for (Index i = 0; i < mc; ++i) {
      if (is_active[static_cast<std::size_t>(i)]) {
        continue;
      }
      const Scalar viol = (G.row(i).dot(x) - h(i)) / row_scale(i);
      if (viol > tol && viol > worst) {
        worst = viol;
        p = i;
      }
    }
    if (p < 0) {
      break;
    }

    const Vec<Scalar> np = -G.row(p).transpose();
    Scalar u_plus = Scalar(0);
    bool added = false;
    while (!added) {
      if (++iter > max_iterations) {
        out.status = QpStatus::iteration_limit;
        goto finish;
      }
      const Index q = static_cast<Index>(act.size());
      Vec<Scalar> r(q);
      Vec<Scalar> z;
      const Vec<Scalar> qinv_np = qinv * np;
      if (q > 0) {
        Mat<Scalar> N(n, q);
        for (Index j = 0; j < q; ++j) {
          N.col(j) = -G.row(act[static_cast<std::size_t>(j)]).transpose();
        }
        const Mat<Scalar> qinv_n = qinv * N;
        const Mat<Scalar> M = N.transpose() * qinv_n;
        r = M.ldlt().solve(N.transpose() * qinv_np);
        z = qinv_np - qinv_n * r;
      } else {
        z = qinv_np;
      }

      // Dual step length: first active multiplier driven to zero.
      Scalar t1 = inf;
      Index k = -1;
      for (Index j = 0; j < q; ++j) {
        if (r(j) > Scalar(0)) {
          const Scalar ratio = u[static_cast<std::size_t>(j)] / r(j);
          if (ratio < t1) {
            t1 = ratio;
            k = j;
          }
        }
      }
      // Primal step length: full step satisfies constraint p with equality.
      Scalar t2 = inf;
      const Scalar curv = z.dot(np);
      if (curv > Scalar(1e-14) * np.dot(qinv_np)) {
        const Scalar slack = np.dot(x) + h(p); // n_p^T x - b_p with b_p = -h_p
        t2 = -slack / curv;
      }
      const Scalar t = std::min(t1, t2);
      if (t == inf) {
        out.status = QpStatus::infeasible;
        goto finish;
      }
      for (Index j = 0; j < q; ++j) {
        u[static_cast<std::size_t>(j)] -= t * r(j);
      }
      u_plus += t;
      if (t2 < inf) {
        x += t * z;
      }
      if (t2 <= t1) {
        act.push_back(p);
        u.push_back(u_plus);
        is_active[static_cast<std::size_t>(p)] = 1;
        added = true;
      } else {
        is_active[static_cast<std::size_t>(act[static_cast<std::size_t>(k)])] = 0;
        act.erase(act.begin() + k);
        u.erase(u.begin() + k);
      }
    }
  }

finish:
  out.x = x;
  out.iterations = iter;
  out.active = act;
  out.multipliers = Vec<Scalar>(static_cast<Index>(u.size()));
  for (std::size_t j = 0; j < u.size(); ++j) {
    out.multipliers(static_cast<Index>(j)) = u[j];
  }
  // KKT residual: stationarity, primal feasibility, dual feasibility.
  Vec<Scalar> grad = Q * x + c;
  for (std::size_t j = 0; j < act.size(); ++j) {
    grad += u[j] * G.row(act[j]).transpose();
  }
  Scalar res = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : Scalar(0);
  for (Index i = 0; i < mc; ++i) {
    res = std::max(res, G.row(i).dot(x) - h(i));
  }
  for (Scalar uj : u) {
    res = std::max(res, -uj);
  }
  out.kkt_residual = res;
  return out;
}

} // namespace pricelab

#endif // PRICELAB_QP_HPP
