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

#ifndef PRICELAB_ESTIMATORS_HPP
#define PRICELAB_ESTIMATORS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pricelab/model.hpp"

namespace pricelab {

class NotConverged : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Sufficient statistics for least squares of d on [1, p].
template <typename Scalar>
struct DesignState {
  long t = 0;
  Vec<Scalar> sum_p;
  Mat<Scalar> sum_ppT;
  Vec<Scalar> sum_d;
  /// Column j is sum_s d_j^s p^s.
  Mat<Scalar> sum_pd;

  explicit DesignState(Index n = 0)
      : sum_p(Vec<Scalar>::Zero(n)), sum_ppT(Mat<Scalar>::Zero(n, n)),
        sum_d(Vec<Scalar>::Zero(n)), sum_pd(Mat<Scalar>::Zero(n, n)) {}

  Index n() const { return sum_p.size(); }

  /// (n+1) x (n+1) design matrix [[t, sum_p^T], [sum_p, sum_ppT]].
  Mat<Scalar> design() const {
    const Index n = this->n();
    Mat<Scalar> P(n + 1, n + 1);
    P(0, 0) = Scalar(t);
    P.block(0, 1, 1, n) = sum_p.transpose();
    P.block(1, 0, n, 1) = sum_p;
    P.block(1, 1, n, n) = sum_ppT;
    return P;
  }

  /// (n+1) x n right-hand sides; column j is D_j.
  Mat<Scalar> moments() const {
    const Index n = this->n();
    Mat<Scalar> D(n + 1, n);
    D.row(0) = sum_d.transpose();
    D.bottomRows(n) = sum_pd;
    return D;
  }
};

template <typename Scalar>
void ols_update(DesignState<Scalar> &s, const Vec<Scalar> &p,
                const Vec<Scalar> &d) {
  if (p.size() != s.n() || d.size() != s.n()) {
    throw std::invalid_argument("ols_update: dimension mismatch");
  }
  s.t += 1;
  s.sum_p += p;
  s.sum_ppT.noalias() += p * p.transpose();
  s.sum_d += d;
  s.sum_pd.noalias() += p * d.transpose();
}

namespace detail {

template <typename Scalar>
ParamEstimate<Scalar> coefficients_to_params(const Mat<Scalar> &theta) {
  const Index n = theta.cols();
  ParamEstimate<Scalar> est;
  est.alpha = theta.row(0).transpose();
  est.B = theta.bottomRows(n).transpose();
  return est;
}

} // namespace detail

/// Per product [alpha_j; beta_j] = pinv(P) D_j.
template <typename Scalar>
ParamEstimate<Scalar> ols_estimate(const DesignState<Scalar> &s) {
  if (s.t < 1) {
    throw std::invalid_argument("ols_estimate: no observations");
  }
  const Mat<Scalar> theta = pinv_symmetric(s.design()) * s.moments();
  return detail::coefficients_to_params<Scalar>(theta);
}

/// Regression centered at a certified anchor (p0, d0).
template <typename Scalar>
struct AnchoredState {
  Vec<Scalar> anchor_p;
  Vec<Scalar> anchor_d;
  Scalar eps0 = Scalar(0);
  long t = 0;
  /// sum (p - p0)(p - p0)^T
  Mat<Scalar> V;
  /// sum (d - d0)(p - p0)^T
  Mat<Scalar> C;

  AnchoredState() = default;
  AnchoredState(Vec<Scalar> p0, Vec<Scalar> d0, Scalar eps)
      : anchor_p(std::move(p0)), anchor_d(std::move(d0)), eps0(eps) {
    const Index n = anchor_p.size();
    if (anchor_d.size() != n || eps < Scalar(0)) {
      throw std::invalid_argument("AnchoredState: bad anchor");
    }
    V = Mat<Scalar>::Zero(n, n);
    C = Mat<Scalar>::Zero(n, n);
  }
};

template <typename Scalar>
void anchored_update(AnchoredState<Scalar> &s, const Vec<Scalar> &p,
                     const Vec<Scalar> &d) {
  const Vec<Scalar> x = p - s.anchor_p;
  s.t += 1;
  s.V.noalias() += x * x.transpose();
  s.C.noalias() += (d - s.anchor_d) * x.transpose();
}

/// B_hat = C pinv(V), alpha_hat = d0 - B_hat p0, so the prediction is
/// d0 + B_hat (p - p0).
template <typename Scalar>
ParamEstimate<Scalar> anchored_estimate(const AnchoredState<Scalar> &s) {
  if (s.t < 1) {
    throw std::invalid_argument("anchored_estimate: no observations");
  }
  ParamEstimate<Scalar> est;
  est.B = s.C * pinv_symmetric(s.V);
  est.alpha = s.anchor_d - est.B * s.anchor_p;
  return est;
}

/// Least squares subject to ||d0 - (alpha + B p0)|| <= eps0.
///
/// The penalized problem with weight mu is least squares with the anchor
/// added as a sample of weight mu, so each inner solve is closed form. mu is
/// doubled until the ball is met to within 1e-6, then bisected back toward
/// the boundary.
template <typename Scalar>
ParamEstimate<Scalar>
constrained_anchored_estimate(const DesignState<Scalar> &s,
                              const Vec<Scalar> &p0, const Vec<Scalar> &d0,
                              Scalar eps0, Scalar penalty_weight = Scalar(1)) {
  if (eps0 < Scalar(0) || !(penalty_weight > Scalar(0))) {
    throw std::invalid_argument("constrained_anchored_estimate: bad input");
  }
  const Index n = s.n();
  const Mat<Scalar> P = s.design();
  const Mat<Scalar> D = s.moments();
  Vec<Scalar> z(n + 1);
  z(0) = Scalar(1);
  z.tail(n) = p0;
  const Mat<Scalar> zzT = z * z.transpose();
  const Mat<Scalar> zd = z * d0.transpose();
  const Scalar slack_tol = Scalar(1e-6);

  auto solve = [&](Scalar mu) {
    return detail::coefficients_to_params<Scalar>(
        pinv_symmetric((P + mu * zzT).eval()) * (D + mu * zd));
  };
  auto excess = [&](const ParamEstimate<Scalar> &e) {
    return (d0 - e.alpha - e.B * p0).norm() - eps0;
  };

  if (s.t >= 1) {
    ParamEstimate<Scalar> ols = solve(Scalar(0));
    if (excess(ols) <= slack_tol) {
      return ols;
    }
  }
  Scalar mu = penalty_weight;
  ParamEstimate<Scalar> est = solve(mu);
  int doublings = 0;
  while (excess(est) > slack_tol) {
    if (++doublings > 30) {
      throw NotConverged("constrained_anchored_estimate: penalty loop "
                         "exhausted");
    }
    mu *= Scalar(2);
    est = solve(mu);
  }
  if (doublings == 0) {
    return est;
  }
  // excess(lo) > tol >= excess(hi); shrink toward the smallest feasible mu.
  Scalar lo = mu / Scalar(2);
  Scalar hi = mu;
  for (int k = 0; k < 60; ++k) {
    const Scalar mid = (lo + hi) / Scalar(2);
    ParamEstimate<Scalar> cand = solve(mid);
    if (excess(cand) > slack_tol) {
      lo = mid;
    } else {
      hi = mid;
      est = std::move(cand);
    }
    if (hi - lo <= Scalar(1e-12) * hi) {
      break;
    }
  }
  return est;
}

/// Certified lower bound on lambda_min of the design matrix built from the
/// first t prices. anchors[k] is the epoch offset used for periods
/// kn+1..kn+n.
template <typename Scalar>
Scalar fisher_min_eig_bound(const std::vector<Vec<Scalar>> &prices,
                            const std::vector<Vec<Scalar>> &anchors, Index n,
                            Scalar upper) {
  if (prices.empty()) {
    throw std::invalid_argument("fisher_min_eig_bound: empty history");
  }
  const long t = static_cast<long>(prices.size());
  const long last = static_cast<long>(n) * (t / static_cast<long>(n));
  Vec<Scalar> mean = Vec<Scalar>::Zero(n);
  Scalar acc = Scalar(0);
  for (long s = 1; s <= last; ++s) {
    const Vec<Scalar> &p = prices[static_cast<std::size_t>(s - 1)];
    if (s > 1) {
      const std::size_t k = static_cast<std::size_t>((s - 1) / n);
      if (k >= anchors.size()) {
        throw std::invalid_argument("fisher_min_eig_bound: missing anchor");
      }
      acc += (Scalar(1) - Scalar(1) / Scalar(s)) *
             (p - mean - anchors[k]).squaredNorm();
    }
    mean += (p - mean) / Scalar(s);
  }
  return acc / (Scalar(n) * (Scalar(1) + Scalar(2) * upper * upper));
}

/// sigma0^2 sqrt(k n) / (8 n).
template <typename Scalar>
Scalar accumulated_variance_lower(long k, Index n, Scalar sigma0) {
  if (k < 1 || n < 1) {
    throw std::invalid_argument("accumulated_variance_lower: need k, n >= 1");
  }
  return sigma0 * sigma0 * std::sqrt(Scalar(k) * Scalar(n)) /
         (Scalar(8) * Scalar(n));
}

} // namespace pricelab

#endif // PRICELAB_ESTIMATORS_HPP
