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

#ifndef PRICELAB_SURROGATE_HPP
#define PRICELAB_SURROGATE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pricelab/estimators.hpp"
#include "pricelab/model.hpp"
#include "pricelab/rng.hpp"

namespace pricelab {

/// Biased linear signal coupled to demand through the shared noise draw:
///   S = bias + slope p + a eps + c nu,  nu ~ N(0, I).
/// With a = rho noise_sd / sigma and c = noise_sd sqrt(1 - rho^2) each
/// component has variance noise_sd^2 and correlation rho with demand.
template <typename Scalar>
struct SurrogateModel {
  Vec<Scalar> bias;
  Mat<Scalar> slope;
  Scalar rho = Scalar(0);
  Scalar noise_sd = Scalar(1);
  Scalar a = Scalar(0);
  Scalar c = Scalar(1);

  SurrogateModel() = default;
  SurrogateModel(Vec<Scalar> bias_, Mat<Scalar> slope_, Scalar rho_,
                 Scalar noise_sd_, Scalar sigma)
      : bias(std::move(bias_)), slope(std::move(slope_)), rho(rho_),
        noise_sd(noise_sd_) {
    if (!(rho > Scalar(-1) && rho <= Scalar(1)) || noise_sd < Scalar(0) ||
        sigma < Scalar(0) || slope.rows() != bias.size() ||
        slope.cols() != bias.size()) {
      throw std::invalid_argument("SurrogateModel: bad parameters");
    }
    if (sigma > Scalar(0)) {
      a = rho * noise_sd / sigma;
      c = noise_sd * std::sqrt(std::max(Scalar(0), Scalar(1) - rho * rho));
    } else {
      a = Scalar(0);
      c = noise_sd;
    }
  }

  Index n() const { return bias.size(); }
  Vec<Scalar> mean(const Vec<Scalar> &p) const { return bias + slope * p; }
};

template <typename Scalar>
Vec<Scalar> sample_surrogate(const SurrogateModel<Scalar> &sm,
                             const Vec<Scalar> &p, const Vec<Scalar> &eps,
                             Rng &rng) {
  return sm.mean(p) + sm.a * eps + normal_vector<Scalar>(rng, sm.n(), sm.c);
}

/// Linear center m(p) = c0 + C1 p.
template <typename Scalar>
struct SurrogateCenter {
  Vec<Scalar> c0;
  Mat<Scalar> C1;

  Vec<Scalar> operator()(const Vec<Scalar> &p) const { return c0 + C1 * p; }
};

template <typename Scalar>
struct OfflineDataset {
  Mat<Scalar> prices;  // N x n
  Mat<Scalar> signals; // N x n
  SurrogateCenter<Scalar> center;
  Mat<Scalar> sigma_s_off;

  Index size() const { return prices.rows(); }
};

/// Draws N uniform prices, samples the surrogate with its own noise, fits the
/// linear center by least squares and the residual covariance with 1/(N-n-1).
template <typename Scalar>
OfflineDataset<Scalar> build_offline_dataset(const SurrogateModel<Scalar> &sm,
                                             Index N,
                                             const PriceBox<Scalar> &box,
                                             Scalar sigma, Rng &rng) {
  const Index n = sm.n();
  if (N < n + 1 || box.dim != n) {
    throw std::invalid_argument("build_offline_dataset: need N >= n + 1");
  }
  for (int attempt = 0; attempt <= 5; ++attempt) {
    OfflineDataset<Scalar> ds;
    ds.prices.resize(N, n);
    ds.signals.resize(N, n);
    DesignState<Scalar> fit(n);
    for (Index i = 0; i < N; ++i) {
      const Vec<Scalar> p =
          uniform_vector<Scalar>(rng, n, box.lower, box.upper);
      const Vec<Scalar> eps = normal_vector<Scalar>(rng, n, sigma);
      const Vec<Scalar> s = sample_surrogate(sm, p, eps, rng);
      ds.prices.row(i) = p.transpose();
      ds.signals.row(i) = s.transpose();
      ols_update(fit, p, s);
    }
    const Mat<Scalar> P = fit.design();
    if (!(sym_lambda_min(P) > Scalar(1e-10) * sym_lambda_max(P))) {
      continue;
    }
    const ParamEstimate<Scalar> est = ols_estimate(fit);
    ds.center.c0 = est.alpha;
    ds.center.C1 = est.B;
    ds.sigma_s_off = Mat<Scalar>::Zero(n, n);
    if (N > n + 1) {
      for (Index i = 0; i < N; ++i) {
        const Vec<Scalar> r = ds.signals.row(i).transpose() -
                              ds.center(ds.prices.row(i).transpose());
        ds.sigma_s_off.noalias() += r * r.transpose();
      }
      ds.sigma_s_off /= Scalar(N - n - 1);
    }
    return ds;
  }
  throw std::runtime_error("build_offline_dataset: degenerate design");
}

template <typename Scalar>
struct ControlVariate {
  Mat<Scalar> gamma;
  Scalar lambda_reg = Scalar(0);
};

/// Default ridge 1e-3 * trace / n.
template <typename Scalar>
Scalar default_ridge(const Mat<Scalar> &sigma_s_off) {
  const Scalar r = Scalar(1e-3) * sigma_s_off.trace() /
                   Scalar(sigma_s_off.rows());
  return r > Scalar(0) ? r : Scalar(1e-12);
}

/// Gamma = Sigma_dS (Sigma_S_off + lambda I)^{-1}.
template <typename Scalar>
ControlVariate<Scalar> gamma_from_cross(const Mat<Scalar> &sigma_ds,
                                        const Mat<Scalar> &sigma_s_off,
                                        Scalar lambda) {
  const Index n = sigma_s_off.rows();
  const Mat<Scalar> reg =
      sigma_s_off + lambda * Mat<Scalar>::Identity(n, n);
  ControlVariate<Scalar> cv;
  // Gamma reg = sigma_ds  <=>  reg^T Gamma^T = sigma_ds^T.
  cv.gamma = reg.transpose().ldlt().solve(sigma_ds.transpose()).transpose();
  cv.lambda_reg = lambda;
  return cv;
}

/// Online pairs with a caller-supplied demand mean proxy.
template <typename Scalar>
ControlVariate<Scalar>
estimate_gamma(const std::vector<Vec<Scalar>> &d,
               const std::vector<Vec<Scalar>> &s,
               const std::vector<Vec<Scalar>> &p,
               const DemandParams<Scalar> &mean_proxy,
               const SurrogateCenter<Scalar> &center,
               const Mat<Scalar> &sigma_s_off, Scalar lambda) {
  const std::size_t t = d.size();
  if (t < 2 || s.size() != t || p.size() != t) {
    throw std::invalid_argument("estimate_gamma: need >= 2 online pairs");
  }
  const Index n = sigma_s_off.rows();
  Mat<Scalar> cross = Mat<Scalar>::Zero(n, n);
  for (std::size_t i = 0; i < t; ++i) {
    const Vec<Scalar> rd = d[i] - demand_mean(mean_proxy, p[i]);
    const Vec<Scalar> rs = s[i] - center(p[i]);
    cross.noalias() += rd * rs.transpose();
  }
  cross /= Scalar(t - 1);
  return gamma_from_cross<Scalar>(cross, sigma_s_off, lambda);
}

/// d - Gamma (S - m(p)).
template <typename Scalar>
Vec<Scalar> pseudo_observe(const Vec<Scalar> &d, const Vec<Scalar> &s,
                           const Vec<Scalar> &p,
                           const ControlVariate<Scalar> &cv,
                           const SurrogateCenter<Scalar> &center) {
  return d - cv.gamma * (s - center(p));
}

template <typename Scalar>
struct SchurResult {
  Mat<Scalar> cov;
  Scalar sigma_eff = Scalar(0);
};

/// Sigma_d - Sigma_dS Sigma_S^{-1} Sigma_Sd and sqrt of its top eigenvalue.
template <typename Scalar>
SchurResult<Scalar> schur_variance(const Mat<Scalar> &sigma_d,
                                   const Mat<Scalar> &sigma_ds,
                                   const Mat<Scalar> &sigma_s) {
  Eigen::LLT<Mat<Scalar>> llt(sigma_s);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("schur_variance: Sigma_S is singular");
  }
  SchurResult<Scalar> out;
  out.cov = sigma_d - sigma_ds * llt.solve(sigma_ds.transpose());
  out.sigma_eff =
      std::sqrt(std::max(Scalar(0), sym_lambda_max(out.cov)));
  return out;
}

/// Running sums of the centered surrogate s = S - m(p) against price and
/// demand. They let a coefficient fitted later be applied to the whole
/// history: pseudo moments are raw moments minus Gamma times these.
template <typename Scalar>
struct SurrogateMoments {
  long t = 0;
  Vec<Scalar> sum_s;
  /// sum p s^T
  Mat<Scalar> sum_ps;
  /// sum d s^T
  Mat<Scalar> sum_ds;

  explicit SurrogateMoments(Index n = 0)
      : sum_s(Vec<Scalar>::Zero(n)), sum_ps(Mat<Scalar>::Zero(n, n)),
        sum_ds(Mat<Scalar>::Zero(n, n)) {}

  void update(const Vec<Scalar> &p, const Vec<Scalar> &d,
              const Vec<Scalar> &s_centered) {
    t += 1;
    sum_s += s_centered;
    sum_ps.noalias() += p * s_centered.transpose();
    sum_ds.noalias() += d * s_centered.transpose();
  }

  /// (1/(t-1)) sum (d - mu(p)) s^T for mu(p) = alpha + B p.
  Mat<Scalar> cross_cov(const DemandParams<Scalar> &mu) const {
    if (t < 2) {
      return Mat<Scalar>::Zero(sum_s.size(), sum_s.size());
    }
    return (sum_ds - mu.alpha * sum_s.transpose() - mu.B * sum_ps) /
           Scalar(t - 1);
  }
};

/// Design state whose demand moments are those of d - Gamma s.
template <typename Scalar>
DesignState<Scalar> pseudo_design(const DesignState<Scalar> &raw,
                                  const SurrogateMoments<Scalar> &sm,
                                  const Mat<Scalar> &gamma) {
  DesignState<Scalar> out = raw;
  out.sum_d -= gamma * sm.sum_s;
  out.sum_pd -= sm.sum_ps * gamma.transpose();
  return out;
}

/// Anchored state whose demand moments are those of d - Gamma s.
template <typename Scalar>
AnchoredState<Scalar> pseudo_anchored(const AnchoredState<Scalar> &raw,
                                      const SurrogateMoments<Scalar> &sm,
                                      const Mat<Scalar> &gamma) {
  AnchoredState<Scalar> out = raw;
  out.C -= gamma * (sm.sum_ps.transpose() - sm.sum_s * raw.anchor_p.transpose());
  return out;
}

} // namespace pricelab

#endif // PRICELAB_SURROGATE_HPP
