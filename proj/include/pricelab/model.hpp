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

#ifndef PRICELAB_MODEL_HPP
#define PRICELAB_MODEL_HPP

#include <stdexcept>
#include <string>

#include "pricelab/linalg.hpp"
#include "pricelab/qp.hpp"

namespace pricelab {

/// Price box [lower, upper]^dim.
template <typename Scalar>
struct PriceBox {
  Scalar lower = Scalar(0);
  Scalar upper = Scalar(1);
  Index dim = 1;

  PriceBox() = default;
  PriceBox(Scalar l, Scalar u, Index n) : lower(l), upper(u), dim(n) {
    if (!(l >= Scalar(0)) || !(u > l) || n < 1) {
      throw std::invalid_argument("PriceBox: need 0 <= lower < upper, dim >= 1");
    }
  }

  bool contains(const Vec<Scalar> &p, Scalar slack = Scalar(0)) const {
    return p.size() == dim && (p.array() >= lower - slack).all() &&
           (p.array() <= upper + slack).all();
  }
};

/// Intercept and slope of a linear demand law. Also serves as the type of
/// an estimate, which carries no validity guarantees.
template <typename Scalar>
struct DemandParams {
  Vec<Scalar> alpha;
  Mat<Scalar> B;

  Index n() const { return alpha.size(); }
};

template <typename Scalar>
using ParamEstimate = DemandParams<Scalar>;

/// f(p) = alpha + B p with B negative definite. Validated on construction.
template <typename Scalar>
class LinearDemandModel {
public:
  static constexpr double kEigTol = 1e-10;

  LinearDemandModel() = default;
  LinearDemandModel(Vec<Scalar> alpha, Mat<Scalar> B) {
    const Index n = alpha.size();
    if (n < 1 || B.rows() != n || B.cols() != n) {
      throw std::invalid_argument("LinearDemandModel: dimension mismatch");
    }
    if (!alpha.allFinite() || !B.allFinite()) {
      throw std::invalid_argument("LinearDemandModel: non-finite entries");
    }
    if ((alpha.array() < Scalar(0)).any()) {
      throw std::invalid_argument("LinearDemandModel: negative intercept");
    }
    if (!(sym_lambda_max(B) < -Scalar(kEigTol))) {
      throw std::invalid_argument(
          "LinearDemandModel: B + B^T is not negative definite");
    }
    params_.alpha = std::move(alpha);
    params_.B = std::move(B);
    lu_ = params_.B.partialPivLu();
  }

  Index n() const { return params_.alpha.size(); }
  const Vec<Scalar> &alpha() const { return params_.alpha; }
  const Mat<Scalar> &B() const { return params_.B; }
  const DemandParams<Scalar> &params() const { return params_; }
  const Eigen::PartialPivLU<Mat<Scalar>> &lu() const { return lu_; }

private:
  DemandParams<Scalar> params_;
  Eigen::PartialPivLU<Mat<Scalar>> lu_;
};

/// A full market: demand law, consumption matrix, capacity, horizon, noise.
template <typename Scalar>
struct PricingInstance {
  LinearDemandModel<Scalar> model;
  Mat<Scalar> A;
  Vec<Scalar> c0;
  int T = 1;
  Scalar sigma = Scalar(0);
  PriceBox<Scalar> box;

  Index n() const { return model.n(); }
  Index m() const { return A.rows(); }

  void validate() const {
    if (A.cols() != n() || c0.size() != A.rows() || box.dim != n()) {
      throw std::invalid_argument("PricingInstance: dimension mismatch");
    }
    if ((A.array() < Scalar(0)).any() || (c0.array() < Scalar(0)).any()) {
      throw std::invalid_argument("PricingInstance: negative A or c0");
    }
    if (T < 1 || !(sigma >= Scalar(0))) {
      throw std::invalid_argument("PricingInstance: need T >= 1, sigma >= 0");
    }
  }
};

template <typename Scalar>
Vec<Scalar> demand_mean(const DemandParams<Scalar> &params,
                        const Vec<Scalar> &p) {
  if (p.size() != params.n()) {
    throw std::invalid_argument("demand_mean: dimension mismatch");
  }
  return params.alpha + params.B * p;
}

template <typename Scalar>
Vec<Scalar> demand_mean(const LinearDemandModel<Scalar> &model,
                        const Vec<Scalar> &p) {
  return demand_mean(model.params(), p);
}

/// B^{-1}(d - alpha). Not clipped.
template <typename Scalar>
Vec<Scalar> inverse_demand(const LinearDemandModel<Scalar> &model,
                           const Vec<Scalar> &d) {
  if (d.size() != model.n()) {
    throw std::invalid_argument("inverse_demand: dimension mismatch");
  }
  return model.lu().solve(d - model.alpha());
}

template <typename Scalar>
Vec<Scalar> clip_to_box(const Vec<Scalar> &p, const PriceBox<Scalar> &box) {
  return p.cwiseMax(box.lower).cwiseMin(box.upper);
}

/// r(d) = d^T B^{-1}(d - alpha): revenue of the price that induces mean d.
template <typename Scalar>
Scalar revenue_of_demand(const LinearDemandModel<Scalar> &model,
                         const Vec<Scalar> &d) {
  return d.dot(inverse_demand(model, d));
}

/// Maximizer of r(d) over d >= 0.
template <typename Scalar>
Vec<Scalar> unconstrained_opt_demand(const LinearDemandModel<Scalar> &model) {
  const Index n = model.n();
  const Mat<Scalar> binv = model.lu().inverse();
  // r(d) = d^T Binv d - d^T Binv alpha; minimize the negation.
  const Mat<Scalar> Q = -(binv + binv.transpose());
  const Vec<Scalar> c = binv * model.alpha();
  const Mat<Scalar> G = -Mat<Scalar>::Identity(n, n);
  const Vec<Scalar> h = Vec<Scalar>::Zero(n);
  auto res = solve_dense_qp<Scalar>(Q, c, G, h, Scalar(1e-13));
  if (res.status != QpStatus::optimal) {
    throw std::runtime_error("unconstrained_opt_demand: solver failed");
  }
  return res.x.cwiseMax(Scalar(0));
}

/// kappa = -lambda_max(B^{-1} + B^{-T}) / 2, the second-order growth modulus
/// of r around its maximizer.
template <typename Scalar>
Scalar growth_modulus(const LinearDemandModel<Scalar> &model) {
  const Mat<Scalar> binv = model.lu().inverse();
  return -sym_lambda_max(binv);
}

/// True when alpha + B p >= 0 for every p in the box.
template <typename Scalar>
bool demand_nonnegative_on_box(const DemandParams<Scalar> &params,
                               const PriceBox<Scalar> &box) {
  const Mat<Scalar> lo = params.B * box.lower;
  const Mat<Scalar> hi = params.B * box.upper;
  const Vec<Scalar> worst = params.alpha + lo.cwiseMin(hi).rowwise().sum();
  return (worst.array() >= Scalar(0)).all();
}

} // namespace pricelab

#endif // PRICELAB_MODEL_HPP
