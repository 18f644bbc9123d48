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

#ifndef PRICELAB_LINALG_HPP
#define PRICELAB_LINALG_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace pricelab {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Eigen::Index;

/// Largest eigenvalue of the symmetric part (M + M^T) / 2.
template <typename Derived>
typename Derived::Scalar sym_lambda_max(const Eigen::MatrixBase<Derived> &m) {
  using Scalar = typename Derived::Scalar;
  const Mat<Scalar> sym = (m + m.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

template <typename Derived>
typename Derived::Scalar sym_lambda_min(const Eigen::MatrixBase<Derived> &m) {
  using Scalar = typename Derived::Scalar;
  const Mat<Scalar> sym = (m + m.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix. Eigenvalues below
/// rel_cutoff * lambda_max are treated as zero.
template <typename Derived>
Mat<typename Derived::Scalar>
pinv_symmetric(const Eigen::MatrixBase<Derived> &m,
               typename Derived::Scalar rel_cutoff = 1e-10) {
  using Scalar = typename Derived::Scalar;
  const Index n = m.rows();
  if (n != m.cols()) {
    throw std::invalid_argument("pinv_symmetric: matrix is not square");
  }
  if (n == 0) {
    return Mat<Scalar>(0, 0);
  }
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(
      ((m + m.transpose()) / Scalar(2)).eval());
  const Vec<Scalar> &ev = es.eigenvalues();
  const Scalar top = ev.cwiseAbs().maxCoeff();
  if (!(top > Scalar(0))) {
    return Mat<Scalar>::Zero(n, n);
  }
  const Scalar cut = rel_cutoff * top;
  Vec<Scalar> inv(n);
  for (Index i = 0; i < n; ++i) {
    inv(i) = ev(i) > cut ? Scalar(1) / ev(i) : Scalar(0);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// Replaces a slope matrix whose symmetric part is not safely negative definite
/// by the projection of that symmetric part onto {eigenvalues <= ceiling}.
/// Matrices already satisfying the bound are returned unchanged.
template <typename Derived>
Mat<typename Derived::Scalar>
repair_negative_definite(const Eigen::MatrixBase<Derived> &b,
                         typename Derived::Scalar ceiling = -1e-6) {
  using Scalar = typename Derived::Scalar;
  if (sym_lambda_max(b) <= ceiling) {
    return b;
  }
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(
      ((b + b.transpose()) / Scalar(2)).eval());
  const Vec<Scalar> clamped = es.eigenvalues().cwiseMin(ceiling);
  return es.eigenvectors() * clamped.asDiagonal() *
         es.eigenvectors().transpose();
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived> &x) {
  return x.allFinite();
}

} // namespace pricelab

#endif // PRICELAB_LINALG_HPP
