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

#ifndef PRICELAB_RNG_HPP
#define PRICELAB_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

#include "pricelab/linalg.hpp"

namespace pricelab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream identifiers. Each (episode, purpose) pair owns its own generator.
enum class Stream : std::uint64_t {
  instance = 1,
  noise = 2,
  policy = 3,
  surrogate_online = 4,
  surrogate_offline = 5,
  anchor = 6,
};

/// Hashes a master seed and a path of integer keys into a 64-bit seed.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t k : keys) {
    s = splitmix64(s ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  }
  return s;
}

inline Rng make_stream(std::uint64_t base, Stream purpose) {
  return Rng(derive_seed(base, {static_cast<std::uint64_t>(purpose)}));
}

template <typename Scalar>
Vec<Scalar> uniform_vector(Rng &rng, Index n, Scalar lo, Scalar hi) {
  std::uniform_real_distribution<Scalar> u(lo, hi);
  Vec<Scalar> v(n);
  for (Index i = 0; i < n; ++i) {
    v(i) = u(rng);
  }
  return v;
}

template <typename Scalar>
Mat<Scalar> uniform_matrix(Rng &rng, Index r, Index c, Scalar lo, Scalar hi) {
  std::uniform_real_distribution<Scalar> u(lo, hi);
  Mat<Scalar> m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) {
      m(i, j) = u(rng);
    }
  }
  return m;
}

template <typename Scalar>
Vec<Scalar> normal_vector(Rng &rng, Index n, Scalar sd = Scalar(1)) {
  std::normal_distribution<Scalar> g(Scalar(0), Scalar(1));
  Vec<Scalar> v(n);
  for (Index i = 0; i < n; ++i) {
    v(i) = sd * g(rng);
  }
  return v;
}

} // namespace pricelab

#endif // PRICELAB_RNG_HPP
