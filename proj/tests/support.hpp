#pragma once

#include <random>

#include "phasekey/qmath.hpp"

namespace testing_support {

using phasekey::qmath::CMatrix;
using phasekey::qmath::Complex;

inline constexpr unsigned long long kSeed = 20240611ULL;
inline constexpr int kRandomStates = 100;

// Ginibre-distributed density matrix: G G^dagger / tr(G G^dagger).
inline CMatrix random_density(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) g(r, c) = Complex(n(rng), n(rng));
  CMatrix rho = g * g.adjoint();
  return rho * (1.0 / rho.trace().real());
}

inline CMatrix random_hermitian(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix h(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    h(r, r) = n(rng);
    for (std::size_t c = r + 1; c < dim; ++c) {
      h(r, c) = Complex(n(rng), n(rng));
      h(c, r) = std::conj(h(r, c));
    }
  }
  return h;
}

}  // namespace testing_support
