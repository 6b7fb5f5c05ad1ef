#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "phasekey/error.hpp"
#include "phasekey/protocol.hpp"
#include "phasekey/qmath.hpp"
#include "support.hpp"

using namespace phasekey;
using namespace phasekey::qmath;
using testing_support::kRandomStates;
using testing_support::kSeed;
using testing_support::random_density;
using testing_support::random_hermitian;

namespace {

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("eigenvalues of small fixed matrices") {
  auto e = sorted(eig_hermitian(CMatrix::identity(2)));
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[1] == doctest::Approx(1.0));

  e = sorted(eig_hermitian(CMatrix::diag({0.25, 0.75})));
  CHECK(e[0] == doctest::Approx(0.25));
  CHECK(e[1] == doctest::Approx(0.75));

  e = sorted(eig_hermitian(CMatrix{{0.0, 1.0}, {1.0, 0.0}}));
  CHECK(e[0] == doctest::Approx(-1.0));
  CHECK(e[1] == doctest::Approx(1.0));
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
  CHECK_THROWS_AS(eig_hermitian(CMatrix{{0.0, 1.0}, {0.0, 0.0}}), InvalidArgument);
  CHECK_THROWS_AS(eig_hermitian(CMatrix(2, 3)), InvalidArgument);
}

TEST_CASE("von Neumann entropy") {
  CHECK(von_neumann_entropy(CMatrix::projector({1.0 / std::sqrt(2.0), Complex(0.0, 1.0 / std::sqrt(2.0))})) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(CMatrix::diag({0.5, 0.5})) == doctest::Approx(1.0));
  CHECK(von_neumann_entropy(CMatrix::diag({0.25, 0.75})) == doctest::Approx(0.8112781245).epsilon(1e-9));
  CHECK(von_neumann_entropy(CMatrix::identity(4) * 0.25) == doctest::Approx(2.0));
}

TEST_CASE("von Neumann entropy rejects unphysical states") {
  CHECK_THROWS_AS(von_neumann_entropy(CMatrix::diag({1.1, -0.1})), InvalidArgument);
  CHECK_THROWS_AS(von_neumann_entropy(CMatrix::diag({0.5, 0.6})), InvalidArgument);
}

TEST_CASE("binary and Shannon entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.05) == doctest::Approx(0.2863969571).epsilon(1e-9));
  CHECK_THROWS_AS(binary_entropy(-0.01), InvalidArgument);
  CHECK_THROWS_AS(binary_entropy(1.01), InvalidArgument);
  CHECK(shannon_entropy({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0));
  CHECK(shannon_entropy({1.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("partial trace") {
  const CMatrix rho = CMatrix::diag({0.3, 0.7});
  const CMatrix sigma{{0.6, Complex(0.1, 0.2)}, {Complex(0.1, -0.2), 0.4}};
  CHECK(max_abs_diff(partial_trace(kron(rho, sigma), Subsystem::A), rho) < 1e-12);
  CHECK(max_abs_diff(partial_trace(kron(rho, sigma), Subsystem::B), sigma) < 1e-12);

  const ProtocolConfig cfg = make_config(0.5);
  const CMatrix phi = source_state(cfg).phi.projector();
  CHECK(max_abs_diff(partial_trace(phi, Subsystem::A), CMatrix::diag({2.0 / 3.0, 1.0 / 3.0})) < 1e-12);

  CHECK(max_abs_diff(partial_trace(CMatrix::identity(4) * 0.25, Subsystem::B), CMatrix::diag({0.5, 0.5})) <
        1e-12);
  CHECK_THROWS_AS(partial_trace(CMatrix::identity(2), Subsystem::A), InvalidArgument);
}

TEST_CASE("Kronecker product") {
  CHECK(max_abs_diff(kron(CMatrix::identity(2), CMatrix::identity(2)), CMatrix::identity(4)) == 0.0);
  CHECK(max_abs_diff(kron(CMatrix::diag({1.0, 0.0}), CMatrix::diag({0.0, 1.0})),
                     CMatrix::diag({0.0, 1.0, 0.0, 0.0})) == 0.0);
  std::mt19937_64 rng(kSeed);
  const CMatrix a = random_hermitian(rng, 2);
  const CMatrix b = random_hermitian(rng, 2);
  CHECK(std::abs(kron(a, b).trace() - a.trace() * b.trace()) < 1e-12);
}

TEST_CASE("eigenvalue properties on random Hermitian matrices") {
  std::mt19937_64 rng(kSeed + 1);
  const SymmetryGroup group = symmetry_group();
  for (int i = 0; i < kRandomStates; ++i) {
    const CMatrix h = random_hermitian(rng, 4);
    const auto e = sorted(eig_hermitian(h));
    double sum = 0.0;
    for (double v : e) sum += v;
    CHECK(sum == doctest::Approx(h.trace().real()).epsilon(1e-10));
    for (int g = 0; g < SymmetryGroup::kOrder; ++g) {
      const auto rotated = sorted(eig_hermitian(sandwich(group.bipartite(g), h)));
      for (std::size_t k = 0; k < e.size(); ++k) CHECK(std::abs(rotated[k] - e[k]) < 1e-9);
    }
  }
}

TEST_CASE("entropy properties on random density matrices") {
  std::mt19937_64 rng(kSeed + 2);
  for (int i = 0; i < kRandomStates; ++i) {
    const CMatrix rho = random_density(rng, 2);
    const CMatrix sigma = random_density(rng, 2);
    const double s_rho = von_neumann_entropy(rho);
    CHECK(von_neumann_entropy(kron(rho, sigma)) == doctest::Approx(s_rho + von_neumann_entropy(sigma)).epsilon(1e-9));
    CHECK(std::abs(von_neumann_entropy(rho.transpose()) - s_rho) < 1e-9);
    const CMatrix big = random_density(rng, 4);
    CHECK(std::abs(von_neumann_entropy(big.transpose()) - von_neumann_entropy(big)) < 1e-9);
    CHECK(max_abs_diff(partial_trace(kron(rho * 2.0, sigma), Subsystem::A), rho * 2.0) < 1e-12);
    CHECK(max_abs_diff(partial_trace(kron(rho * 2.0, sigma), Subsystem::B), sigma * 2.0) < 1e-12);
  }
}

TEST_CASE("Jacobi solver agrees with the closed form on block-diagonal input") {
  // Two decoupled 2x2 blocks: the 4x4 spectrum is the union of the block spectra.
  const CMatrix block{{0.3, Complex(0.1, -0.05)}, {Complex(0.1, 0.05), 0.2}};
  const CMatrix other = CMatrix::diag({0.35, 0.15});
  CMatrix m(4, 4);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) {
      m(r, c) = block(r, c);
      m(r + 2, c + 2) = other(r, c);
    }
  auto small = eig_hermitian(block);
  small.push_back(0.35);
  small.push_back(0.15);
  const auto big = sorted(eig_hermitian(m));
  small = sorted(small);
  for (std::size_t k = 0; k < 4; ++k) CHECK(big[k] == doctest::Approx(small[k]).epsilon(1e-12));
}
