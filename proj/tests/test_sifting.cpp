#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "phasekey/error.hpp"
#include "phasekey/protocol.hpp"
#include "phasekey/sifting.hpp"
#include "support.hpp"

using namespace phasekey;
using qmath::CMatrix;
using qmath::Complex;
using qmath::max_abs_diff;
using testing_support::kRandomStates;
using testing_support::kSeed;
using testing_support::random_density;

namespace {

// Purification oracle, built on Eigen only: purify rho_AB into A (x) B (x) E,
// let Alice measure a rank-one POVM, and evaluate Eve's Holevo quantity
// S(rho_E) - sum_x p(x) S(rho_E^x) from her explicit conditional states.
using EMat = Eigen::MatrixXcd;

EMat to_eigen(const CMatrix& m) {
  EMat e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
  return e;
}

double entropy_eigen(const EMat& rho) {
  Eigen::SelfAdjointEigenSolver<EMat> solver(rho);
  double s = 0.0;
  for (double l : solver.eigenvalues())
    if (l > 1e-15) s -= l * std::log2(l);
  return s;
}

double eve_holevo_oracle(const CMatrix& rho_ab, const Povm& povm_a) {
  Eigen::SelfAdjointEigenSolver<EMat> solver(to_eigen(rho_ab));
  const EMat& vecs = solver.eigenvectors();
  const Eigen::VectorXd& vals = solver.eigenvalues();
  // psi(a, b, e) = sqrt(lambda_e) v_e(2a + b)
  auto psi = [&](int a, int b, int e) { return std::sqrt(std::max(0.0, vals(e))) * vecs(2 * a + b, e); };

  EMat rho_e = EMat::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 4; ++e)
        for (int f = 0; f < 4; ++f) rho_e(e, f) += psi(a, b, e) * std::conj(psi(a, b, f));

  double chi = entropy_eigen(rho_e);
  for (std::size_t x = 0; x < povm_a.size(); ++x) {
    Eigen::SelfAdjointEigenSolver<EMat> ax(to_eigen(povm_a[x]));
    const Eigen::VectorXcd alpha = ax.eigenvectors().col(1) * std::sqrt(std::max(0.0, ax.eigenvalues()(1)));
    // Unnormalized post-measurement pure state on B (x) E.
    EMat be = EMat::Zero(2, 4);
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 4; ++e) be(b, e) = std::conj(alpha(0)) * psi(0, b, e) + std::conj(alpha(1)) * psi(1, b, e);
    const EMat cond_e = be.transpose() * be.conjugate();
    const double p = cond_e.trace().real();
    if (p < 1e-15) continue;
    chi -= p * entropy_eigen(cond_e / p);
  }
  return chi;
}

CMatrix depolarized_phi(const ProtocolConfig& cfg, double eps) {
  return source_state(cfg).phi.projector() * (1.0 - eps) + CMatrix::identity(4) * (eps / 4.0);
}

SymmetricState random_symmetric(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::gamma_distribution<double> g(1.0, 1.0);
  SymmetricState s;
  double w[4];
  double total = 0.0;
  for (double& v : w) total += (v = g(rng));
  s.a = w[0] / total;
  s.b = w[1] / total;
  s.c = w[2] / total;
  s.d = w[3] / total;
  const double r = std::sqrt(s.a * s.d) * unit(rng);
  const double phase = 2.0 * M_PI * unit(rng);
  s.f = std::polar(r, phase);
  return s;
}

}  // namespace

TEST_CASE("joint probabilities") {
  const ProtocolConfig cfg = make_config(1.0);
  const CMatrix phi = source_state(cfg).phi.projector();
  const Povm a = alice_povm(cfg);
  const Povm b = bob_povm(cfg);
  CHECK(joint_probability(phi, a[0], b[0]) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  CHECK(std::abs(joint_probability(phi, a[0], b[2])) < 1e-12);

  const ProtocolConfig half = make_config(0.5);
  const Povm bh = bob_povm(half);
  for (std::size_t x = 0; x < 4; ++x)
    CHECK(joint_probability(CMatrix::identity(4) * 0.25, alice_povm(half)[x], bh.at("out")) ==
          doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("sifting the source state") {
  const CMatrix phi = source_state(make_config(1.0)).phi.projector();
  const SiftStats unb = sift(phi, make_config(1.0, Variant::Unbalanced));
  CHECK(unb.p_tilde_even == doctest::Approx(0.125));
  CHECK(unb.p_tilde_odd == doctest::Approx(0.125));
  CHECK(unb.p_kept == doctest::Approx(0.25));
  const SiftStats pbs = sift(phi, make_config(1.0, Variant::PBS));
  CHECK(pbs.p_tilde_even == doctest::Approx(0.25));
  CHECK(pbs.p_kept == doctest::Approx(0.5));
  CHECK(pbs.p_even == doctest::Approx(0.5));
  CHECK(pbs.p_odd == doctest::Approx(0.5));
}

TEST_CASE("sifting a state the filters annihilate is degenerate") {
  // The unbalanced filter cannot annihilate a nonzero state for kappa in (0, 1],
  // so a zero matrix stands in for a vanishing postselection weight.
  CHECK_THROWS_AS(sift(CMatrix(4, 4), make_config(0.5)), DegeneratePostselection);
}

TEST_CASE("equal announcements for every input") {
  std::mt19937_64 rng(kSeed);
  for (int i = 0; i < kRandomStates; ++i) {
    const CMatrix rho = random_density(rng, 4);
    for (Variant v : kAllVariants) {
      const SiftStats s = sift(rho, make_config(0.6, v));
      CHECK(std::abs(s.p_tilde_even - s.p_tilde_odd) < 1e-12);
      CHECK(max_abs_diff(s.rho_even, s.rho_odd) < 1e-12);
      CHECK(s.p_even == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("Holevo quantity of simple states") {
  const ProtocolConfig cfg = make_config(1.0);
  const auto [ma, mb] = postselected_povms(cfg, Announcement::Even);
  const CMatrix product = qmath::kron(CMatrix::projector({0.6, Complex(0.0, 0.8)}), CMatrix::diag({1.0, 0.0}));
  CHECK(std::abs(holevo_ab(product, ma)) < 1e-9);
  CHECK(std::abs(holevo_ab(source_state(cfg).phi.projector(), ma)) < 1e-9);

  Povm full_rank;
  full_rank.elements = {{"a", CMatrix::identity(2) * 0.5}, {"b", CMatrix::identity(2) * 0.5}};
  CHECK_THROWS_AS(holevo_ab(product, full_rank), InvalidArgument);
}

TEST_CASE("Holevo quantity matches the purification oracle") {
  for (double k : {1.0, 0.5}) {
    const ProtocolConfig cfg = make_config(k);
    const CMatrix rho = depolarized_phi(cfg, 0.1);
    for (Announcement u : {Announcement::Even, Announcement::Odd}) {
      const auto [ma, mb] = postselected_povms(cfg, u);
      CHECK(std::abs(holevo_ab(rho, ma) - eve_holevo_oracle(rho, ma)) < 1e-8);
    }
  }
  std::mt19937_64 rng(kSeed + 1);
  const auto [ma, mb] = postselected_povms(make_config(1.0), Announcement::Even);
  for (int i = 0; i < kRandomStates; ++i) {
    const CMatrix rho = random_density(rng, 4);
    const double chi = holevo_ab(rho, ma);
    CHECK(std::abs(chi - eve_holevo_oracle(rho, ma)) < 1e-8);
    CHECK(chi >= -1e-9);
    CHECK(chi <= 1.0 + 1e-9);
  }
}

TEST_CASE("overall Holevo quantity") {
  for (double k : {1.0, 0.5, 0.2})
    for (Variant v : kAllVariants) {
      const ProtocolConfig cfg = make_config(k, v);
      CHECK(std::abs(overall_holevo(source_state(cfg).phi.projector(), cfg)) < 1e-9);
    }
  CHECK(overall_holevo(CMatrix::identity(4) * 0.25, make_config(1.0)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(overall_holevo(CMatrix::identity(4) * 0.25, make_config(1.0, Variant::PBS)) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("symmetrization") {
  SymmetricState s{0.3, 0.2, 0.1, 0.4, Complex(0.2, 0.05)};
  const SymmetricState back = symmetrize(s.matrix());
  CHECK(std::abs(back.a - s.a) < 1e-12);
  CHECK(std::abs(back.d - s.d) < 1e-12);
  CHECK(std::abs(back.f - s.f) < 1e-12);
  CHECK(s.is_valid());
  CHECK_FALSE(SymmetricState{0.5, 0.0, 0.0, 0.5, 0.6}.is_valid());

  const SymmetricState p = symmetrize(source_state(make_config(1.0)).phi.projector());
  CHECK(p.a == doctest::Approx(0.5));
  CHECK(p.d == doctest::Approx(0.5));
  CHECK(std::abs(p.b) < 1e-12);
  CHECK(std::abs(p.c) < 1e-12);
  CHECK(std::abs(p.f - Complex(0.5)) < 1e-12);

  std::mt19937_64 rng(kSeed + 2);
  for (int i = 0; i < kRandomStates; ++i) {
    const CMatrix rho = random_density(rng, 4);
    CMatrix avg(4, 4);
    for (int g = 0; g < 4; ++g) avg += apply_symmetry(rho, g) * 0.25;
    const SymmetricState sym = symmetrize(rho);
    // The group average has the symmetric sparsity pattern, so it equals the
    // matrix rebuilt from five numbers.
    CHECK(max_abs_diff(avg, sym.matrix()) < 1e-12);
    CHECK(sym.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sym.is_valid());
    for (int g = 0; g < 4; ++g) CHECK(max_abs_diff(apply_symmetry(sym.matrix(), g), sym.matrix()) < 1e-12);
  }
}

TEST_CASE("error rate closed form") {
  for (double k : {1.0, 0.5, 0.25}) {
    const ProtocolConfig cfg = make_config(k);
    const double xi = cfg.xi;
    const SymmetricState phi{xi, 0.0, 0.0, 1.0 - xi, std::sqrt(xi * (1.0 - xi))};
    const ErrorRate e = error_rate_Q(phi, cfg);
    CHECK(std::abs(e.q) < 1e-12);
    CHECK(e.p_tilde == doctest::Approx(xi * (1.0 - xi) / 2.0).epsilon(1e-12));
  }
  const ProtocolConfig one = make_config(1.0);
  CHECK(error_rate_Q({0.25, 0.25, 0.25, 0.25, 0.0}, one).q == doctest::Approx(0.5));
  CHECK(error_rate_Q({0.5, 0.0, 0.0, 0.5, 0.4}, one).q == doctest::Approx(0.1));
  CHECK_THROWS_AS(error_rate_Q({0.0, 0.0, 0.0, 0.0, 0.0}, one), DegeneratePostselection);
}

TEST_CASE("error rate closed form equals the outcome sum") {
  std::mt19937_64 rng(kSeed + 3);
  for (int i = 0; i < kRandomStates; ++i) {
    const SymmetricState s = random_symmetric(rng);
    for (Variant v : kAllVariants)
      for (double k : {1.0, 0.5, 0.3}) {
        const ProtocolConfig cfg = make_config(k, v);
        const ErrorRate closed = error_rate_Q(s, cfg);
        const ErrorRate summed = error_rate_from_outcomes(s.matrix(), cfg);
        CHECK(std::abs(closed.q - summed.q) < 1e-10);
        CHECK(std::abs(closed.p_tilde - summed.p_tilde) < 1e-12);
      }
  }
}

TEST_CASE("Holevo quantity is invariant under the symmetry group") {
  std::mt19937_64 rng(kSeed + 4);
  for (int i = 0; i < kRandomStates; ++i) {
    const CMatrix rho = random_density(rng, 4);
    for (Variant v : {Variant::Unbalanced, Variant::PBS}) {
      const ProtocolConfig cfg = make_config(0.5, v);
      const double base = overall_holevo(rho, cfg);
      for (int g = 1; g < 4; ++g) CHECK(std::abs(overall_holevo(apply_symmetry(rho, g), cfg) - base) < 1e-9);
    }
  }
}

TEST_CASE("symmetrization never lowers the Holevo quantity") {
  std::mt19937_64 rng(kSeed + 5);
  for (int i = 0; i < kRandomStates; ++i) {
    const CMatrix rho = random_density(rng, 4);
    for (Variant v : {Variant::Unbalanced, Variant::PBS}) {
      const ProtocolConfig cfg = make_config(0.5, v);
      CHECK(overall_holevo(symmetrize(rho).matrix(), cfg) >= overall_holevo(rho, cfg) - 1e-9);
    }
  }
}

TEST_CASE("Holevo quantity is concave along mixtures") {
  std::mt19937_64 rng(kSeed + 6);
  for (int i = 0; i < kRandomStates; ++i) {
    const CMatrix rho = random_density(rng, 4);
    const CMatrix sigma = random_density(rng, 4);
    for (Variant v : {Variant::Unbalanced, Variant::PBS}) {
      const ProtocolConfig cfg = make_config(0.5, v);
      const double cr = overall_holevo(rho, cfg);
      const double cs = overall_holevo(sigma, cfg);
      for (double lambda : {0.25, 0.5, 0.75}) {
        const CMatrix mix = rho * lambda + sigma * (1.0 - lambda);
        CHECK(overall_holevo(mix, cfg) >= lambda * cr + (1.0 - lambda) * cs - 1e-9);
      }
    }
  }
}
