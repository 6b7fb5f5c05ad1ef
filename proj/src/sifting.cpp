#include "phasekey/sifting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phasekey/error.hpp"

namespace phasekey {

using qmath::CMatrix;
using qmath::Complex;

namespace {

constexpr double kDegenerateWeight = 1e-15;

struct Filtered {
  CMatrix rho;
  double weight;
};

Filtered apply_filter(const CMatrix& rho_ab, const CMatrix& joint_filter) {
  CMatrix out = qmath::sandwich(joint_filter, rho_ab);
  const double w = out.trace().real();
  if (w < kDegenerateWeight) {
    std::ostringstream msg;
    msg << "postselection keeps weight " << w << " of the state";
    throw DegeneratePostselection(msg.str());
  }
  out *= 1.0 / w;
  return {std::move(out), w};
}

// Rank-one decomposition E = |e><e|. Returns the unnormalized vector e.
std::vector<Complex> rank_one_vector(const CMatrix& e) {
  const auto eig = qmath::eig_hermitian(e);
  const double top = eig.back();
  if (top <= 0.0) throw InvalidArgument("holevo_ab: POVM element is zero");
  for (std::size_t i = 0; i + 1 < eig.size(); ++i)
    if (std::abs(eig[i]) > 1e-10 * std::max(1.0, top))
      throw InvalidArgument("holevo_ab: Alice's POVM elements must be rank one");

  std::size_t pivot = 0;
  for (std::size_t j = 1; j < e.cols(); ++j)
    if (e(j, j).real() > e(pivot, pivot).real()) pivot = j;
  const double scale = 1.0 / std::sqrt(e(pivot, pivot).real());
  std::vector<Complex> v(e.rows());
  for (std::size_t i = 0; i < e.rows(); ++i) v[i] = e(i, pivot) * scale;
  return v;
}

}  // namespace

double joint_probability(const CMatrix& rho_ab, const CMatrix& a_x, const CMatrix& b_y) {
  return (qmath::kron(a_x, b_y) * rho_ab).trace().real();
}

SiftStats sift(const CMatrix& rho_ab, const ProtocolConfig& cfg) {
  Filtered even = apply_filter(rho_ab, filters_for(cfg, Announcement::Even).joint());
  Filtered odd = apply_filter(rho_ab, filters_for(cfg, Announcement::Odd).joint());
  SiftStats stats;
  stats.p_tilde_even = even.weight;
  stats.p_tilde_odd = odd.weight;
  stats.p_kept = even.weight + odd.weight;
  stats.p_even = even.weight / stats.p_kept;
  stats.p_odd = odd.weight / stats.p_kept;
  stats.rho_even = std::move(even.rho);
  stats.rho_odd = std::move(odd.rho);
  return stats;
}

double holevo_ab(const CMatrix& rho_ab, const Povm& povm_a) {
  if (povm_a.size() == 0) throw InvalidArgument("holevo_ab: empty POVM");
  const std::size_t dim_a = povm_a[0].rows();
  if (dim_a == 0 || rho_ab.rows() % dim_a != 0 || !rho_ab.square())
    throw InvalidArgument("holevo_ab: state dimension incompatible with Alice's POVM");
  const std::size_t dim_b = rho_ab.rows() / dim_a;

  double conditional = 0.0;
  for (const auto& element : povm_a.elements) {
    const std::vector<Complex> alpha = rank_one_vector(element.op);
    // <alpha| rho |alpha> on system A leaves an operator on B.
    CMatrix rho_b(dim_b, dim_b);
    for (std::size_t i = 0; i < dim_a; ++i)
      for (std::size_t k = 0; k < dim_a; ++k) {
        const Complex w = std::conj(alpha[i]) * alpha[k];
        if (w == Complex{}) continue;
        for (std::size_t r = 0; r < dim_b; ++r)
          for (std::size_t c = 0; c < dim_b; ++c) rho_b(r, c) += w * rho_ab(i * dim_b + r, k * dim_b + c);
      }
    const double p = rho_b.trace().real();
    if (p < 1e-15) continue;
    rho_b *= 1.0 / p;
    conditional += p * qmath::von_neumann_entropy(rho_b);
  }
  return qmath::von_neumann_entropy(rho_ab) - conditional;
}

double overall_holevo(const CMatrix& rho_ab, const ProtocolConfig& cfg) {
  return HolevoEvaluator(cfg)(rho_ab);
}

HolevoEvaluator::HolevoEvaluator(const ProtocolConfig& cfg)
    : filter_even_(filters_for(cfg, Announcement::Even).joint()),
      filter_odd_(filters_for(cfg, Announcement::Odd).joint()),
      alice_even_(postselected_povms(cfg, Announcement::Even).first),
      alice_odd_(postselected_povms(cfg, Announcement::Odd).first) {
  filters_equal_ = qmath::max_abs_diff(filter_even_, filter_odd_) == 0.0;
}

double HolevoEvaluator::operator()(const CMatrix& rho_ab) const {
  const Filtered even = apply_filter(rho_ab, filter_even_);
  const Filtered odd = filters_equal_ ? even : apply_filter(rho_ab, filter_odd_);
  const double kept = even.weight + odd.weight;
  return (even.weight * holevo_ab(even.rho, alice_even_) + odd.weight * holevo_ab(odd.rho, alice_odd_)) / kept;
}

CMatrix SymmetricState::matrix() const {
  CMatrix m(4, 4);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  m(3, 3) = d;
  m(3, 0) = f;
  m(0, 3) = std::conj(f);
  return m;
}

bool SymmetricState::is_valid(double tol) const {
  return a >= -tol && b >= -tol && c >= -tol && d >= -tol && std::abs(trace() - 1.0) <= tol &&
         std::norm(f) <= a * d + tol;
}

CMatrix apply_symmetry(const CMatrix& rho_ab, int g) {
  static const SymmetryGroup group = symmetry_group();
  return qmath::sandwich(group.bipartite(g), rho_ab);
}

SymmetricState symmetrize(const CMatrix& rho_ab) {
  if (rho_ab.rows() != 4 || rho_ab.cols() != 4)
    throw InvalidArgument("symmetrize: expected a 4x4 two-qubit state");
  CMatrix avg(4, 4);
  for (int g = 0; g < SymmetryGroup::kOrder; ++g) avg += apply_symmetry(rho_ab, g);
  avg *= 1.0 / SymmetryGroup::kOrder;
  return {avg(0, 0).real(), avg(1, 1).real(), avg(2, 2).real(), avg(3, 3).real(), avg(3, 0)};
}

std::pair<double, double> bob_filter_weights(const ProtocolConfig& cfg) {
  if (cfg.balanced_bob()) return {0.5, 0.5};
  return {0.5 * (1.0 - cfg.xi), 0.5 * cfg.xi};
}

ErrorRate error_rate_Q(const SymmetricState& s, const ProtocolConfig& cfg) {
  const auto [s0, s1] = bob_filter_weights(cfg);
  const double p_tilde = 0.5 * (s0 * (s.a + s.c) + s1 * (s.b + s.d));
  if (p_tilde < kDegenerateWeight) throw DegeneratePostselection("error_rate_Q: p~ vanishes");
  const double errors = p_tilde - s.f.real() * std::sqrt(s0 * s1);
  return {errors / (2.0 * p_tilde), p_tilde};
}

ErrorRate error_rate_from_outcomes(const CMatrix& rho_ab, const ProtocolConfig& cfg) {
  const Povm a = alice_povm(cfg);
  const Povm b = bob_povm(cfg);
  const double errors = joint_probability(rho_ab, a[0], b[2]) + joint_probability(rho_ab, a[2], b[0]) +
                        joint_probability(rho_ab, a[1], b[3]) + joint_probability(rho_ab, a[3], b[1]);
  const double p_tilde =
      qmath::sandwich(filters_for(cfg, Announcement::Even).joint(), rho_ab).trace().real();
  if (p_tilde < kDegenerateWeight) throw DegeneratePostselection("error_rate_from_outcomes: p~ vanishes");
  return {errors / (2.0 * p_tilde), p_tilde};
}

}  // namespace phasekey
