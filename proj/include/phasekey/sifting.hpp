#pragma once

// Measurement statistics, the sifting (postselection) map, Holevo quantities
// and the C4 symmetrization of attack states.

#include <complex>

#include "phasekey/protocol.hpp"
#include "phasekey/qmath.hpp"

namespace phasekey {

// p(x, y) = tr{(A_x ⊗ B_y) rho_AB}
double joint_probability(const qmath::CMatrix& rho_ab, const qmath::CMatrix& a_x,
                         const qmath::CMatrix& b_y);

struct SiftStats {
  double p_tilde_even = 0.0;
  double p_tilde_odd = 0.0;
  double p_kept = 0.0;
  double p_even = 0.5;
  double p_odd = 0.5;
  qmath::CMatrix rho_even;  // F^even[rho], normalized
  qmath::CMatrix rho_odd;   // F^odd[rho], normalized
};

// Applies the filters F_A^u ⊗ F_B^u for each announcement. Throws
// DegeneratePostselection when a kept weight falls below 1e-15.
SiftStats sift(const qmath::CMatrix& rho_ab, const ProtocolConfig& cfg);

// chi = S(rho_AB) - Σ_x p(x) S(rho_B^x) for a POVM on Alice's side whose
// elements are rank one. rho_ab must be a normalized state on A ⊗ B with
// dim A equal to the POVM element dimension.
double holevo_ab(const qmath::CMatrix& rho_ab, const Povm& povm_a);

// Announcement-averaged Holevo quantity of the postselected ensemble.
double overall_holevo(const qmath::CMatrix& rho_ab, const ProtocolConfig& cfg);

// overall_holevo with the filters and postselected POVMs built once, for
// repeated evaluation under a fixed configuration.
class HolevoEvaluator {
 public:
  explicit HolevoEvaluator(const ProtocolConfig& cfg);
  double operator()(const qmath::CMatrix& rho_ab) const;

 private:
  qmath::CMatrix filter_even_;
  qmath::CMatrix filter_odd_;
  bool filters_equal_ = false;
  Povm alice_even_;
  Povm alice_odd_;
};

// Attack state in the C4-symmetric form
//
//   [ a  .  .  f* ]
//   [ .  b  .  .  ]
//   [ .  .  c  .  ]
//   [ f  .  .  d  ]
struct SymmetricState {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  std::complex<double> f{0.0, 0.0};

  qmath::CMatrix matrix() const;
  double trace() const { return a + b + c + d; }
  // Nonnegative diagonal, unit trace and |f|^2 <= a d, all within tol.
  bool is_valid(double tol = 1e-10) const;
};

SymmetricState symmetrize(const qmath::CMatrix& rho_ab);

// rho -> (U_g* ⊗ U_g) rho (U_g^T ⊗ U_g†)
qmath::CMatrix apply_symmetry(const qmath::CMatrix& rho_ab, int g);

struct ErrorRate {
  double q = 0.0;
  double p_tilde = 0.0;
};

// Average error rate of a symmetric state in closed form. With (s0, s1) the
// diagonal of Bob's squared filter, p~ = (s0 (a + c) + s1 (b + d)) / 2 and the
// error weight is p~ - Re[f] sqrt(s0 s1); Q is their ratio over 2 p~.
ErrorRate error_rate_Q(const SymmetricState& s, const ProtocolConfig& cfg);

// The same quantity from its definition,
// Q = (p(0,2) + p(2,0) + p(1,3) + p(3,1)) / (2 p~), valid for any state.
ErrorRate error_rate_from_outcomes(const qmath::CMatrix& rho_ab, const ProtocolConfig& cfg);

// Diagonal (s0, s1) of Bob's squared sifting filter.
std::pair<double, double> bob_filter_weights(const ProtocolConfig& cfg);

}  // namespace phasekey
