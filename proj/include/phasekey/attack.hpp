#pragma once

// Maximization of the postselected Holevo quantity over C4-symmetric attack
// states compatible with the observed error rate and Alice's reduced state.
//
// Feasible states are parametrized on a box so that every constraint except
// positivity of the {|00>, |11>} block holds by construction:
//
//   s = a + b   in [s_lo, s_hi]   (Alice's marginal, exact or relaxed)
//   a = s u,  b = s (1 - u),  c = (1 - s) v,  d = (1 - s)(1 - v)
//   Re f        fixed by the error rate
//   Im f = t sqrt(max(0, a d - Re f^2)),  t in [-1, 1]
//
// A point is infeasible exactly when Re f^2 > a d.

#include <optional>
#include <vector>

#include "phasekey/protocol.hpp"
#include "phasekey/sifting.hpp"

namespace phasekey {

enum class ConstraintMode { Qubit, Realistic };

struct ConstraintSet {
  ConstraintMode mode = ConstraintMode::Qubit;
  double xi = 0.5;      // Alice's marginal weight on |0>
  double q = 0.0;       // target average error rate
  double p_lost = 0.0;  // single-photon loss fraction, Realistic only

  static ConstraintSet qubit(const ProtocolConfig& cfg, double q);
  static ConstraintSet realistic(const ProtocolConfig& cfg, double q, double p_lost);

  // Admissible range of a + b. Qubit: {xi}. Realistic: the values for which
  // the lost-photon remainder of rho_A stays positive.
  double s_lo() const;
  double s_hi() const;
  // Violation of the marginal constraints by a concrete state (0 if satisfied).
  double marginal_violation(const SymmetricState& s) const;
};

struct RealPartOfF {
  double value = 0.0;
  // |Re f| <= sqrt(a d); false means the error rate cannot be reached.
  bool feasible = false;
};

// Inverts the closed-form error rate for Re[f].
RealPartOfF re_f_from_Q(double a, double b, double c, double d, double q, const ProtocolConfig& cfg);

struct OptimResult {
  double chi_max = 0.0;
  SymmetricState argmax;
  int iterations = 0;
  bool converged = false;
  std::optional<double> oracle_gap;
};

struct OptimizerOptions {
  int starts = 20;
  unsigned long long seed = 0x5eed'b884ULL;
  double penalty = 1e3;
  double tolerance = 1e-9;
  int max_iterations_per_start = 4000;
};

OptimResult maximize_holevo(const ProtocolConfig& cfg, const ConstraintSet& constraints,
                            const OptimizerOptions& options = {});

OptimResult maximize_holevo_qubit(const ProtocolConfig& cfg, double q, const OptimizerOptions& options = {});

OptimResult maximize_holevo_realistic(const ProtocolConfig& cfg, double q, double p_lost,
                                      const OptimizerOptions& options = {});

struct QubitRate {
  double chi_max = 0.0;
  double rate_raw = 0.0;  // 1 - h(Q) - chi_max, may be negative
  double rate = 0.0;      // floored at 0
};

// Key rate per postselected signal in the single-photon scenario.
QubitRate qubit_keyrate(const ProtocolConfig& cfg, double q, const OptimizerOptions& options = {});

struct GridResult {
  double chi = 0.0;
  SymmetricState argmax;
  std::size_t feasible_points = 0;
};

// Exhaustive evaluation on a regular grid with `resolution` points per free
// parameter, keeping only feasible points. Throws Infeasible if none is.
GridResult grid_oracle(const ProtocolConfig& cfg, const ConstraintSet& constraints, int resolution);

// The state (1 - e)|Phi><Phi| + e rho_A ⊗ 1/2 whose error rate equals q.
// Always feasible for q in [0, 1/2].
SymmetricState depolarized_source(const ProtocolConfig& cfg, double q);

}  // namespace phasekey
