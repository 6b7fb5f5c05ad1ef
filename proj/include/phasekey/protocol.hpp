#pragma once

// Protocol-defined objects for phase-encoded BB84 with a lossy phase
// modulator: configuration, signal and source states, Alice's and Bob's
// POVMs, the C4 symmetry representation and the sifting filters.
//
// Qubit basis: |0> = a_0†|vac>, |1> = a_1†|vac> (the two time modes).
// Bipartite operators use the basis {|00>, |01>, |10>, |11>} with Alice first.

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phasekey/qmath.hpp"

namespace phasekey {

enum class Variant {
  Unbalanced,   // unbalanced phase encoding, outside clicks discarded
  PBS,          // polarization-multiplexed pulses, every signal interferes
  FixLoss,      // matching loss kappa added to the short arm
  FixUnevenBS,  // first beamsplitter replaced by one with transmissivity 1 - xi
};

std::string_view to_string(Variant v);
// Accepts "unbalanced", "pbs", "fix-loss", "fix-uneven-bs".
Variant parse_variant(std::string_view name);
inline constexpr std::array<Variant, 4> kAllVariants = {Variant::Unbalanced, Variant::PBS,
                                                        Variant::FixLoss, Variant::FixUnevenBS};

enum class Announcement { Even, Odd };

struct ProtocolConfig {
  double kappa = 1.0;
  // 1 / (1 + kappa), the transmissivity of the equivalent uneven beamsplitter.
  double xi = 0.5;
  Variant variant = Variant::Unbalanced;

  // Amplitude split of the signal states. The hardware fixes restore the
  // balanced BB84 states, so they use 1/2.
  double state_xi() const;
  // True when Bob's measurement is the balanced BB84 measurement B'_y.
  bool balanced_bob() const { return variant != Variant::Unbalanced; }
};

ProtocolConfig make_config(double kappa, Variant variant = Variant::Unbalanced);

struct Ket {
  std::vector<qmath::Complex> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
  double norm() const;
  qmath::CMatrix projector() const { return qmath::CMatrix::projector(amplitudes); }
};

struct PovmElement {
  // "0".."3" for key outcomes, "out" for Bob's outside-slot element.
  std::string label;
  qmath::CMatrix op;
};

struct Povm {
  std::vector<PovmElement> elements;

  std::size_t size() const { return elements.size(); }
  const qmath::CMatrix& operator[](std::size_t i) const { return elements[i].op; }
  const qmath::CMatrix& at(std::string_view label) const;
  qmath::CMatrix sum() const;
  // Every element PSD and the sum equal to the identity, both within tol.
  bool is_complete(double tol = 1e-10) const;
};

struct SymmetryGroup {
  static constexpr int kOrder = 4;
  // U_g = diag(1, exp(i g pi/2)).
  std::array<qmath::CMatrix, kOrder> unitaries;

  const qmath::CMatrix& operator[](int g) const { return unitaries[static_cast<std::size_t>(g)]; }
  static int act_on_outcome(int g, int x) { return (x + g) % kOrder; }
  static Announcement act_on_announcement(int g, Announcement u);
  // U_g* ⊗ U_g, the action on a bipartite state.
  qmath::CMatrix bipartite(int g) const;
};

struct FilterPair {
  qmath::CMatrix alice;
  qmath::CMatrix bob;

  qmath::CMatrix joint() const { return qmath::kron(alice, bob); }
};

Ket signal_state(const ProtocolConfig& cfg, int x);

struct SourceState {
  Ket phi;              // sqrt(xi)|00> + sqrt(1 - xi)|11> on A ⊗ S
  qmath::CMatrix rho_a;  // diag(xi, 1 - xi)
};
SourceState source_state(const ProtocolConfig& cfg);

// A_x = (1/2) P[(|0> + exp(-i pi x/2)|1>)/sqrt(2)], independent of xi.
Povm alice_povm(const ProtocolConfig& cfg);

// Unbalanced: {B_0..B_3, B_out}. Every other variant: the BB84 measurement
// {B'_0..B'_3}.
Povm bob_povm(const ProtocolConfig& cfg);

// B'_y = (1/2) P[(|0> + exp(i pi y/2)|1>)/sqrt(2)]
Povm bb84_bob_povm();

SymmetryGroup symmetry_group();

// Closed forms: F_A = 1/sqrt(2); F_B = diag(sqrt(1-xi), sqrt(xi))/sqrt(2) for
// the unbalanced variant and 1/sqrt(2) otherwise. Equal for both announcements.
FilterPair filters(const ProtocolConfig& cfg);

// The filters built from their definition, F^u = sqrt(sum of the POVM
// elements announced as u).
FilterPair filters_for(const ProtocolConfig& cfg, Announcement u);

// Renormalized POVMs on the filtered subspace: M_A^u = {2 A_x}, M_B^u = {2 B'_y}
// for x, y of parity u.
std::pair<Povm, Povm> postselected_povms(const ProtocolConfig& cfg, Announcement u);

// Square root of a 2x2 positive semidefinite Hermitian matrix.
qmath::CMatrix sqrt_psd_2x2(const qmath::CMatrix& m);

}  // namespace phasekey
