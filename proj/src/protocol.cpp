#include "phasekey/protocol.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "phasekey/error.hpp"

namespace phasekey {

using qmath::CMatrix;
using qmath::Complex;

namespace {

Complex phase(double quarter_turns) {
  return std::polar(1.0, quarter_turns * std::numbers::pi / 2.0);
}

int parity_offset(Announcement u) { return u == Announcement::Even ? 0 : 1; }

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Unbalanced: return "unbalanced";
    case Variant::PBS: return "pbs";
    case Variant::FixLoss: return "fix-loss";
    case Variant::FixUnevenBS: return "fix-uneven-bs";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : kAllVariants)
    if (to_string(v) == name) return v;
  throw InvalidArgument("unknown protocol variant '" + std::string(name) +
                        "' (expected unbalanced, pbs, fix-loss or fix-uneven-bs)");
}

double ProtocolConfig::state_xi() const {
  switch (variant) {
    case Variant::Unbalanced:
    case Variant::PBS: return xi;
    case Variant::FixLoss:
    case Variant::FixUnevenBS: return 0.5;
  }
  return xi;
}

ProtocolConfig make_config(double kappa, Variant variant) {
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    std::ostringstream msg;
    msg << "kappa must lie in (0, 1], got " << kappa;
    throw InvalidArgument(msg.str());
  }
  return ProtocolConfig{kappa, 1.0 / (1.0 + kappa), variant};
}

double Ket::norm() const {
  double n2 = 0.0;
  for (const auto& a : amplitudes) n2 += std::norm(a);
  return std::sqrt(n2);
}

const CMatrix& Povm::at(std::string_view label) const {
  for (const auto& e : elements)
    if (e.label == label) return e.op;
  throw InvalidArgument("POVM has no element labelled '" + std::string(label) + "'");
}

CMatrix Povm::sum() const {
  if (elements.empty()) return {};
  CMatrix total(elements.front().op.rows(), elements.front().op.cols());
  for (const auto& e : elements) total += e.op;
  return total;
}

bool Povm::is_complete(double tol) const {
  if (elements.empty()) return false;
  for (const auto& e : elements) {
    const auto eig = qmath::eig_hermitian(e.op);
    if (eig.front() < -tol) return false;
  }
  const CMatrix total = sum();
  return qmath::max_abs_diff(total, CMatrix::identity(total.rows())) <= tol;
}

Announcement SymmetryGroup::act_on_announcement(int g, Announcement u) {
  const bool odd_g = (g % 2) != 0;
  if (!odd_g) return u;
  return u == Announcement::Even ? Announcement::Odd : Announcement::Even;
}

CMatrix SymmetryGroup::bipartite(int g) const {
  const CMatrix& u = (*this)[g];
  return qmath::kron(u.conj(), u);
}

Ket signal_state(const ProtocolConfig& cfg, int x) {
  if (x < 0 || x > 3) throw InvalidArgument("signal index must be in 0..3");
  const double xi = cfg.state_xi();
  return Ket{{std::sqrt(xi), std::sqrt(1.0 - xi) * phase(x)}};
}

SourceState source_state(const ProtocolConfig& cfg) {
  const double xi = cfg.state_xi();
  Ket phi{{std::sqrt(xi), 0.0, 0.0, std::sqrt(1.0 - xi)}};
  return {std::move(phi), CMatrix::diag({xi, 1.0 - xi})};
}

Povm alice_povm(const ProtocolConfig&) {
  Povm povm;
  const double amp = 1.0 / std::sqrt(2.0);
  for (int x = 0; x < 4; ++x) {
    CMatrix p = CMatrix::projector({amp, amp * phase(-x)}) * 0.5;
    povm.elements.push_back({std::to_string(x), std::move(p)});
  }
  return povm;
}

Povm bb84_bob_povm() {
  Povm povm;
  const double amp = 1.0 / std::sqrt(2.0);
  for (int y = 0; y < 4; ++y) {
    CMatrix p = CMatrix::projector({amp, amp * phase(y)}) * 0.5;
    povm.elements.push_back({std::to_string(y), std::move(p)});
  }
  return povm;
}

Povm bob_povm(const ProtocolConfig& cfg) {
  if (cfg.balanced_bob()) return bb84_bob_povm();
  const double xi = cfg.xi;
  Povm povm;
  for (int y = 0; y < 4; ++y) {
    CMatrix p = CMatrix::projector({std::sqrt(1.0 - xi), std::sqrt(xi) * phase(y)}) * 0.25;
    povm.elements.push_back({std::to_string(y), std::move(p)});
  }
  povm.elements.push_back({"out", CMatrix::diag({xi, 1.0 - xi})});
  return povm;
}

SymmetryGroup symmetry_group() {
  SymmetryGroup group;
  for (int g = 0; g < SymmetryGroup::kOrder; ++g)
    group.unitaries[static_cast<std::size_t>(g)] = CMatrix::diag(std::vector<Complex>{1.0, phase(g)});
  return group;
}

FilterPair filters(const ProtocolConfig& cfg) {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix alice = CMatrix::identity(2) * r;
  CMatrix bob = cfg.balanced_bob()
                    ? CMatrix::identity(2) * r
                    : CMatrix::diag({r * std::sqrt(1.0 - cfg.xi), r * std::sqrt(cfg.xi)});
  return {std::move(alice), std::move(bob)};
}

CMatrix sqrt_psd_2x2(const CMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw InvalidArgument("sqrt_psd_2x2: expected 2x2");
  // sqrt(M) = (M + s·1) / t with s = sqrt(det M), t = sqrt(tr M + 2s).
  const double det = std::max(0.0, (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real());
  const double s = std::sqrt(det);
  const double t = std::sqrt(std::max(0.0, m.trace().real() + 2.0 * s));
  if (t == 0.0) return CMatrix(2, 2);
  return (m + CMatrix::identity(2) * s) * (1.0 / t);
}

FilterPair filters_for(const ProtocolConfig& cfg, Announcement u) {
  const int first = parity_offset(u);
  const Povm a = alice_povm(cfg);
  const Povm b = bob_povm(cfg);
  return {sqrt_psd_2x2(a[first] + a[first + 2]), sqrt_psd_2x2(b[first] + b[first + 2])};
}

std::pair<Povm, Povm> postselected_povms(const ProtocolConfig& cfg, Announcement u) {
  const int first = parity_offset(u);
  const Povm a = alice_povm(cfg);
  const Povm b = bb84_bob_povm();
  Povm ma;
  Povm mb;
  for (int k : {first, first + 2}) {
    ma.elements.push_back({a.elements[k].label, a[k] * 2.0});
    mb.elements.push_back({b.elements[k].label, b[k] * 2.0});
  }
  return {std::move(ma), std::move(mb)};
}

}  // namespace phasekey
