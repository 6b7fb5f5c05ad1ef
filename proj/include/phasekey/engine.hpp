#pragma once

// Final key rates: the single-photon qubit rate and the tagged weak-coherent
// pulse rate, mean-photon-number optimization, parameter scans and CSV output.

#include <iosfwd>
#include <optional>
#include <vector>

#include "phasekey/attack.hpp"
#include "phasekey/channel.hpp"
#include "phasekey/protocol.hpp"

namespace phasekey {

struct KeyRatePoint {
  Variant variant = Variant::Unbalanced;
  double kappa = 1.0;
  std::optional<double> distance_km;  // empty for qubit-scenario rows
  std::optional<double> mu;           // empty for qubit-scenario rows
  double qber_total = 0.0;            // Q (qubit) or Q_tot (realistic)
  double q_single = 0.0;
  double p_lost = 0.0;
  double chi_s_max = 0.0;
  double p_click_s = 0.0;
  double rate_raw = 0.0;  // may be negative
  double rate = 0.0;      // floored at 0
  // False when no attack state reproduces the observed statistics; chi_s_max
  // and rate_raw are then meaningless and the CSV leaves them empty.
  bool feasible = true;
};

struct EngineOptions {
  OptimizerOptions optimizer{};
  unsigned threads = 0;  // 0: one per hardware thread
};

// Qubit-scenario rate per postselected signal.
KeyRatePoint qubit_point(const ProtocolConfig& cfg, double q, const EngineOptions& options = {});

// Worst-case single-photon Holevo quantity for observed (q, p_lost). Error
// rates of 1/2 or more leave Eve with full information.
double single_photon_chi(const ProtocolConfig& cfg, double q_single, double p_lost,
                         const OptimizerOptions& options = {});

// R = (1/2) (-p_click f_ec h(Q_tot) + p_click_s (1 - chi_s_max)), vacuum and
// multi-photon detections tagged as fully known to Eve. Throws Infeasible
// when the single-photon statistics admit no attack state.
KeyRatePoint realistic_keyrate(const ProtocolConfig& cfg, const ChannelParams& params,
                               const EngineOptions& options = {});

struct MuRange {
  double lo = 1e-3;
  double hi = 1.0;
};

struct MuOptimum {
  double mu_star = 0.0;
  KeyRatePoint point;
};

// Coarse scan over mu followed by golden-section refinement (tolerance 1e-4).
// params.mu is ignored.
MuOptimum optimize_mu(const ProtocolConfig& cfg, const ChannelParams& params, MuRange range = {},
                      const EngineOptions& options = {});

// Scans never throw Infeasible; such points are emitted with feasible = false.
struct DistanceScan {
  std::vector<KeyRatePoint> points;
  // First scanned distance whose (feasible) optimized rate is not positive.
  std::optional<double> cutoff_km;
};

DistanceScan distance_scan(const ProtocolConfig& cfg, const ChannelParams& params,
                           const std::vector<double>& distances_km, MuRange range = {},
                           const EngineOptions& options = {});

std::vector<KeyRatePoint> qubit_scan(const std::vector<ProtocolConfig>& configs, const std::vector<double>& qs,
                                     const EngineOptions& options = {});

// Distance scans of all four variants at one kappa, concatenated in
// kAllVariants order.
std::vector<KeyRatePoint> compare_variants(double kappa, const ChannelParams& params,
                                           const std::vector<double>& distances_km, MuRange range = {},
                                           const EngineOptions& options = {});

// Inclusive arithmetic progression; the last value is included when it falls
// within half a step of stop.
std::vector<double> linspace_step(double start, double stop, double step);

inline constexpr const char* kCsvHeader =
    "variant,kappa,distance_km,mu,qber_total,q_single,p_lost,chi_s_max,rate_raw,rate";
void write_csv(std::ostream& out, const std::vector<KeyRatePoint>& points);

}  // namespace phasekey
