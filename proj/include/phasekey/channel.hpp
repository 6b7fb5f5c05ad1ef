#pragma once

// Honest model of a weak-coherent-pulse source, a fiber channel and threshold
// detectors. Produces the observed statistics that feed the realistic key
// rate: detection probabilities split by photon number, the total error rate,
// the single-photon error rate and the single-photon loss fraction.

#include <iosfwd>
#include <string>

#include "phasekey/protocol.hpp"

namespace phasekey {

struct ChannelParams {
  double alpha_db_per_km = 0.21;
  double distance_km = 0.0;
  double eta_det = 0.045;
  double y0 = 1.7e-6;  // dark-count probability per detector and time slot
  double e_d = 0.033;  // misalignment error probability
  double f_ec = 1.22;  // error-correction inefficiency
  double mu = 0.1;     // mean photon number per signal

  // Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

// Fiber and detector values of a standard long-distance phase-encoded
// experiment; the defaults above.
ChannelParams default_preset();

// Flat `key = value` text, one field per line. Blank lines and lines starting
// with '#' are ignored; unknown or repeated keys are rejected. Missing keys
// keep their default_preset() value.
ChannelParams parse_preset(std::istream& in);
ChannelParams load_preset(const std::string& path);
void write_preset(std::ostream& out, const ChannelParams& params);

double transmittance(const ChannelParams& params);

struct PhotonSplit {
  double vacuum = 0.0;
  double single = 0.0;
  double multi = 0.0;
};

// Poisson photon-number distribution of a coherent pulse.
PhotonSplit photon_number_split(double mu);

struct ApparatusFactors {
  // Probability that a photon entering Bob's apparatus is not absorbed, in the
  // lossless-interferometer picture.
  double survival = 1.0;
  // Fraction of surviving photons that land in a kept (key) detection slot.
  double kept_given_survival = 1.0;

  double kept() const { return survival * kept_given_survival; }
};

ApparatusFactors apparatus_transmittance(const ProtocolConfig& cfg);

struct ObservedStats {
  double p_click_v = 0.0;
  double p_click_s = 0.0;
  double p_click_m = 0.0;
  double p_click_total = 0.0;
  double q_tot = 0.0;
  double q_single = 0.0;
  double p_lost = 0.0;
  // q_tot above 1/2: nothing can be distilled.
  bool no_key = false;
};

ObservedStats honest_statistics(const ProtocolConfig& cfg, const ChannelParams& params);

}  // namespace phasekey
