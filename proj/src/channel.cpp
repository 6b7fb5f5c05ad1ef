#include "phasekey/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "phasekey/error.hpp"

namespace phasekey {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double* field(ChannelParams& p, const std::string& key) {
  if (key == "alpha_db_per_km") return &p.alpha_db_per_km;
  if (key == "distance_km") return &p.distance_km;
  if (key == "eta_det") return &p.eta_det;
  if (key == "y0") return &p.y0;
  if (key == "e_d") return &p.e_d;
  if (key == "f_ec") return &p.f_ec;
  if (key == "mu") return &p.mu;
  return nullptr;
}

// Detection and error probabilities of an n-photon pulse reaching Bob's kept
// slots with per-photon efficiency eta. Two detectors watch the kept slot.
struct Detection {
  double click;
  double error;
};

Detection detect(int n, double eta, const ChannelParams& p) {
  const double none = std::pow(1.0 - eta, n);
  const double click = std::clamp(1.0 - none + 2.0 * p.y0 * none, 0.0, 1.0);
  const double error = p.e_d * (1.0 - none) + p.y0 * none;
  return {click, error};
}

}  // namespace

void ChannelParams::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("channel parameters: " + what); };
  if (!(alpha_db_per_km >= 0.0)) fail("alpha_db_per_km must be nonnegative");
  if (!(distance_km >= 0.0)) fail("distance_km must be nonnegative");
  if (!(eta_det > 0.0 && eta_det <= 1.0)) fail("eta_det must lie in (0, 1]");
  if (!(y0 >= 0.0 && y0 <= 0.5)) fail("y0 must lie in [0, 1/2]");
  if (!(e_d >= 0.0 && e_d < 0.5)) fail("e_d must lie in [0, 1/2)");
  if (!(f_ec >= 1.0)) fail("f_ec must be at least 1");
  if (!(mu > 0.0)) fail("mu must be positive");
}

ChannelParams default_preset() { return ChannelParams{}; }

ChannelParams parse_preset(std::istream& in) {
  ChannelParams params = default_preset();
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    std::ostringstream where;
    where << "preset line " << lineno << ": ";
    if (eq == std::string::npos) throw InvalidArgument(where.str() + "expected key=value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    double* slot = field(params, key);
    if (slot == nullptr) throw InvalidArgument(where.str() + "unknown key '" + key + "'");
    if (seen[key]++ > 0) throw InvalidArgument(where.str() + "repeated key '" + key + "'");
    std::size_t used = 0;
    try {
      *slot = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size())
      throw InvalidArgument(where.str() + "value '" + value + "' is not a number");
  }
  params.validate();
  return params;
}

ChannelParams load_preset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open preset file '" + path + "'");
  return parse_preset(in);
}

void write_preset(std::ostream& out, const ChannelParams& p) {
  out << std::setprecision(17);
  out << "alpha_db_per_km=" << p.alpha_db_per_km << '\n'
      << "distance_km=" << p.distance_km << '\n'
      << "eta_det=" << p.eta_det << '\n'
      << "y0=" << p.y0 << '\n'
      << "e_d=" << p.e_d << '\n'
      << "f_ec=" << p.f_ec << '\n'
      << "mu=" << p.mu << '\n';
}

double transmittance(const ChannelParams& params) {
  return std::pow(10.0, -params.alpha_db_per_km * params.distance_km / 10.0);
}

PhotonSplit photon_number_split(double mu) {
  if (!(mu > 0.0)) throw InvalidArgument("photon_number_split: mu must be positive");
  PhotonSplit s;
  s.vacuum = std::exp(-mu);
  s.single = mu * s.vacuum;
  // 1 - e^-mu - mu e^-mu without cancellation at small mu.
  s.multi = -std::expm1(-mu) - s.single;
  return s;
}

ApparatusFactors apparatus_transmittance(const ProtocolConfig& cfg) {
  const double k = cfg.kappa;
  const double xi = cfg.xi;
  switch (cfg.variant) {
    case Variant::Unbalanced:
      // Loss 1/(2 xi) moved into the channel, then a lossless interferometer
      // that sends 2 xi (1 - xi) of the light into the middle slot.
      return {1.0 / (2.0 * xi), 2.0 * xi * (1.0 - xi)};
    case Variant::PBS:
      return {xi + (1.0 - xi) * k, 1.0};
    case Variant::FixLoss:
      // Both arms attenuated by kappa, balanced interferometer.
      return {k, 0.5};
    case Variant::FixUnevenBS:
      return {2.0 * k / (1.0 + k), 0.5};
  }
  return {};
}

ObservedStats honest_statistics(const ProtocolConfig& cfg, const ChannelParams& params) {
  params.validate();
  const double eta_arrive = transmittance(params) * params.eta_det;
  const ApparatusFactors app = apparatus_transmittance(cfg);
  const double eta = eta_arrive * app.kept();
  const PhotonSplit split = photon_number_split(params.mu);

  ObservedStats s;
  const Detection one = detect(1, eta, params);
  s.p_click_v = split.vacuum * 2.0 * params.y0;
  s.p_click_s = split.single * one.click;
  double errors = split.vacuum * params.y0 + split.single * one.error;

  double pn = split.single;
  for (int n = 2; n < 2000; ++n) {
    pn *= params.mu / n;
    if (pn < 1e-300 || (n > params.mu && pn < 1e-20 * split.multi)) break;
    const Detection d = detect(n, eta, params);
    s.p_click_m += pn * d.click;
    errors += pn * d.error;
  }

  s.p_click_total = s.p_click_v + s.p_click_s + s.p_click_m;
  s.q_tot = s.p_click_total > 0.0 ? errors / s.p_click_total : 0.5;
  s.q_single = one.click > 0.0 ? one.error / one.click : 0.5;
  s.p_lost = std::clamp(1.0 - eta_arrive * app.survival, 0.0, 1.0);
  s.no_key = s.q_tot > 0.5;
  return s;
}

}  // namespace phasekey
