#include "phasekey/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "phasekey/error.hpp"

namespace phasekey {

namespace {

// Runs body(i) for i in [0, n) on a small worker pool. Results are written by
// index, so output order never depends on scheduling.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double tagged_rate(const ObservedStats& stats, double chi, double f_ec) {
  const double correction = stats.p_click_total * f_ec * qmath::binary_entropy(std::min(stats.q_tot, 0.5));
  return 0.5 * (-correction + stats.p_click_s * (1.0 - chi));
}

KeyRatePoint realistic_point(const ProtocolConfig& cfg, const ChannelParams& params, double chi) {
  const ObservedStats stats = honest_statistics(cfg, params);
  KeyRatePoint p;
  p.variant = cfg.variant;
  p.kappa = cfg.kappa;
  p.distance_km = params.distance_km;
  p.mu = params.mu;
  p.qber_total = stats.q_tot;
  p.q_single = stats.q_single;
  p.p_lost = stats.p_lost;
  p.chi_s_max = chi;
  p.p_click_s = stats.p_click_s;
  p.rate_raw = tagged_rate(stats, chi, params.f_ec);
  p.rate = std::max(0.0, p.rate_raw);
  return p;
}

KeyRatePoint infeasible_point(const ProtocolConfig& cfg, std::optional<double> distance_km) {
  KeyRatePoint p;
  p.variant = cfg.variant;
  p.kappa = cfg.kappa;
  p.distance_km = distance_km;
  p.feasible = false;
  return p;
}

std::string describe(const ProtocolConfig& cfg, const ChannelParams& params) {
  std::ostringstream msg;
  msg << to_string(cfg.variant) << " kappa=" << cfg.kappa << " L=" << params.distance_km << " km: ";
  return msg.str();
}

void put_number(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out << buf;
}

}  // namespace

KeyRatePoint qubit_point(const ProtocolConfig& cfg, double q, const EngineOptions& options) {
  const QubitRate r = qubit_keyrate(cfg, q, options.optimizer);
  KeyRatePoint p;
  p.variant = cfg.variant;
  p.kappa = cfg.kappa;
  p.qber_total = q;
  p.q_single = q;
  p.p_lost = 0.0;
  p.chi_s_max = r.chi_max;
  p.rate_raw = r.rate_raw;
  p.rate = r.rate;
  return p;
}

double single_photon_chi(const ProtocolConfig& cfg, double q_single, double p_lost,
                         const OptimizerOptions& options) {
  if (q_single >= 0.5) return 1.0;
  return maximize_holevo_realistic(cfg, q_single, p_lost, options).chi_max;
}

KeyRatePoint realistic_keyrate(const ProtocolConfig& cfg, const ChannelParams& params,
                               const EngineOptions& options) {
  const ObservedStats stats = honest_statistics(cfg, params);
  try {
    const double chi = single_photon_chi(cfg, stats.q_single, stats.p_lost, options.optimizer);
    return realistic_point(cfg, params, chi);
  } catch (const Infeasible& e) {
    throw Infeasible(describe(cfg, params) + e.what());
  }
}

MuOptimum optimize_mu(const ProtocolConfig& cfg, const ChannelParams& params, MuRange range,
                      const EngineOptions& options) {
  if (!(range.lo > 0.0 && range.hi <= 2.0 && range.lo < range.hi))
    throw InvalidArgument("optimize_mu: mu range must satisfy 0 < lo < hi <= 2");
  ChannelParams at = params;
  at.mu = range.lo;
  // q_single and p_lost do not depend on mu, so one optimization serves the
  // whole search.
  const ObservedStats base = honest_statistics(cfg, at);
  double chi = 0.0;
  try {
    chi = single_photon_chi(cfg, base.q_single, base.p_lost, options.optimizer);
  } catch (const Infeasible& e) {
    throw Infeasible(describe(cfg, params) + e.what());
  }

  auto rate_at = [&](double mu) {
    at.mu = mu;
    return realistic_point(cfg, at, chi);
  };

  constexpr int kCoarse = 41;
  std::vector<double> grid(kCoarse);
  std::vector<double> raw(kCoarse);
  for (int i = 0; i < kCoarse; ++i) {
    grid[i] = range.lo + (range.hi - range.lo) * i / (kCoarse - 1);
    raw[i] = rate_at(grid[i]).rate_raw;
  }
  const int best = static_cast<int>(std::max_element(raw.begin(), raw.end()) - raw.begin());
  double a = grid[std::max(0, best - 1)];
  double b = grid[std::min(kCoarse - 1, best + 1)];

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = rate_at(x1).rate_raw;
  double f2 = rate_at(x2).rate_raw;
  while (b - a > 1e-4) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = rate_at(x2).rate_raw;
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = rate_at(x1).rate_raw;
    }
  }
  double mu_star = 0.5 * (a + b);
  KeyRatePoint point = rate_at(mu_star);
  if (point.rate_raw < raw[best]) {
    mu_star = grid[best];
    point = rate_at(mu_star);
  }
  return {mu_star, point};
}

DistanceScan distance_scan(const ProtocolConfig& cfg, const ChannelParams& params,
                           const std::vector<double>& distances_km, MuRange range, const EngineOptions& options) {
  DistanceScan scan;
  scan.points.resize(distances_km.size());
  parallel_for(distances_km.size(), options.threads, [&](std::size_t i) {
    ChannelParams at = params;
    at.distance_km = distances_km[i];
    try {
      scan.points[i] = optimize_mu(cfg, at, range, options).point;
    } catch (const Infeasible&) {
      scan.points[i] = infeasible_point(cfg, at.distance_km);
    }
  });
  for (const auto& p : scan.points)
    if (p.feasible && p.rate_raw <= 0.0) {
      scan.cutoff_km = p.distance_km;
      break;
    }
  return scan;
}

std::vector<KeyRatePoint> qubit_scan(const std::vector<ProtocolConfig>& configs, const std::vector<double>& qs,
                                     const EngineOptions& options) {
  std::vector<KeyRatePoint> points(configs.size() * qs.size());
  parallel_for(points.size(), options.threads, [&](std::size_t i) {
    const ProtocolConfig& cfg = configs[i / qs.size()];
    const double q = qs[i % qs.size()];
    try {
      points[i] = qubit_point(cfg, q, options);
    } catch (const Infeasible&) {
      points[i] = infeasible_point(cfg, std::nullopt);
      points[i].qber_total = q;
      points[i].q_single = q;
    }
  });
  return points;
}

std::vector<KeyRatePoint> compare_variants(double kappa, const ChannelParams& params,
                                           const std::vector<double>& distances_km, MuRange range,
                                           const EngineOptions& options) {
  const std::size_t per = distances_km.size();
  std::vector<KeyRatePoint> points(kAllVariants.size() * per);
  parallel_for(points.size(), options.threads, [&](std::size_t i) {
    const ProtocolConfig cfg = make_config(kappa, kAllVariants[i / per]);
    ChannelParams at = params;
    at.distance_km = distances_km[i % per];
    try {
      points[i] = optimize_mu(cfg, at, range, options).point;
    } catch (const Infeasible&) {
      points[i] = infeasible_point(cfg, at.distance_km);
    }
  });
  return points;
}

std::vector<double> linspace_step(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) throw InvalidArgument("range needs step > 0 and stop >= start");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 0.5));
  for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

void write_csv(std::ostream& out, const std::vector<KeyRatePoint>& points) {
  out << kCsvHeader << '\n';
  for (const auto& p : points) {
    out << to_string(p.variant) << ',';
    put_number(out, p.kappa);
    out << ',';
    if (p.distance_km) put_number(out, *p.distance_km);
    out << ',';
    if (p.mu) put_number(out, *p.mu);
    for (double v : {p.qber_total, p.q_single, p.p_lost}) {
      out << ',';
      put_number(out, v);
    }
    for (double v : {p.chi_s_max, p.rate_raw}) {
      out << ',';
      if (p.feasible) put_number(out, v);
    }
    out << ',';
    put_number(out, p.rate);
    out << '\n';
  }
}

}  // namespace phasekey
