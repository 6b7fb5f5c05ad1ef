#include "phasekey/attack.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "phasekey/error.hpp"

namespace phasekey {

namespace {

void require_rate(double q, double upper, const char* who) {
  if (!(q >= 0.0 && q < upper)) {
    std::ostringstream msg;
    msg << who << ": error rate " << q << " outside [0, " << upper << ")";
    throw InvalidArgument(msg.str());
  }
}

// Maps box coordinates z in [0,1]^k to a symmetric state.
class Parametrization {
 public:
  Parametrization(const ProtocolConfig& cfg, const ConstraintSet& constraints)
      : cfg_(cfg), q_(constraints.q), s_lo_(constraints.s_lo()), s_hi_(constraints.s_hi()) {
    if (s_lo_ > s_hi_ + 1e-15) throw Infeasible("no marginal satisfies the reduced-state constraint");
    free_marginal_ = s_hi_ - s_lo_ > 1e-12;
  }

  int dims() const { return free_marginal_ ? 4 : 3; }

  struct Point {
    SymmetricState state;  // positive semidefinite by construction
    double violation = 0.0;
  };

  // z is assumed to lie in the box.
  Point evaluate(const double* z) const {
    int k = 0;
    const double s = free_marginal_ ? s_lo_ + z[k++] * (s_hi_ - s_lo_) : 0.5 * (s_lo_ + s_hi_);
    const double u = z[k++];
    const double v = z[k++];
    const double t = 2.0 * z[k] - 1.0;

    Point p;
    SymmetricState& st = p.state;
    st.a = s * u;
    st.b = s * (1.0 - u);
    st.c = (1.0 - s) * v;
    st.d = (1.0 - s) * (1.0 - v);
    const RealPartOfF re = re_f_from_Q(st.a, st.b, st.c, st.d, q_, cfg_);
    const double ad = st.a * st.d;
    if (re.feasible) {
      st.f = {re.value, t * std::sqrt(std::max(0.0, ad - re.value * re.value))};
    } else {
      // Largest admissible coherence in the direction of Re f.
      p.violation = re.value * re.value - ad;
      st.f = {std::copysign(std::sqrt(ad), re.value), 0.0};
    }
    return p;
  }

  // Box coordinates of a state with Im f = 0.
  std::vector<double> coordinates_of(const SymmetricState& st) const {
    std::vector<double> z;
    const double s = st.a + st.b;
    if (free_marginal_) z.push_back(std::clamp((s - s_lo_) / (s_hi_ - s_lo_), 0.0, 1.0));
    z.push_back(s > 0.0 ? std::clamp(st.a / s, 0.0, 1.0) : 0.5);
    z.push_back(s < 1.0 ? std::clamp(st.c / (1.0 - s), 0.0, 1.0) : 0.5);
    z.push_back(0.5);
    return z;
  }

 private:
  ProtocolConfig cfg_;
  double q_;
  double s_lo_;
  double s_hi_;
  bool free_marginal_ = false;
};

struct Objective {
  const HolevoEvaluator* chi_bar;
  const Parametrization* param;
  double penalty;
  long evaluations = 0;

  // Value to be minimized: -chi + penalty * (box distance + constraint violation).
  double operator()(const double* raw) {
    ++evaluations;
    double z[4];
    double outside = 0.0;
    for (int i = 0; i < param->dims(); ++i) {
      z[i] = std::clamp(raw[i], 0.0, 1.0);
      outside += std::abs(raw[i] - z[i]);
    }
    const auto point = param->evaluate(z);
    return -(*chi_bar)(point.state.matrix()) + penalty * (outside + point.violation);
  }
};

double gsl_trampoline(const gsl_vector* x, void* params) {
  return (*static_cast<Objective*>(params))(x->data);
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

struct LocalResult {
  std::vector<double> z;
  double value;
  int iterations;
  bool converged;
};

LocalResult nelder_mead(Objective& objective, std::vector<double> start, const OptimizerOptions& opt) {
  const auto n = start.size();
  gsl_multimin_function fn{&gsl_trampoline, n, &objective};
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, start[i]);
    gsl_vector_set(step.get(), i, 0.1);
  }
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());

  int iter = 0;
  bool converged = false;
  while (iter < opt.max_iterations_per_start) {
    ++iter;
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), opt.tolerance) == GSL_SUCCESS) {
      converged = true;
      break;
    }
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(solver.get());
  std::vector<double> z(best->data, best->data + n);
  return {std::move(z), gsl_multimin_fminimizer_minimum(solver.get()), iter, converged};
}

// Compass search from the best simplex vertex; cleans up stalls on kinks.
void coordinate_refine(Objective& objective, LocalResult& r, double tolerance) {
  for (double h = 0.05; h > tolerance * 0.1; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < r.z.size(); ++i) {
        for (double dir : {1.0, -1.0}) {
          std::vector<double> trial = r.z;
          trial[i] = std::clamp(trial[i] + dir * h, 0.0, 1.0);
          const double value = objective(trial.data());
          if (value < r.value - 1e-15) {
            r.z = std::move(trial);
            r.value = value;
            improved = true;
          }
        }
      }
    }
  }
}

}  // namespace

ConstraintSet ConstraintSet::qubit(const ProtocolConfig& cfg, double q) {
  return {ConstraintMode::Qubit, cfg.state_xi(), q, 0.0};
}

ConstraintSet ConstraintSet::realistic(const ProtocolConfig& cfg, double q, double p_lost) {
  if (!(p_lost >= 0.0 && p_lost < 1.0)) throw InvalidArgument("p_lost must lie in [0, 1)");
  return {ConstraintMode::Realistic, cfg.state_xi(), q, p_lost};
}

double ConstraintSet::s_lo() const {
  if (mode == ConstraintMode::Qubit) return xi;
  return std::max(0.0, 1.0 - (1.0 - xi) / (1.0 - p_lost));
}

double ConstraintSet::s_hi() const {
  if (mode == ConstraintMode::Qubit) return xi;
  return std::min(1.0, xi / (1.0 - p_lost));
}

double ConstraintSet::marginal_violation(const SymmetricState& s) const {
  const double top = s.a + s.b;
  const double bottom = s.c + s.d;
  if (mode == ConstraintMode::Qubit) return std::max(std::abs(top - xi), std::abs(bottom - (1.0 - xi)));
  const double kept = 1.0 - p_lost;
  return std::max({0.0, kept * top - xi, kept * bottom - (1.0 - xi)});
}

RealPartOfF re_f_from_Q(double a, double b, double c, double d, double q, const ProtocolConfig& cfg) {
  const auto [s0, s1] = bob_filter_weights(cfg);
  const double p_tilde = 0.5 * (s0 * (a + c) + s1 * (b + d));
  if (p_tilde <= 0.0) throw DegeneratePostselection("re_f_from_Q: p~ vanishes");
  const double value = p_tilde * (1.0 - 2.0 * q) / std::sqrt(s0 * s1);
  return {value, value * value <= a * d + 1e-15};
}

SymmetricState depolarized_source(const ProtocolConfig& cfg, double q) {
  if (!(q >= 0.0 && q <= 0.5)) throw InvalidArgument("depolarized_source: q outside [0, 1/2]");
  const double xi = cfg.state_xi();
  auto state = [xi](double e) {
    SymmetricState s;
    s.a = (1.0 - e) * xi + 0.5 * e * xi;
    s.b = 0.5 * e * xi;
    s.c = 0.5 * e * (1.0 - xi);
    s.d = (1.0 - e) * (1.0 - xi) + 0.5 * e * (1.0 - xi);
    s.f = (1.0 - e) * std::sqrt(xi * (1.0 - xi));
    return s;
  };
  // Q rises monotonically from 0 (e = 0) to 1/2 (e = 1).
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (error_rate_Q(state(mid), cfg).q < q)
      lo = mid;
    else
      hi = mid;
  }
  return state(0.5 * (lo + hi));
}

OptimResult maximize_holevo(const ProtocolConfig& cfg, const ConstraintSet& constraints,
                            const OptimizerOptions& options) {
  require_rate(constraints.q, 0.5, "maximize_holevo");
  const Parametrization param(cfg, constraints);
  const HolevoEvaluator chi_bar(cfg);
  Objective objective{&chi_bar, &param, options.penalty};
  const int n = param.dims();

  std::vector<std::vector<double>> starts;
  starts.push_back(param.coordinates_of(depolarized_source(cfg, constraints.q)));
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(starts.size()) < std::max(1, options.starts)) {
    std::vector<double> z(static_cast<std::size_t>(n));
    for (auto& zi : z) zi = unit(rng);
    starts.push_back(std::move(z));
  }

  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  std::optional<LocalResult> best;
  int total_iterations = 0;
  for (auto& start : starts) {
    LocalResult local = nelder_mead(objective, start, options);
    total_iterations += local.iterations;
    if (!best || local.value < best->value) best = std::move(local);
  }
  coordinate_refine(objective, *best, options.tolerance);
  gsl_set_error_handler(previous);

  double z[4];
  for (int i = 0; i < n; ++i) z[i] = std::clamp(best->z[static_cast<std::size_t>(i)], 0.0, 1.0);
  const auto point = param.evaluate(z);
  if (point.violation > 1e-8) {
    std::ostringstream msg;
    msg << "no attack state reproduces error rate " << constraints.q << " (violation " << point.violation
        << ")";
    throw Infeasible(msg.str());
  }

  OptimResult result;
  result.argmax = point.state;
  result.chi_max = std::clamp(chi_bar(point.state.matrix()), 0.0, 1.0);
  result.iterations = total_iterations;
  result.converged = best->converged;
  return result;
}

OptimResult maximize_holevo_qubit(const ProtocolConfig& cfg, double q, const OptimizerOptions& options) {
  return maximize_holevo(cfg, ConstraintSet::qubit(cfg, q), options);
}

OptimResult maximize_holevo_realistic(const ProtocolConfig& cfg, double q, double p_lost,
                                      const OptimizerOptions& options) {
  return maximize_holevo(cfg, ConstraintSet::realistic(cfg, q, p_lost), options);
}

QubitRate qubit_keyrate(const ProtocolConfig& cfg, double q, const OptimizerOptions& options) {
  const OptimResult opt = maximize_holevo_qubit(cfg, q, options);
  QubitRate r;
  r.chi_max = opt.chi_max;
  r.rate_raw = 1.0 - qmath::binary_entropy(q) - opt.chi_max;
  r.rate = std::max(0.0, r.rate_raw);
  return r;
}

GridResult grid_oracle(const ProtocolConfig& cfg, const ConstraintSet& constraints, int resolution) {
  if (resolution < 2) throw InvalidArgument("grid_oracle: resolution must be at least 2");
  if (!(constraints.q >= 0.0 && constraints.q <= 0.5))
    throw InvalidArgument("grid_oracle: error rate outside [0, 1/2]");
  const Parametrization param(cfg, constraints);
  const HolevoEvaluator chi_bar(cfg);
  const int n = param.dims();
  const auto steps = static_cast<std::size_t>(resolution);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= steps;

  // The feasible set is often a thin sliver of the unit box. Each round
  // evaluates a full grid on the current box, then shrinks the box to the
  // feasible points found plus one cell of margin.
  constexpr int kMaxRounds = 8;
  std::array<double, 4> lo{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> hi{1.0, 1.0, 1.0, 1.0};
  GridResult result;
  result.chi = -1.0;
  double z[4];
  for (int round = 0; round < kMaxRounds; ++round) {
    std::array<double, 4> seen_lo{1.0, 1.0, 1.0, 1.0};
    std::array<double, 4> seen_hi{0.0, 0.0, 0.0, 0.0};
    std::size_t feasible = 0;
    for (std::size_t index = 0; index < total; ++index) {
      std::size_t rest = index;
      for (int i = 0; i < n; ++i) {
        const double frac = static_cast<double>(rest % steps) / static_cast<double>(steps - 1);
        z[i] = lo[i] + frac * (hi[i] - lo[i]);
        rest /= steps;
      }
      const auto point = param.evaluate(z);
      if (point.violation > 1e-12) continue;
      ++feasible;
      for (int i = 0; i < n; ++i) {
        seen_lo[i] = std::min(seen_lo[i], z[i]);
        seen_hi[i] = std::max(seen_hi[i], z[i]);
      }
      const double chi = chi_bar(point.state.matrix());
      if (chi > result.chi) {
        result.chi = chi;
        result.argmax = point.state;
      }
    }
    result.feasible_points += feasible;
    if (feasible == 0) break;

    double shrink = 1.0;
    for (int i = 0; i < n; ++i) {
      const double cell = (hi[i] - lo[i]) / static_cast<double>(steps - 1);
      const double new_lo = std::max(0.0, seen_lo[i] - cell);
      const double new_hi = std::min(1.0, seen_hi[i] + cell);
      if (hi[i] > lo[i]) shrink *= (new_hi - new_lo) / (hi[i] - lo[i]);
      lo[i] = new_lo;
      hi[i] = new_hi;
    }
    if (shrink > 0.9) break;
  }
  if (result.feasible_points == 0) throw Infeasible("grid_oracle: no feasible grid point");
  return result;
}

}  // namespace phasekey
