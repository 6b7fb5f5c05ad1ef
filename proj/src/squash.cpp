#include "phasekey/squash.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <utility>

#include "phasekey/error.hpp"

namespace phasekey::squash {

namespace {

void put(Distribution& d, Outcome o, int eighths) { d.eighths[static_cast<std::size_t>(o)] += eighths; }

Outcome middle_outcome(bool c_clicked, Announcement basis) {
  if (basis == Announcement::Even) return c_clicked ? Outcome::Eff0 : Outcome::Eff2;
  return c_clicked ? Outcome::Eff1 : Outcome::Eff3;
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::NoClick: return "no-click";
    case Category::SingleMiddle: return "single-middle";
    case Category::SingleOutside: return "single-outside";
    case Category::DoubleMiddle: return "double-middle";
    case Category::MultiOutsideOnly: return "multi-outside-only";
    case Category::Cross: return "cross";
  }
  return "unknown";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Eff0: return "B_eff_0";
    case Outcome::Eff1: return "B_eff_1";
    case Outcome::Eff2: return "B_eff_2";
    case Outcome::Eff3: return "B_eff_3";
    case Outcome::EffOut: return "B_eff_out";
    case Outcome::NoClick: return "no_click";
  }
  return "unknown";
}

Category classify(const ClickPattern& p) {
  const int middle = p.middle_clicks();
  const int outside = p.outside_clicks();
  if (middle == 0 && outside == 0) return Category::NoClick;
  if (middle > 0 && outside > 0) return Category::Cross;
  if (middle == 2) return Category::DoubleMiddle;
  if (middle == 1) return Category::SingleMiddle;
  return outside == 1 ? Category::SingleOutside : Category::MultiOutsideOnly;
}

int Distribution::total_eighths() const { return std::accumulate(eighths.begin(), eighths.end(), 0); }

Distribution squash_distribution(const ClickPattern& p) {
  Distribution d;
  switch (classify(p)) {
    case Category::NoClick:
      put(d, Outcome::NoClick, 8);
      break;
    case Category::SingleMiddle:
      put(d, middle_outcome(p.c2, p.basis), 8);
      break;
    case Category::SingleOutside:
    case Category::MultiOutsideOnly:
      put(d, Outcome::EffOut, 8);
      break;
    case Category::DoubleMiddle:
      put(d, middle_outcome(true, p.basis), 4);
      put(d, middle_outcome(false, p.basis), 4);
      break;
    case Category::Cross:
      put(d, Outcome::EffOut, 4);
      for (Outcome o : {Outcome::Eff0, Outcome::Eff1, Outcome::Eff2, Outcome::Eff3}) put(d, o, 1);
      break;
  }
  return d;
}

Outcome squash_sample(const ClickPattern& pattern, std::mt19937_64& rng) {
  const Distribution d = squash_distribution(pattern);
  // 8 divides 2^64, so the residue is exactly uniform.
  int draw = static_cast<int>(rng() % Distribution::kDenominator);
  for (std::size_t i = 0; i < kOutcomeCount; ++i) {
    draw -= d.eighths[i];
    if (draw < 0) return static_cast<Outcome>(i);
  }
  return Outcome::NoClick;
}

Outcome squash_sample(const ClickPattern& pattern, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return squash_sample(pattern, rng);
}

bool ValidationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

ValidationReport monte_carlo_validate(long trials, std::uint64_t seed) {
  if (trials <= 0) throw InvalidArgument("monte_carlo_validate: trials must be positive");
  auto make = [](std::initializer_list<int> slots, Announcement basis) {
    ClickPattern p;
    bool* flags[] = {&p.c1, &p.c2, &p.c3, &p.d1, &p.d2, &p.d3};
    for (int s : slots) *flags[s] = true;
    p.basis = basis;
    return p;
  };
  enum { C1, C2, C3, D1, D2, D3 };
  const std::vector<std::pair<std::string, ClickPattern>> rows = {
      {"single c2 even", make({C2}, Announcement::Even)},
      {"single d2 even", make({D2}, Announcement::Even)},
      {"single c2 odd", make({C2}, Announcement::Odd)},
      {"single d2 odd", make({D2}, Announcement::Odd)},
      {"single c1", make({C1}, Announcement::Even)},
      {"double middle even", make({C2, D2}, Announcement::Even)},
      {"double middle odd", make({C2, D2}, Announcement::Odd)},
      {"outside c1 d3", make({C1, D3}, Announcement::Even)},
      {"cross c2 d1", make({C2, D1}, Announcement::Odd)},
      {"no click", make({}, Announcement::Even)},
  };

  ValidationReport report;
  report.trials_per_pattern = trials;
  std::mt19937_64 rng(seed);
  for (const auto& [name, pattern] : rows) {
    std::array<long, kOutcomeCount> counts{};
    for (long i = 0; i < trials; ++i) ++counts[static_cast<std::size_t>(squash_sample(pattern, rng))];
    const Distribution expected = squash_distribution(pattern);
    for (std::size_t o = 0; o < kOutcomeCount; ++o) {
      FrequencyCheck c;
      c.pattern = name;
      c.outcome = static_cast<Outcome>(o);
      c.expected = expected[c.outcome];
      c.observed = static_cast<double>(counts[o]) / static_cast<double>(trials);
      c.bound = 3.0 * std::sqrt(c.expected * (1.0 - c.expected) / static_cast<double>(trials));
      // Zero-variance rows must match exactly.
      c.pass = std::abs(c.observed - c.expected) <= c.bound;
      report.checks.push_back(std::move(c));
    }
  }
  return report;
}

void write_report(std::ostream& out, const ValidationReport& report) {
  out << "pattern,outcome,expected,observed,bound_3sigma,result\n";
  for (const auto& c : report.checks) {
    if (c.expected == 0.0 && c.observed == 0.0) continue;
    out << c.pattern << ',' << to_string(c.outcome) << ',' << std::fixed << std::setprecision(6) << c.expected
        << ',' << c.observed << ',' << c.bound << ',' << (c.pass ? "pass" : "FAIL") << '\n';
  }
  out << (report.all_pass() ? "squash-validate: PASS" : "squash-validate: FAIL") << " ("
      << report.trials_per_pattern << " trials per pattern)\n";
}

}  // namespace phasekey::squash
