#pragma once

// Classical post-processing of raw click patterns from Bob's three-slot
// detector into the five effective single-click outcomes, so that the qubit
// analysis applies to arbitrary optical input.
//
// Label join: detector c <-> bit 0, detector d <-> bit 1; the even basis
// (phase 0) yields outcomes {0, 2}, the odd basis (phase pi/2) yields {1, 3}.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>
#include <cstdint>
#include <random>
#include <string_view>

#include "phasekey/protocol.hpp"

namespace phasekey::squash {

struct ClickPattern {
  // Slots 1 and 3 are outside, slot 2 is the interfering middle slot.
  bool c1 = false, c2 = false, c3 = false;
  bool d1 = false, d2 = false, d3 = false;
  Announcement basis = Announcement::Even;

  int middle_clicks() const { return int{c2} + int{d2}; }
  int outside_clicks() const { return int{c1} + int{c3} + int{d1} + int{d3}; }
};

enum class Category { NoClick, SingleMiddle, SingleOutside, DoubleMiddle, MultiOutsideOnly, Cross };
std::string_view to_string(Category c);

enum class Outcome { Eff0, Eff1, Eff2, Eff3, EffOut, NoClick };
inline constexpr std::size_t kOutcomeCount = 6;
std::string_view to_string(Outcome o);

Category classify(const ClickPattern& pattern);

// Probabilities stored exactly in units of 1/8, the finest step the table
// needs.
struct Distribution {
  static constexpr int kDenominator = 8;
  std::array<int, kOutcomeCount> eighths{};

  double operator[](Outcome o) const {
    return static_cast<double>(eighths[static_cast<std::size_t>(o)]) / kDenominator;
  }
  int total_eighths() const;
};

Distribution squash_distribution(const ClickPattern& pattern);

// One draw from squash_distribution; deterministic in the seed.
Outcome squash_sample(const ClickPattern& pattern, std::uint64_t seed);

// Draw using a caller-owned generator, for Monte-Carlo loops.
Outcome squash_sample(const ClickPattern& pattern, std::mt19937_64& rng);

struct FrequencyCheck {
  std::string pattern;
  Outcome outcome;
  double expected = 0.0;
  double observed = 0.0;
  double bound = 0.0;  // three binomial standard deviations
  bool pass = false;
};

struct ValidationReport {
  long trials_per_pattern = 0;
  std::vector<FrequencyCheck> checks;

  bool all_pass() const;
};

// Samples every table row (one representative pattern each) `trials` times
// and compares the outcome frequencies with squash_distribution.
ValidationReport monte_carlo_validate(long trials, std::uint64_t seed);

void write_report(std::ostream& out, const ValidationReport& report);

}  // namespace phasekey::squash
