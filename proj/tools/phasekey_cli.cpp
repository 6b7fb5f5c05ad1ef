// Command-line front end: qubit and realistic key-rate scans as CSV, plus the
// squashing-map Monte-Carlo check.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phasekey/engine.hpp"
#include "phasekey/error.hpp"
#include "phasekey/squash.hpp"

namespace {

using namespace phasekey;

constexpr int kExitInvalid = 2;

struct Globals {
  std::string out_path;
  std::uint64_t seed = OptimizerOptions{}.seed;
  unsigned threads = 0;
};

// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InvalidArgument("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

EngineOptions engine_options(const Globals& g) {
  EngineOptions o;
  o.optimizer.seed = g.seed;
  o.threads = g.threads;
  return o;
}

ChannelParams preset_or_default(const std::string& path) {
  return path.empty() ? default_preset() : load_preset(path);
}

std::vector<double> distances(double lmax, double lstep) { return linspace_step(0.0, lmax, lstep); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key rates of unbalanced phase-encoded BB84 and its variants"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out_path, "Write CSV (or the squash report) to this file");
  app.add_option("--seed", g.seed, "Seed of the multi-start optimizer");
  app.add_option("--threads", g.threads, "Worker threads for scans (0: all cores)");

  double kappa = 1.0;
  double qber = 0.0;
  std::string variant_name = "unbalanced";
  auto* qubit_rate = app.add_subcommand("qubit-rate", "Single-photon key rate at one (kappa, Q)");
  qubit_rate->add_option("--kappa", kappa, "Phase-modulator arm transmissivity in (0, 1]")->required();
  qubit_rate->add_option("--qber", qber, "Average error rate Q in [0, 1/2)")->required();
  qubit_rate->add_option("--variant", variant_name, "unbalanced | pbs | fix-loss | fix-uneven-bs");

  std::vector<double> kappas;
  double q_start = 0.0, q_stop = 0.12, q_step = 0.01;
  auto* qubit_scan_cmd = app.add_subcommand("qubit-scan", "Single-photon key rate over kappa and Q");
  qubit_scan_cmd->add_option("--kappas", kappas, "Comma-separated kappa values")->required()->delimiter(',');
  qubit_scan_cmd->add_option("--qber-start", q_start);
  qubit_scan_cmd->add_option("--qber-stop", q_stop);
  qubit_scan_cmd->add_option("--qber-step", q_step);
  qubit_scan_cmd->add_option("--variant", variant_name);

  std::string preset_path;
  double lmax = 100.0, lstep = 5.0;
  auto* distance_cmd = app.add_subcommand("distance-scan", "Realistic key rate against fiber length");
  distance_cmd->add_option("--variant", variant_name);
  distance_cmd->add_option("--kappa", kappa)->required();
  distance_cmd->add_option("--preset", preset_path, "Channel preset file (key=value lines)");
  distance_cmd->add_option("--lmax", lmax, "Largest distance in km");
  distance_cmd->add_option("--lstep", lstep, "Distance step in km");

  auto* compare_cmd = app.add_subcommand("compare", "Distance scans of all four variants");
  compare_cmd->add_option("--kappa", kappa)->required();
  compare_cmd->add_option("--preset", preset_path);
  compare_cmd->add_option("--lmax", lmax);
  compare_cmd->add_option("--lstep", lstep);

  long trials = 100000;
  std::uint64_t squash_seed = 1;
  auto* squash_cmd = app.add_subcommand("squash-validate", "Monte-Carlo check of the squashing table");
  squash_cmd->add_option("--trials", trials, "Samples per click pattern");
  squash_cmd->add_option("--seed", squash_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    const EngineOptions opts = engine_options(g);
    Sink sink(g.out_path);

    if (*qubit_rate) {
      const ProtocolConfig cfg = make_config(kappa, parse_variant(variant_name));
      write_csv(sink.stream(), {qubit_point(cfg, qber, opts)});
    } else if (*qubit_scan_cmd) {
      const Variant v = parse_variant(variant_name);
      std::vector<ProtocolConfig> cfgs;
      for (double k : kappas) cfgs.push_back(make_config(k, v));
      write_csv(sink.stream(), qubit_scan(cfgs, linspace_step(q_start, q_stop, q_step), opts));
    } else if (*distance_cmd) {
      const ProtocolConfig cfg = make_config(kappa, parse_variant(variant_name));
      const DistanceScan scan = distance_scan(cfg, preset_or_default(preset_path), distances(lmax, lstep), {}, opts);
      write_csv(sink.stream(), scan.points);
      if (scan.cutoff_km)
        std::cerr << "cutoff distance: " << *scan.cutoff_km << " km\n";
      else
        std::cerr << "cutoff distance: beyond " << lmax << " km\n";
    } else if (*compare_cmd) {
      write_csv(sink.stream(), compare_variants(kappa, preset_or_default(preset_path), distances(lmax, lstep), {}, opts));
    } else if (*squash_cmd) {
      if (trials <= 0) throw InvalidArgument("--trials must be positive");
      const squash::ValidationReport report = squash::monte_carlo_validate(trials, squash_seed);
      squash::write_report(sink.stream(), report);
      return report.all_pass() ? 0 : 1;
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const DegeneratePostselection& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
