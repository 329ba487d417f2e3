// pqgi: run the quantum geometric-intersection protocol on two scene files.
//
//   pqgi run --alice A.json --bob B.json [--mode exact|sample --seed N]
//            [--counting-bits P] [--adversary NAME[:mask]] [--trace PATH] [--verbose]
//   pqgi rasterize SCENE.json
//   pqgi analyze --alice A.json --bob B.json [--cost] [--leakage] [--attacks]
//
// Exit codes: 0 completed run, 1 input error, 2 protocol abort.

#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pqgi/io.hpp"
#include "pqgi/protocol.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitAbort = 2;

std::string fixed(double x, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

// "2.0" for integral values, four decimals otherwise.
std::string bits(double x) {
  return fixed(x, std::abs(x - std::round(x)) < 1e-9 ? 1 : 4);
}

std::string probability(double p) {
  if (std::abs(p) < 1e-12) return "0";
  if (std::abs(p - 1.0) < 1e-12) return "1";
  return fixed(p, 6);
}

std::string cost_line(const pqgi::CostSummary& c) {
  return "qubits: A→B " + std::to_string(c.alice_to_bob_qubits) + ", B→A " +
         std::to_string(c.bob_to_alice_qubits) + ", total " + std::to_string(c.total_qubits) +
         " (paper formula: " + std::to_string(c.paper_formula_qubits) + ")";
}

struct RunArgs {
  std::string alice, bob;
  int counting_bits = 0;
  std::string mode = "exact";
  std::optional<std::uint64_t> seed;
  std::string adversary = "honest";
  std::string trace;
  bool verbose = false;
};

int cmd_run(const RunArgs& args) {
  if (args.mode == "sample" && !args.seed) {
    std::cerr << "error: --seed is required in sample mode\n";
    return kExitInput;
  }
  pqgi::CountingConfig cfg;
  cfg.counting_bits = args.counting_bits;
  cfg.mode = args.mode == "sample" ? pqgi::MeasureMode::sample : pqgi::MeasureMode::exact;
  cfg.seed = args.seed.value_or(0);

  pqgi::ProtocolTranscript tr;
  try {
    const auto adversary = pqgi::AdversaryStrategy::parse(args.adversary);
    const auto a = pqgi::load_scene(args.alice);
    const auto b = pqgi::load_scene(args.bob);
    tr = pqgi::run_protocol(a, b, cfg, adversary, {args.verbose});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  if (!args.trace.empty()) {
    try {
      pqgi::write_trace(args.trace, tr, args.verbose);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInput;
    }
  }

  std::cout << "adversary=" << tr.adversary << " mode=" << pqgi::to_string(tr.mode) << "\n";
  std::cout << "M=" << tr.inputs.M << " N=" << tr.inputs.N << " R=" << tr.inputs.R
            << " m=" << tr.inputs.m << " n=" << tr.inputs.n << " r=" << tr.inputs.r
            << " p=" << tr.inputs.p << "\n";
  std::cout << "cheat check pass probability " << probability(tr.cheat_check_pass_probability) << "\n";
  std::cout << cost_line(tr.cost) << "\n";
  if (args.verbose)
    for (const auto& s : tr.steps)
      std::cout << "  step " << s.step << " [" << s.actor << "] " << s.action << "\n";

  if (tr.verdict == pqgi::Verdict::abort) {
    std::cout << "ABORT: cheat check failed\n";
    return kExitAbort;
  }
  const auto& est = *tr.count_estimate;
  std::cout << "verdict=" << pqgi::to_string(tr.verdict) << " t=" << est.t_rounded << "\n";
  std::cout << "t_hat=" << fixed(est.t_hat, 6) << " y=" << est.y << " theta_hat=" << fixed(est.theta_hat, 6)
            << " success_prob="
            << (est.success_prob ? fixed(*est.success_prob, 6) : std::string("n/a")) << "\n";
  return kExitOk;
}

int cmd_rasterize(const std::string& path) {
  try {
    const auto scene = pqgi::load_scene(path);
    const auto set = pqgi::rasterize(scene);
    std::cout << "cells=[";
    for (std::size_t i = 0; i < set.size(); ++i)
      std::cout << (i ? "," : "") << set.serials()[i];
    std::cout << "] M=" << set.size() << " m=" << pqgi::address_bits(set.size())
              << " r=" << pqgi::value_bits_for_cells(scene.grid.cells()) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

struct AnalyzeArgs {
  std::string alice, bob;
  bool cost = false, leakage = false, attacks = false;
  std::uint64_t mask = 1;
};

int cmd_analyze(AnalyzeArgs args) {
  if (!args.cost && !args.leakage && !args.attacks) args.cost = args.leakage = args.attacks = true;
  try {
    const auto a = pqgi::load_scene(args.alice);
    const auto b = pqgi::load_scene(args.bob);
    if (!(a.grid == b.grid)) throw std::invalid_argument("scenes use different grids");
    const auto set_a = pqgi::rasterize(a);
    const auto set_b = pqgi::rasterize(b);
    const auto R = a.grid.cells();

    if (args.cost) {
      const auto c = pqgi::comm_cost(set_a.size(), set_b.size(), R);
      std::cout << cost_line(c) << "\n";
      if (c.total_qubits != c.paper_formula_qubits)
        std::cout << "  discrepancy: message sizes (m+r) + (m+n+2r) sum to 2m+n+3r = "
                  << c.total_qubits << ", printed formula 2m+n+4r = " << c.paper_formula_qubits << "\n";
      std::cout << "classical baselines: atallah 4M^2R = " << c.atallah_bits
                << " bits, qin 2(M^2+N^2)R = " << c.qin_bits << " bits\n";
    }
    if (args.leakage) {
      const int r = pqgi::value_bits_for_cells(R);
      const auto rep = pqgi::leakage_report(pqgi::make_table(set_a, r), R);
      std::cout << "entropy " << bits(rep.ensemble_entropy_bits) << " bits (paper bound log(MR) = "
                << bits(rep.paper_bound_bits) << " bits)\n";
      std::cout << "holevo bound " << bits(rep.holevo_bound_bits) << " bits\n";
      if (std::abs(rep.ensemble_entropy_bits - rep.paper_bound_bits) > 1e-9)
        std::cout << "  discrepancy: ensemble entropy is log2(M) = " << bits(rep.ensemble_entropy_bits)
                  << ", not log(MR)\n";
    }
    if (args.attacks) {
      const int r = pqgi::value_bits_for_cells(R);
      if (args.mask == 0 || args.mask >= (std::uint64_t{1} << r))
        throw std::invalid_argument("tamper mask must be in [1, 2^r)");
      std::cout << std::left << std::setw(24) << "strategy" << std::setw(12) << "detection"
                << std::setw(56) << "expected" << "flag\n";
      for (const auto& rep : pqgi::attack_suite(a, b, args.mask))
        std::cout << std::setw(24) << rep.strategy << std::setw(12) << probability(rep.detection_probability)
                  << std::setw(56) << rep.expected << (rep.discrepancy ? "DISCREPANCY" : "ok") << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum two-party geometric intersection simulator"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Execute the protocol on two scenes");
  run_cmd->add_option("--alice", run.alice, "Alice's scene file")->required();
  run_cmd->add_option("--bob", run.bob, "Bob's scene file")->required();
  run_cmd->add_option("--counting-bits", run.counting_bits, "Counting register width (default ceil(log2 MN)+3)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--mode", run.mode, "exact (most probable outcomes) or sample")
      ->check(CLI::IsMember({"exact", "sample"}));
  run_cmd->add_option("--seed", run.seed, "Seed for sample mode");
  run_cmd->add_option("--adversary", run.adversary,
                      "honest | bob-measure-all | bob-measure-data | bob-tamper:MASK | alice-measure-result");
  run_cmd->add_option("--trace", run.trace, "Write the transcript as JSON");
  run_cmd->add_flag("--verbose", run.verbose, "Print steps; include states in the trace");

  std::string raster_path;
  auto* raster_cmd = app.add_subcommand("rasterize", "Print the grid serials a scene covers");
  raster_cmd->add_option("scene", raster_path, "Scene file")->required();

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Cost, leakage and attack analysis");
  analyze_cmd->add_option("--alice", analyze.alice, "Alice's scene file")->required();
  analyze_cmd->add_option("--bob", analyze.bob, "Bob's scene file")->required();
  analyze_cmd->add_flag("--cost", analyze.cost, "Communication cost");
  analyze_cmd->add_flag("--leakage", analyze.leakage, "Entropy of Alice's message ensemble");
  analyze_cmd->add_flag("--attacks", analyze.attacks, "Detection probability per adversary");
  analyze_cmd->add_option("--mask", analyze.mask, "Tamper mask for the attack table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (*run_cmd) return cmd_run(run);
  if (*raster_cmd) return cmd_rasterize(raster_path);
  return cmd_analyze(analyze);
}
