#pragma once

// Two-party protocol driver: parties, adversary hooks, transcript, leakage
// analytics and communication cost.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pqgi/counting.hpp"
#include "pqgi/geometry.hpp"
#include "pqgi/oracles.hpp"
#include "pqgi/qstate.hpp"

namespace pqgi {

struct AdversaryStrategy {
  enum class Kind { honest, bob_measure_all, bob_measure_data, bob_tamper, alice_measure_result };

  Kind kind = Kind::honest;
  BasisIndex mask = 0;

  static AdversaryStrategy honest() { return {}; }
  static AdversaryStrategy bob_measure_all() { return {Kind::bob_measure_all, 0}; }
  static AdversaryStrategy bob_measure_data() { return {Kind::bob_measure_data, 0}; }
  static AdversaryStrategy bob_tamper(BasisIndex mask) { return {Kind::bob_tamper, mask}; }
  static AdversaryStrategy alice_measure_result() { return {Kind::alice_measure_result, 0}; }

  /// honest | bob-measure-all | bob-measure-data | bob-tamper:MASK | alice-measure-result
  static AdversaryStrategy parse(std::string_view text) {
    if (text == "honest") return honest();
    if (text == "bob-measure-all") return bob_measure_all();
    if (text == "bob-measure-data") return bob_measure_data();
    if (text == "alice-measure-result") return alice_measure_result();
    constexpr std::string_view tamper = "bob-tamper";
    if (text.substr(0, tamper.size()) == tamper) {
      std::string_view rest = text.substr(tamper.size());
      if (rest.empty()) return bob_tamper(1);
      if (rest.front() != ':' || rest.size() < 2)
        throw std::invalid_argument("expected bob-tamper:MASK, got " + std::string(text));
      rest.remove_prefix(1);
      BasisIndex mask = 0;
      for (const char ch : rest) {
        if (ch < '0' || ch > '9' || mask > (BasisIndex{1} << 40))
          throw std::invalid_argument("bad tamper mask in " + std::string(text));
        mask = mask * 10 + static_cast<BasisIndex>(ch - '0');
      }
      AdversaryStrategy s = bob_tamper(mask);
      s.validate();
      return s;
    }
    throw std::invalid_argument("unknown adversary " + std::string(text));
  }

  std::string name() const {
    switch (kind) {
      case Kind::honest: return "honest";
      case Kind::bob_measure_all: return "bob-measure-all";
      case Kind::bob_measure_data: return "bob-measure-data";
      case Kind::bob_tamper: return "bob-tamper:" + std::to_string(mask);
      case Kind::alice_measure_result: return "alice-measure-result";
    }
    return "?";
  }

  void validate() const {
    if (kind == Kind::bob_tamper && mask == 0)
      throw std::invalid_argument("tamper mask must be nonzero");
  }
};

struct StepRecord {
  int step = 0;
  std::string actor;
  std::string action;
  std::optional<int> qubits;
  std::optional<bool> check_passed;
  std::optional<double> probability;
  std::optional<std::uint64_t> observed;
  std::string note;
};

struct CostSummary {
  int m = 0, n = 0, r = 0;
  int alice_to_bob_qubits = 0;
  int bob_to_alice_qubits = 0;
  int total_qubits = 0;
  /// 2m + n + 4r, the total as printed alongside the message sizes.
  int paper_formula_qubits = 0;
  std::uint64_t atallah_bits = 0;
  std::uint64_t qin_bits = 0;
};

inline CostSummary comm_cost(std::uint64_t M, std::uint64_t N, std::uint64_t R) {
  if (M < 1 || N < 1 || R < 1) throw std::invalid_argument("M, N, R must be >= 1");
  CostSummary c;
  c.m = address_bits(M);
  c.n = address_bits(N);
  c.r = value_bits_for_cells(R);
  c.alice_to_bob_qubits = c.m + c.r;
  c.bob_to_alice_qubits = c.m + c.n + 2 * c.r;
  c.total_qubits = c.alice_to_bob_qubits + c.bob_to_alice_qubits;
  c.paper_formula_qubits = 2 * c.m + c.n + 4 * c.r;
  c.atallah_bits = 4 * M * M * R;
  c.qin_bits = 2 * (M * M + N * N) * R;
  return c;
}

inline DataTable make_table(const GridSet& set, int value_bits) {
  std::vector<BasisIndex> entries;
  entries.reserve(set.size());
  for (const auto s : set.serials()) entries.push_back(encode_serial(s, value_bits));
  return DataTable(std::move(entries), value_bits);
}

/// Alice's side. Holds only her own table.
class Alice {
 public:
  Alice(const GridSet& set, int value_bits) : table_(make_table(set, value_bits)) {}

  const DataTable& table() const { return table_; }

  RegisterLayout layout() const {
    return RegisterLayout({{regs::alice_address, table_.address_bits()},
                           {regs::alice_data, table_.value_bits()}});
  }

  /// |psi'_A> = M^-1/2 sum_i |i>|a_i>.
  QuantumState prepare_message() const {
    QuantumState s(layout());
    prepare_uniform(s, regs::alice_address, table_.size());
    oracle_load(s, regs::alice_address, regs::alice_data, table_);
    return s;
  }

  CheatCheckResult check(const QuantumState& received, MeasureMode mode, SeededRng& rng) const {
    return mode == MeasureMode::exact ? cheat_check(received, table_)
                                      : cheat_check(received, table_, rng);
  }

  LoadOracle oracle() const { return LoadOracle(table_); }

 private:
  DataTable table_;
};

/// Bob's side. Holds only his own table.
class Bob {
 public:
  Bob(const GridSet& set, int value_bits) : table_(make_table(set, value_bits)) {}

  const DataTable& table() const { return table_; }

  RegisterLayout layout() const {
    return RegisterLayout({{regs::bob_address, table_.address_bits()},
                           {regs::bob_data, table_.value_bits()}});
  }

  /// |psi'_B> = N^-1/2 sum_j |j>|b_j>.
  QuantumState prepare_local() const {
    QuantumState s(layout());
    prepare_uniform(s, regs::bob_address, table_.size());
    oracle_load(s, regs::bob_address, regs::bob_data, table_);
    return s;
  }

  /// Attaches his state to Alice's and applies O_f.
  QuantumState combine(const QuantumState& from_alice) const {
    QuantumState joint = tensor(from_alice, prepare_local());
    oracle_xor(joint, regs::alice_data, regs::bob_data);
    return joint;
  }

  /// Black-box O_B for the counting stage; the table is not reachable.
  LoadOracle oracle() const { return LoadOracle(table_); }

 private:
  DataTable table_;
};

struct ProtocolInputs {
  std::uint64_t M = 0, N = 0, R = 0;
  int m = 0, n = 0, r = 0, p = 0;
};

struct StateSnapshot {
  std::string label;
  QuantumState state;
};

struct ProtocolTranscript {
  ProtocolInputs inputs;
  std::string adversary;
  MeasureMode mode = MeasureMode::exact;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  Verdict verdict = Verdict::abort;
  double cheat_check_pass_probability = 0.0;
  std::optional<CountEstimate> count_estimate;
  CostSummary cost;
  std::vector<std::string> notes;
  std::vector<StateSnapshot> snapshots;
};

struct RunOptions {
  bool record_states = false;
};

namespace detail {

struct Setup {
  GridSet set_a, set_b;
  ProtocolInputs inputs;
};

inline Setup setup(const Scene& scene_a, const Scene& scene_b, const CountingConfig& cfg) {
  if (!(scene_a.grid == scene_b.grid))
    throw std::invalid_argument("both parties must partition the same plane (grids differ)");
  Setup s{rasterize(scene_a), rasterize(scene_b), {}};
  auto& in = s.inputs;
  in.M = s.set_a.size();
  in.N = s.set_b.size();
  in.R = scene_a.grid.cells();
  in.m = address_bits(in.M);
  in.n = address_bits(in.N);
  in.r = value_bits_for_cells(in.R);
  in.p = cfg.resolved_bits(in.M * in.N);
  if (in.m + in.n + 2 * in.r > kDefaultMaxQubits)
    throw std::length_error("joint state needs " + std::to_string(in.m + in.n + 2 * in.r) +
                            " qubits, engine cap is " + std::to_string(kDefaultMaxQubits));
  check_counting_budget(RegisterLayout({{regs::alice_address, in.m},
                                        {regs::bob_address, in.n},
                                        {regs::bob_data, in.r}}),
                        in.p);
  return s;
}

inline MeasurementOutcome measure(const QuantumState& s, std::string_view reg, MeasureMode mode,
                                  SeededRng& rng) {
  if (mode == MeasureMode::sample) return measure_sample(s, reg, rng);
  const auto probs = marginal_distribution(s, reg);
  const BasisIndex v = most_probable(probs);
  return {v, probs[v], collapse(s, reg, v)};
}

/// Every state that can reach Bob's O_f under `adv`, with its probability.
inline std::vector<std::pair<double, QuantumState>> in_flight_branches(
    const QuantumState& message, const AdversaryStrategy& adv) {
  using Kind = AdversaryStrategy::Kind;
  std::vector<std::pair<double, QuantumState>> out;
  if (adv.kind == Kind::bob_measure_all) {
    for (auto& a : measure_distribution(message, regs::alice_address))
      for (auto& d : measure_distribution(a.state, regs::alice_data))
        out.emplace_back(a.probability * d.probability, std::move(d.state));
  } else if (adv.kind == Kind::bob_measure_data) {
    for (auto& d : measure_distribution(message, regs::alice_data))
      out.emplace_back(d.probability, std::move(d.state));
  } else {
    out.emplace_back(1.0, message);
  }
  return out;
}

}  // namespace detail

inline ProtocolTranscript run_protocol(const Scene& scene_a, const Scene& scene_b,
                                       const CountingConfig& cfg,
                                       const AdversaryStrategy& adversary,
                                       const RunOptions& options = {}) {
  using Kind = AdversaryStrategy::Kind;
  adversary.validate();
  const auto setup = detail::setup(scene_a, scene_b, cfg);
  const auto& in = setup.inputs;
  if (adversary.kind == Kind::bob_tamper && adversary.mask >= (BasisIndex{1} << in.r))
    throw std::invalid_argument("tamper mask " + std::to_string(adversary.mask) +
                                " does not fit in " + std::to_string(in.r) + " data qubits");

  ProtocolTranscript tr;
  tr.inputs = in;
  tr.adversary = adversary.name();
  tr.mode = cfg.mode;
  tr.seed = cfg.seed;
  tr.cost = comm_cost(in.M, in.N, in.R);
  tr.notes.push_back("counting is executed by Alice on her received state; Alice learns t and announces the verdict in step 5");
  tr.notes.push_back("the Grover iterate calls Bob's load oracle as a black box");
  if (tr.cost.total_qubits != tr.cost.paper_formula_qubits)
    tr.notes.push_back("qubit total from message sizes (2m+n+3r = " +
                       std::to_string(tr.cost.total_qubits) +
                       ") differs from the printed formula 2m+n+4r = " +
                       std::to_string(tr.cost.paper_formula_qubits));

  auto snapshot = [&](std::string label, const QuantumState& s) {
    if (options.record_states) tr.snapshots.push_back({std::move(label), s});
  };

  const Alice alice(setup.set_a, in.r);
  const Bob bob(setup.set_b, in.r);
  SeededRng rng(cfg.seed);

  // Step 1
  QuantumState message = alice.prepare_message();
  tr.steps.push_back({1, "alice", "prepare uniform address state and apply O_A", {}, {}, {}, {}, {}});
  tr.steps.push_back({1, "bob", "prepare uniform address state and apply O_B", {}, {}, {}, {}, {}});
  tr.steps.push_back({1, "alice", "send |psi'_A> to bob", message.layout().total_qubits(), {}, {}, {}, {}});
  snapshot("psi_A_prime", message);

  if (adversary.kind == Kind::bob_measure_all) {
    auto a = detail::measure(message, regs::alice_address, cfg.mode, rng);
    auto d = detail::measure(a.state, regs::alice_data, cfg.mode, rng);
    tr.steps.push_back({1, "bob", "adversary: measure A_a of received state", {}, {}, a.probability, a.value, {}});
    tr.steps.push_back({1, "bob", "adversary: measure D_a of received state", {}, {}, d.probability, d.value,
                        "bob learns one element of alice's set"});
    message = std::move(d.state);
  } else if (adversary.kind == Kind::bob_measure_data) {
    auto d = detail::measure(message, regs::alice_data, cfg.mode, rng);
    tr.steps.push_back({1, "bob", "adversary: measure D_a of received state", {}, {}, d.probability, d.value,
                        "bob learns one element of alice's set"});
    message = std::move(d.state);
  }

  // Step 2
  QuantumState joint = bob.combine(message);
  tr.steps.push_back({2, "bob", "attach |psi'_B> and apply O_f", {}, {}, {}, {}, {}});
  if (adversary.kind == Kind::bob_tamper) {
    xor_mask(joint, regs::alice_data, adversary.mask);
    tr.steps.push_back({2, "bob", "adversary: xor mask into D_a", {}, {}, {}, adversary.mask, {}});
  }
  tr.steps.push_back({2, "bob", "send |psi_AB> to alice", joint.layout().total_qubits(), {}, {}, {}, {}});
  snapshot("psi_AB", joint);

  // Step 3
  CheatCheckResult check = alice.check(joint, cfg.mode, rng);
  tr.cheat_check_pass_probability = check.pass_probability;
  tr.steps.push_back({3, "alice", "apply O_A to D_a and measure D_a", {}, check.passed,
                      check.pass_probability, check.observed, {}});
  if (!check.passed) {
    tr.verdict = Verdict::abort;
    tr.steps.push_back({3, "alice", "abort: cheat check failed", {}, {}, {}, {}, {}});
    return tr;
  }
  snapshot("psi_AB_prime", check.state);

  QuantumState work = drop_register(check.state, regs::alice_data);
  if (adversary.kind == Kind::alice_measure_result) {
    auto d = detail::measure(work, regs::bob_data, cfg.mode, rng);
    tr.steps.push_back({3, "alice", "adversary: measure D_b before counting", {}, {}, d.probability, d.value,
                        "observed value is a_i xor b_j, not b_j"});
    work = std::move(d.state);
  }

  // Step 4
  const GroverIterate g(work.layout(), alice.oracle(), bob.oracle());
  CountEstimate est = estimate_count(work, g, cfg, rng);
  tr.verdict = decide_intersection(est);
  tr.steps.push_back({4, "alice", "quantum counting on (A_a, A_b, D_b)", {}, {}, est.success_prob,
                      est.t_rounded, {}});
  tr.count_estimate = std::move(est);

  // Step 5
  tr.steps.push_back({5, "alice", std::string("announce verdict ") + to_string(tr.verdict) + " to bob",
                      {}, {}, {}, {}, {}});
  return tr;
}

/// Exact probability that the step-3 check fails, averaged over every
/// adversary measurement outcome.
inline double detection_probability(const Scene& scene_a, const Scene& scene_b,
                                    const AdversaryStrategy& adversary) {
  adversary.validate();
  const auto setup = detail::setup(scene_a, scene_b, CountingConfig{});
  const auto& in = setup.inputs;
  const Alice alice(setup.set_a, in.r);
  const Bob bob(setup.set_b, in.r);
  double detected = 0.0;
  for (auto& [weight, state] : detail::in_flight_branches(alice.prepare_message(), adversary)) {
    QuantumState joint = bob.combine(state);
    if (adversary.kind == AdversaryStrategy::Kind::bob_tamper)
      xor_mask(joint, regs::alice_data, adversary.mask);
    detected += weight * cheat_check(joint, alice.table()).fail_probability;
  }
  return detected;
}

struct LeakageReport {
  double ensemble_entropy_bits = 0.0;
  double holevo_bound_bits = 0.0;
  /// log2(M R).
  double paper_bound_bits = 0.0;
};

namespace detail {

// |psi'_A> purified with a copy of the address in a reference register E:
// tracing E out leaves the ensemble {1/M, |i, a_i>}.
inline QuantumState purified_message(const DataTable& table) {
  const RegisterLayout layout({{regs::alice_address, table.address_bits()},
                               {regs::alice_data, table.value_bits()},
                               {"E", table.address_bits()}});
  QuantumState s(layout);
  prepare_uniform(s, regs::alice_address, table.size());
  oracle_load(s, regs::alice_address, regs::alice_data, table);
  oracle_xor(s, regs::alice_address, "E");
  return s;
}

}  // namespace detail

/// Density matrix of the ensemble {1/M, |i,a_i>}.
inline DensityMatrix ensemble_density(const DataTable& table) {
  return reduced_density(detail::purified_message(table), {regs::alice_address, regs::alice_data});
}

inline LeakageReport leakage_report(const DataTable& table, std::uint64_t R) {
  LeakageReport out;
  out.ensemble_entropy_bits =
      entanglement_entropy(detail::purified_message(table), {regs::alice_address, regs::alice_data});
  const RegisterLayout layout({{regs::alice_address, table.address_bits()},
                               {regs::alice_data, table.value_bits()}});
  double member_total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const QuantumState member = basis_state(layout, {{regs::alice_address, i}, {regs::alice_data, table[i]}});
    member_total += entanglement_entropy(member, {regs::alice_address, regs::alice_data});
  }
  out.holevo_bound_bits = out.ensemble_entropy_bits - member_total / static_cast<double>(table.size());
  out.paper_bound_bits = std::log2(static_cast<double>(table.size()) * static_cast<double>(R));
  return out;
}

struct AttackReport {
  std::string strategy;
  double detection_probability = 0.0;
  /// What the security argument expects of this strategy.
  std::string expected;
  bool discrepancy = false;
};

inline std::vector<AttackReport> attack_suite(const Scene& scene_a, const Scene& scene_b,
                                              BasisIndex tamper_mask = 1) {
  const AdversaryStrategy strategies[] = {
      AdversaryStrategy::honest(), AdversaryStrategy::bob_measure_all(),
      AdversaryStrategy::bob_measure_data(), AdversaryStrategy::bob_tamper(tamper_mask),
      AdversaryStrategy::alice_measure_result()};
  std::vector<AttackReport> out;
  for (const auto& s : strategies) {
    AttackReport rep{s.name(), detection_probability(scene_a, scene_b, s), {}, false};
    switch (s.kind) {
      case AdversaryStrategy::Kind::honest:
        rep.expected = "never detected";
        rep.discrepancy = rep.detection_probability != 0.0;
        break;
      case AdversaryStrategy::Kind::bob_measure_all:
      case AdversaryStrategy::Kind::bob_measure_data:
        rep.expected = "detected by the D_a check";
        rep.discrepancy = rep.detection_probability < 1e-12;
        break;
      case AdversaryStrategy::Kind::bob_tamper:
        rep.expected = "detected";
        rep.discrepancy = rep.detection_probability < 1.0 - 1e-12;
        break;
      case AdversaryStrategy::Kind::alice_measure_result:
        rep.expected = "no check on bob's side; alice sees a_i xor b_j only";
        break;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace pqgi
