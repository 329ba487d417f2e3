#pragma once

// Data-loading and XOR oracles, and the joint preparation pipeline.

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pqgi/qstate.hpp"

namespace pqgi {

namespace regs {
inline const std::string alice_address = "A_a";
inline const std::string alice_data = "D_a";
inline const std::string bob_address = "A_b";
inline const std::string bob_data = "D_b";
inline const std::string counting = "C";
}  // namespace regs

/// Address width for `count` table entries; one qubit minimum.
constexpr int address_bits(std::uint64_t count) { return std::max(1, ceil_log2(count)); }

/// Data width for a plane of R cells; one qubit minimum.
constexpr int value_bits_for_cells(std::uint64_t cells) { return std::max(1, ceil_log2(cells)); }

/// Data value carrying grid serial `serial` in `bits` qubits. Serials live in
/// [1, R] and R <= 2^bits, so reduction mod 2^bits is injective; only serial
/// 2^bits lands on 0.
constexpr BasisIndex encode_serial(std::uint64_t serial, int bits) {
  return serial & ((BasisIndex{1} << bits) - 1);
}

class DataTable {
 public:
  DataTable(std::vector<BasisIndex> entries, int value_bits)
      : entries_(std::move(entries)), value_bits_(value_bits) {
    if (entries_.empty()) throw std::invalid_argument("data table must be nonempty");
    if (value_bits_ < 1 || value_bits_ > 32)
      throw std::invalid_argument("data table value width out of range");
    std::set<BasisIndex> seen;
    for (const auto v : entries_) {
      if (v >= (BasisIndex{1} << value_bits_))
        throw std::invalid_argument("table entry " + std::to_string(v) + " does not fit in " +
                                    std::to_string(value_bits_) + " bits");
      if (!seen.insert(v).second)
        throw std::invalid_argument("duplicate table entry " + std::to_string(v));
    }
  }

  std::size_t size() const { return entries_.size(); }
  int value_bits() const { return value_bits_; }
  int address_bits() const { return pqgi::address_bits(entries_.size()); }
  BasisIndex operator[](std::size_t i) const { return entries_[i]; }
  std::span<const BasisIndex> entries() const { return entries_; }

 private:
  std::vector<BasisIndex> entries_;
  int value_bits_;
};

struct PreparationSpec {
  DataTable table_a;
  DataTable table_b;
  RegisterLayout layout;

  PreparationSpec(DataTable a, DataTable b, int max_qubits = kDefaultMaxQubits)
      : table_a(std::move(a)), table_b(std::move(b)) {
    if (table_a.value_bits() != table_b.value_bits())
      throw std::invalid_argument("tables disagree on value width");
    const int r = table_a.value_bits();
    layout = RegisterLayout({{regs::alice_address, table_a.address_bits()},
                             {regs::alice_data, r},
                             {regs::bob_address, table_b.address_bits()},
                             {regs::bob_data, r}},
                            max_qubits);
  }

  std::uint64_t search_space() const { return table_a.size() * table_b.size(); }
};

/// Self-inverse unitary on `reg` sending |0> to the uniform superposition over
/// values 0..count-1 (a Householder reflection; identity for count = 1).
inline void apply_uniform_preparation(StateView state, std::string_view reg,
                                      std::uint64_t count) {
  const Register& r = state.layout[reg];
  if (count == 0) throw std::invalid_argument("uniform preparation needs count >= 1");
  if (count > r.dim())
    throw std::invalid_argument("count " + std::to_string(count) + " exceeds register " +
                                r.name + " capacity");
  if (count == 1) return;
  const double amp = 1.0 / std::sqrt(static_cast<double>(count));
  const double w_norm2 = 2.0 - 2.0 * amp;
  const BasisIndex stride = BasisIndex{1} << r.offset;
  for_each_fiber(state.layout, r, [&](BasisIndex base) {
    Amplitude overlap = state.amps[base];
    Amplitude sum{};
    for (BasisIndex v = 0; v < count; ++v) sum += state.amps[base + v * stride];
    overlap -= amp * sum;
    const Amplitude f = 2.0 * overlap / w_norm2;
    state.amps[base] -= f;
    for (BasisIndex v = 0; v < count; ++v) state.amps[base + v * stride] += f * amp;
  });
}

/// Puts `reg` (currently |0> on every branch) into uniform superposition over
/// its first `count` values.
inline void prepare_uniform(QuantumState& state, std::string_view reg, std::uint64_t count) {
  const auto probs = marginal_distribution(state, reg);
  if (std::abs(probs[0] - 1.0) > kNormTolerance)
    throw std::invalid_argument("register " + std::string(reg) + " is not |0> on every branch");
  apply_uniform_preparation(state.view(), reg, count);
}

/// |i>|x> -> |i>|x ^ table[i]> for i < len(table); identity above.
inline void oracle_load(StateView state, std::string_view addr, std::string_view data,
                        const DataTable& table) {
  const Register& a = state.layout[addr];
  const Register& d = state.layout[data];
  if (a.width != table.address_bits())
    throw std::invalid_argument("address register " + a.name + " has width " +
                                std::to_string(a.width) + ", table needs " +
                                std::to_string(table.address_bits()));
  if (d.width != table.value_bits())
    throw std::invalid_argument("data register " + d.name + " has width " +
                                std::to_string(d.width) + ", table needs " +
                                std::to_string(table.value_bits()));
  const std::string names[] = {a.name, d.name};
  apply_permutation(state, names, [&](std::span<BasisIndex> v) {
    if (v[0] < table.size()) v[1] ^= table[v[0]];
  });
}

inline void oracle_load(QuantumState& state, std::string_view addr, std::string_view data,
                        const DataTable& table) {
  oracle_load(state.view(), addr, data, table);
}

/// |u>_src |v>_dst -> |u>_src |u ^ v>_dst.
inline void oracle_xor(StateView state, std::string_view src, std::string_view dst) {
  const Register& s = state.layout[src];
  const Register& d = state.layout[dst];
  if (s.width != d.width)
    throw std::invalid_argument("xor oracle needs equal widths, got " + s.name + ":" +
                                std::to_string(s.width) + " and " + d.name + ":" +
                                std::to_string(d.width));
  const std::string names[] = {s.name, d.name};
  apply_permutation(state, names, [](std::span<BasisIndex> v) { v[1] ^= v[0]; });
}

inline void oracle_xor(QuantumState& state, std::string_view src, std::string_view dst) {
  oracle_xor(state.view(), src, dst);
}

/// XORs a fixed mask into `reg` on every branch.
inline void xor_mask(QuantumState& state, std::string_view reg, BasisIndex mask) {
  const std::string names[] = {std::string(reg)};
  apply_permutation(state, names, [mask](std::span<BasisIndex> v) { v[0] ^= mask; });
}

/// |psi'_AB> = (1/sqrt(MN)) sum_ij |i>|0>|j>|a_i ^ b_j>.
inline QuantumState prepare_joint(const PreparationSpec& spec) {
  QuantumState state(spec.layout);
  prepare_uniform(state, regs::alice_address, spec.table_a.size());
  oracle_load(state, regs::alice_address, regs::alice_data, spec.table_a);
  prepare_uniform(state, regs::bob_address, spec.table_b.size());
  oracle_load(state, regs::bob_address, regs::bob_data, spec.table_b);
  oracle_xor(state, regs::alice_data, regs::bob_data);
  oracle_load(state, regs::alice_address, regs::alice_data, spec.table_a);
  state.check_normalized();
  return state;
}

struct CheatCheckResult {
  double pass_probability = 0.0;
  /// Mass on nonzero D_a outcomes, summed directly rather than as 1 - pass.
  double fail_probability = 0.0;
  bool passed = false;
  BasisIndex observed = 0;
  /// State after measuring D_a with the recorded outcome.
  QuantumState state;
};

namespace detail {

inline double nonzero_mass(const std::vector<double>& probs) {
  double s = 0.0;
  for (std::size_t v = 1; v < probs.size(); ++v) s += probs[v];
  return s;
}

inline QuantumState uncompute(QuantumState state, const DataTable& table_a) {
  oracle_load(state, regs::alice_address, regs::alice_data, table_a);
  return state;
}

}  // namespace detail

/// Exact check: uncompute D_a and report P(D_a = 0). The post-state is
/// conditioned on the most probable outcome (ties go to 0).
inline CheatCheckResult cheat_check(const QuantumState& received, const DataTable& table_a) {
  QuantumState s = detail::uncompute(received, table_a);
  const auto probs = marginal_distribution(s, regs::alice_data);
  const BasisIndex outcome = most_probable(probs);
  return {probs[0], detail::nonzero_mass(probs), outcome == 0, outcome,
          collapse(s, regs::alice_data, outcome)};
}

/// Sampled check using the seeded generator.
inline CheatCheckResult cheat_check(const QuantumState& received, const DataTable& table_a,
                                    SeededRng& rng) {
  QuantumState s = detail::uncompute(received, table_a);
  const auto probs = marginal_distribution(s, regs::alice_data);
  const BasisIndex outcome = sample_index(probs, rng);
  return {probs[0], detail::nonzero_mass(probs), outcome == 0, outcome,
          collapse(s, regs::alice_data, outcome)};
}

/// A party's load oracle handed to the other party as a black box.
class LoadOracle {
 public:
  explicit LoadOracle(DataTable table) : table_(std::move(table)) {}

  std::size_t size() const { return table_.size(); }
  int address_bits() const { return table_.address_bits(); }
  int value_bits() const { return table_.value_bits(); }

  void apply(StateView state, std::string_view addr, std::string_view data) const {
    oracle_load(state, addr, data, table_);
  }

 private:
  DataTable table_;
};

}  // namespace pqgi
