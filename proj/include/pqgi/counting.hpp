#pragma once

// Quantum counting over the joint preparation: Grover iterate, phase
// estimation with an inverse Fourier transform, and count decoding.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pqgi/oracles.hpp"
#include "pqgi/qstate.hpp"

namespace pqgi {

/// G = -A S0 A^-1 S_chi, where A is the joint preparation pipeline, S_chi
/// flips branches with D_b = 0 and S0 flips the all-zero basis state.
///
/// The layout holds A_a, A_b, D_b and optionally D_a. Without D_a the
/// pipeline loads both tables straight into D_b, which is the full pipeline
/// restricted to D_a = 0 (that subspace is invariant under it).
class GroverIterate {
 public:
  GroverIterate(RegisterLayout layout, LoadOracle alice, LoadOracle bob)
      : layout_(std::move(layout)), alice_(std::move(alice)), bob_(std::move(bob)) {
    with_alice_data_ = layout_.contains(regs::alice_data);
    marked_ = layout_[regs::bob_data];
    // Touch every register the pipeline needs so bad layouts fail here.
    (void)layout_[regs::alice_address];
    (void)layout_[regs::bob_address];
  }

  explicit GroverIterate(const PreparationSpec& spec)
      : GroverIterate(spec.layout, LoadOracle(spec.table_a), LoadOracle(spec.table_b)) {}

  /// Counting layout: the joint layout with D_a removed.
  static RegisterLayout compact_layout(const PreparationSpec& spec) {
    return spec.layout.without(regs::alice_data);
  }

  const RegisterLayout& layout() const { return layout_; }
  std::uint64_t search_space() const { return alice_.size() * bob_.size(); }

  /// A
  void prepare(StateView s) const {
    check(s);
    apply_uniform_preparation(s, regs::alice_address, alice_.size());
    apply_uniform_preparation(s, regs::bob_address, bob_.size());
    if (with_alice_data_) {
      alice_.apply(s, regs::alice_address, regs::alice_data);
      bob_.apply(s, regs::bob_address, regs::bob_data);
      oracle_xor(s, regs::alice_data, regs::bob_data);
      alice_.apply(s, regs::alice_address, regs::alice_data);
    } else {
      alice_.apply(s, regs::alice_address, regs::bob_data);
      bob_.apply(s, regs::bob_address, regs::bob_data);
    }
  }

  /// A^-1
  void unprepare(StateView s) const {
    check(s);
    if (with_alice_data_) {
      alice_.apply(s, regs::alice_address, regs::alice_data);
      oracle_xor(s, regs::alice_data, regs::bob_data);
      bob_.apply(s, regs::bob_address, regs::bob_data);
      alice_.apply(s, regs::alice_address, regs::alice_data);
    } else {
      bob_.apply(s, regs::bob_address, regs::bob_data);
      alice_.apply(s, regs::alice_address, regs::bob_data);
    }
    apply_uniform_preparation(s, regs::bob_address, bob_.size());
    apply_uniform_preparation(s, regs::alice_address, alice_.size());
  }

  void apply(StateView s) const {
    flip_marked(s);
    unprepare(s);
    flip_zero(s);
    prepare(s);
    negate(s);
  }

  void apply_inverse(StateView s) const {
    unprepare(s);
    flip_zero(s);
    prepare(s);
    flip_marked(s);
    negate(s);
  }

  void apply(QuantumState& s) const { apply(s.view()); }
  void apply_inverse(QuantumState& s) const { apply_inverse(s.view()); }

  /// A|0>.
  QuantumState prepared() const {
    QuantumState s(layout_);
    prepare(s.view());
    return s;
  }

 private:
  void check(const StateView& s) const {
    if (!(s.layout == layout_))
      throw std::invalid_argument("state layout does not match the Grover iterate");
  }
  void flip_marked(StateView s) const {
    apply_phase_flip(s, [&](BasisIndex x) { return marked_.extract(x) == 0; });
  }
  static void flip_zero(StateView s) { s.amps[0] = -s.amps[0]; }
  static void negate(StateView s) {
    for (auto& a : s.amps) a = -a;
  }

  RegisterLayout layout_;
  LoadOracle alice_;
  LoadOracle bob_;
  Register marked_;
  bool with_alice_data_ = false;
};

// ---------------------------------------------------------------------------
// Fourier transform on a register
// ---------------------------------------------------------------------------

namespace detail {

// In-place radix-2 DFT: out[y] = N^-1/2 sum_c in[c] exp(sign 2 pi i c y / N).
inline void unitary_dft(std::vector<Amplitude>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<Amplitude> twiddle(n / 2 + 1);
  for (std::size_t k = 0; k < twiddle.size(); ++k)
    twiddle[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                                     static_cast<double>(n));
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len)
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Amplitude u = a[i + j];
        const Amplitude v = a[i + j + len / 2] * twiddle[j * step];
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& x : a) x *= scale;
}

inline void register_dft(QuantumState& state, std::string_view reg, int sign) {
  const Register& r = state.layout()[reg];
  const BasisIndex stride = BasisIndex{1} << r.offset;
  auto amps = state.amplitudes();
  std::vector<Amplitude> buf(r.dim());
  for_each_fiber(state.layout(), r, [&](BasisIndex base) {
    for (BasisIndex v = 0; v < r.dim(); ++v) buf[v] = amps[base + v * stride];
    unitary_dft(buf, sign);
    for (BasisIndex v = 0; v < r.dim(); ++v) amps[base + v * stride] = buf[v];
  });
}

}  // namespace detail

/// |c> -> 2^-p/2 sum_y exp(2 pi i c y / 2^p) |y> on `reg`.
inline void apply_qft(QuantumState& state, std::string_view reg) {
  detail::register_dft(state, reg, +1);
}

inline void apply_inverse_qft(QuantumState& state, std::string_view reg) {
  detail::register_dft(state, reg, -1);
}

// ---------------------------------------------------------------------------
// Phase estimation
// ---------------------------------------------------------------------------

enum class MeasureMode { exact, sample };

inline int default_counting_bits(std::uint64_t search_space) {
  return ceil_log2(search_space) + 3;
}

struct CountingConfig {
  /// Counting register width; 0 selects ceil(log2 K) + 3.
  int counting_bits = 0;
  MeasureMode mode = MeasureMode::exact;
  std::uint64_t seed = 0;

  int resolved_bits(std::uint64_t search_space) const {
    if (counting_bits < 0) throw std::invalid_argument("counting bits must be >= 1");
    return counting_bits == 0 ? default_counting_bits(search_space) : counting_bits;
  }
};

struct CountEstimate {
  std::uint64_t search_space = 0;
  int counting_bits = 0;
  BasisIndex y = 0;
  double theta_hat = 0.0;
  double t_hat = 0.0;
  std::uint64_t t_rounded = 0;
  /// Exact count of the input state when it is an honest-looking preparation.
  std::optional<std::uint64_t> reference_count;
  /// Probability of outcomes decoding to reference_count (exact mode only).
  std::optional<double> success_prob;
  /// Exact outcome distribution over y.
  std::vector<double> distribution;
};

/// K sin^2(pi y / 2^p).
inline double decoded_count(BasisIndex y, int counting_bits, std::uint64_t search_space) {
  const double s = std::sin(std::numbers::pi * static_cast<double>(y) /
                            std::ldexp(1.0, counting_bits));
  return static_cast<double>(search_space) * s * s;
}

inline CountEstimate decode_outcome(BasisIndex y, int counting_bits, std::uint64_t search_space) {
  CountEstimate est;
  est.search_space = search_space;
  est.counting_bits = counting_bits;
  est.y = y;
  est.theta_hat = 2.0 * std::numbers::pi * static_cast<double>(y) / std::ldexp(1.0, counting_bits);
  est.t_hat = decoded_count(y, counting_bits, search_space);
  const long long rounded = std::llround(est.t_hat);
  est.t_rounded = static_cast<std::uint64_t>(
      std::clamp<long long>(rounded, 0, static_cast<long long>(search_space)));
  return est;
}

enum class Verdict { intersect, disjoint, abort };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::intersect: return "INTERSECT";
    case Verdict::disjoint: return "DISJOINT";
    case Verdict::abort: return "ABORT";
  }
  return "?";
}

inline Verdict decide_intersection(const CountEstimate& est) {
  return est.t_rounded >= 1 ? Verdict::intersect : Verdict::disjoint;
}

/// Number of branches with D_b = 0 in a uniform-magnitude preparation.
inline std::uint64_t exact_count(const QuantumState& state, double tol = 1e-9) {
  const Register& marked = state.layout()[regs::bob_data];
  const auto amps = state.amplitudes();
  std::uint64_t support = 0;
  for (const auto& a : amps)
    if (std::abs(a) > tol) ++support;
  if (support == 0) throw std::invalid_argument("state has no support");
  const double expected = 1.0 / std::sqrt(static_cast<double>(support));
  double mass = 0.0;
  for (BasisIndex x = 0; x < amps.size(); ++x) {
    const double mag = std::abs(amps[x]);
    if (mag <= tol) continue;
    if (std::abs(mag - expected) > tol)
      throw std::invalid_argument("branch magnitudes are not uniform; not an honest preparation");
    if (marked.extract(x) == 0) mass += mag * mag;
  }
  return static_cast<std::uint64_t>(std::llround(mass * static_cast<double>(support)));
}

inline void check_counting_budget(const RegisterLayout& work, int counting_bits) {
  if (counting_bits < 1) throw std::invalid_argument("counting bits must be >= 1");
  const int needed = work.total_qubits() + counting_bits;
  if (needed > work.max_qubits())
    throw std::length_error("phase estimation needs " + std::to_string(needed) +
                            " qubits (" + std::to_string(work.total_qubits()) + " work + " +
                            std::to_string(counting_bits) + " counting), engine cap is " +
                            std::to_string(work.max_qubits()));
}

/// Counting register uniform, then controlled-G^(2^k) on bit k, exactly as
/// the circuit is drawn: 2^k applications of controlled-G per bit.
inline QuantumState controlled_power_circuit(const QuantumState& work, const GroverIterate& g,
                                             int counting_bits) {
  check_counting_budget(work.layout(), counting_bits);
  QuantumState s =
      tensor(work, QuantumState(RegisterLayout({{regs::counting, counting_bits}},
                                               work.layout().max_qubits())));
  prepare_uniform(s, regs::counting, BasisIndex{1} << counting_bits);
  for (int k = 0; k < counting_bits; ++k)
    apply_controlled(s, regs::counting, k, [&](StateView block) {
      for (BasisIndex rep = 0; rep < (BasisIndex{1} << k); ++rep) g.apply(block);
    });
  return s;
}

/// Same state as controlled_power_circuit: with the counting register
/// starting uniform and unentangled, block c ends up holding G^c|psi>, so the
/// blocks are filled by successive applications of G.
inline QuantumState controlled_power_cascade(const QuantumState& work, const GroverIterate& g,
                                             int counting_bits) {
  check_counting_budget(work.layout(), counting_bits);
  RegisterLayout layout = work.layout().with(regs::counting, counting_bits);
  const std::size_t block = work.layout().dimension();
  const BasisIndex blocks = BasisIndex{1} << counting_bits;
  std::vector<Amplitude> amps(layout.dimension());
  const double scale = 1.0 / std::sqrt(static_cast<double>(blocks));
  std::vector<Amplitude> current(work.amplitudes().begin(), work.amplitudes().end());
  const RegisterLayout& wl = g.layout();
  for (BasisIndex c = 0; c < blocks; ++c) {
    if (c > 0) g.apply(StateView{wl, current});
    for (std::size_t i = 0; i < block; ++i) amps[c * block + i] = current[i] * scale;
  }
  return QuantumState(std::move(layout), std::move(amps));
}

/// Phase estimation on `work` (layout must match the iterate). In sample mode
/// the outcome is drawn from `rng`; in exact mode the most probable outcome
/// is taken.
inline CountEstimate estimate_count(const QuantumState& work, const GroverIterate& g,
                                    const CountingConfig& cfg, SeededRng& rng) {
  const std::uint64_t K = g.search_space();
  const int p = cfg.resolved_bits(K);
  QuantumState s = controlled_power_cascade(work, g, p);
  apply_inverse_qft(s, regs::counting);
  auto dist = marginal_distribution(s, regs::counting);

  const BasisIndex y = cfg.mode == MeasureMode::exact ? most_probable(dist) : sample_index(dist, rng);
  CountEstimate est = decode_outcome(y, p, K);
  try {
    est.reference_count = exact_count(work);
  } catch (const std::invalid_argument&) {
  }
  if (cfg.mode == MeasureMode::exact && est.reference_count) {
    double mass = 0.0;
    for (BasisIndex v = 0; v < dist.size(); ++v)
      if (decode_outcome(v, p, K).t_rounded == *est.reference_count) mass += dist[v];
    est.success_prob = mass;
  }
  est.distribution = std::move(dist);
  return est;
}

/// Prepares |psi'_AB>, drops the cleared D_a register and estimates the count.
inline CountEstimate phase_estimate(const PreparationSpec& spec, const CountingConfig& cfg) {
  const GroverIterate g(GroverIterate::compact_layout(spec), LoadOracle(spec.table_a),
                        LoadOracle(spec.table_b));
  check_counting_budget(g.layout(), cfg.resolved_bits(spec.search_space()));
  const QuantumState work = drop_register(prepare_joint(spec), regs::alice_data);
  SeededRng rng(cfg.seed);
  return estimate_count(work, g, cfg, rng);
}

}  // namespace pqgi
