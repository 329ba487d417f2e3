#pragma once

// Dense state-vector engine with named registers.
//
// Bit packing: registers are laid out in declaration order, register 0 in the
// least-significant bits. A basis index is sum_k value_k << offset_k.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pqgi {

using Amplitude = std::complex<double>;
using BasisIndex = std::uint64_t;

inline constexpr int kDefaultMaxQubits = 24;
inline constexpr std::size_t kDefaultMaxDensityDim = std::size_t{1} << 12;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kMinRenormProbability = 1e-15;

/// Smallest k with 2^k >= n (0 for n <= 1).
constexpr int ceil_log2(std::uint64_t n) {
  return n <= 1 ? 0 : static_cast<int>(std::bit_width(n - 1));
}

struct Register {
  std::string name;
  int width = 0;
  int offset = 0;

  BasisIndex dim() const { return BasisIndex{1} << width; }
  BasisIndex mask() const { return (dim() - 1) << offset; }
  BasisIndex extract(BasisIndex index) const {
    return (index >> offset) & (dim() - 1);
  }
  BasisIndex insert(BasisIndex index, BasisIndex value) const {
    return (index & ~mask()) | (value << offset);
  }
};

class RegisterLayout {
 public:
  RegisterLayout() = default;

  RegisterLayout(std::initializer_list<std::pair<std::string_view, int>> regs,
                 int max_qubits = kDefaultMaxQubits)
      : max_qubits_(max_qubits) {
    for (const auto& [name, width] : regs) append(std::string(name), width);
  }

  explicit RegisterLayout(const std::vector<std::pair<std::string, int>>& regs,
                          int max_qubits = kDefaultMaxQubits)
      : max_qubits_(max_qubits) {
    for (const auto& [name, width] : regs) append(name, width);
  }

  int total_qubits() const { return total_; }
  int max_qubits() const { return max_qubits_; }
  BasisIndex dimension() const { return BasisIndex{1} << total_; }
  std::span<const Register> registers() const { return registers_; }

  bool contains(std::string_view name) const {
    return std::any_of(registers_.begin(), registers_.end(),
                       [&](const Register& r) { return r.name == name; });
  }

  const Register& operator[](std::string_view name) const {
    for (const auto& r : registers_)
      if (r.name == name) return r;
    throw std::invalid_argument("unknown register " + std::string(name));
  }

  int width(std::string_view name) const { return (*this)[name].width; }

  /// Copy with one more register in the most-significant position.
  RegisterLayout with(std::string_view name, int width) const {
    RegisterLayout out = *this;
    out.append(std::string(name), width);
    return out;
  }

  /// Copy with `name` removed; higher registers shift down.
  RegisterLayout without(std::string_view name) const {
    (void)(*this)[name];
    RegisterLayout out;
    out.max_qubits_ = max_qubits_;
    for (const auto& r : registers_)
      if (r.name != name) out.append(r.name, r.width);
    return out;
  }

  RegisterLayout concat(const RegisterLayout& high) const {
    RegisterLayout out = *this;
    out.max_qubits_ = std::max(max_qubits_, high.max_qubits_);
    for (const auto& r : high.registers_) out.append(r.name, r.width);
    return out;
  }

  RegisterLayout with_max_qubits(int max_qubits) const {
    RegisterLayout out = *this;
    out.max_qubits_ = max_qubits;
    out.check_cap();
    return out;
  }

  friend bool operator==(const RegisterLayout& a, const RegisterLayout& b) {
    if (a.registers_.size() != b.registers_.size()) return false;
    for (std::size_t i = 0; i < a.registers_.size(); ++i)
      if (a.registers_[i].name != b.registers_[i].name ||
          a.registers_[i].width != b.registers_[i].width)
        return false;
    return true;
  }

 private:
  void append(std::string name, int width) {
    if (width < 1)
      throw std::invalid_argument("register " + name + " must have width >= 1");
    if (contains(name))
      throw std::invalid_argument("duplicate register name " + name);
    registers_.push_back(Register{std::move(name), width, total_});
    total_ += width;
    check_cap();
  }

  void check_cap() const {
    if (total_ > max_qubits_)
      throw std::length_error("layout needs " + std::to_string(total_) +
                              " qubits, cap is " + std::to_string(max_qubits_));
  }

  std::vector<Register> registers_;
  int total_ = 0;
  int max_qubits_ = kDefaultMaxQubits;
};

using Assignment = std::map<std::string, BasisIndex, std::less<>>;

/// Basis index of a register assignment; unassigned registers are 0.
inline BasisIndex encode(const RegisterLayout& layout, const Assignment& values) {
  BasisIndex index = 0;
  for (const auto& [name, value] : values) {
    const Register& reg = layout[name];
    if (value >= reg.dim())
      throw std::invalid_argument("value " + std::to_string(value) +
                                  " exceeds register " + name + " width " +
                                  std::to_string(reg.width));
    index = reg.insert(index, value);
  }
  return index;
}

/// Mutable window onto amplitudes laid out per `layout`. Kernels operate on
/// views so they can run on slices of a larger state.
struct StateView {
  const RegisterLayout& layout;
  std::span<Amplitude> amps;
};

class QuantumState {
 public:
  /// All-zero basis state.
  explicit QuantumState(RegisterLayout layout)
      : layout_(std::move(layout)), amps_(layout_.dimension()) {
    amps_[0] = 1.0;
  }

  QuantumState(RegisterLayout layout, std::vector<Amplitude> amps)
      : layout_(std::move(layout)), amps_(std::move(amps)) {
    if (amps_.size() != layout_.dimension())
      throw std::invalid_argument("amplitude vector length does not match layout");
  }

  const RegisterLayout& layout() const { return layout_; }
  std::span<Amplitude> amplitudes() { return amps_; }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  Amplitude amplitude(BasisIndex index) const { return amps_.at(index); }
  Amplitude amplitude(const Assignment& values) const {
    return amps_[encode(layout_, values)];
  }
  StateView view() { return {layout_, amps_}; }

  double norm_squared() const {
    double total = 0.0;
    for (const auto& a : amps_) total += std::norm(a);
    return total;
  }

  void check_normalized(double tol = kNormTolerance) const {
    const double n = norm_squared();
    if (std::abs(n - 1.0) > tol)
      throw std::logic_error("state norm drifted: |psi|^2 = " + std::to_string(n));
  }

  friend bool operator==(const QuantumState&, const QuantumState&) = default;

 private:
  RegisterLayout layout_;
  std::vector<Amplitude> amps_;
};

inline QuantumState basis_state(const RegisterLayout& layout,
                                const Assignment& values = {}) {
  const BasisIndex index = encode(layout, values);
  std::vector<Amplitude> amps(layout.dimension());
  amps[index] = 1.0;
  return QuantumState(layout, std::move(amps));
}

/// |a> (x) |b>; the registers of `high` occupy the more significant bits.
inline QuantumState tensor(const QuantumState& low, const QuantumState& high) {
  RegisterLayout layout = low.layout().concat(high.layout());
  const auto lo = low.amplitudes();
  const auto hi = high.amplitudes();
  std::vector<Amplitude> amps(layout.dimension());
  for (std::size_t h = 0; h < hi.size(); ++h) {
    if (hi[h] == Amplitude{}) continue;
    for (std::size_t l = 0; l < lo.size(); ++l) amps[h * lo.size() + l] = hi[h] * lo[l];
  }
  return QuantumState(std::move(layout), std::move(amps));
}

inline double max_abs_difference(std::span<const Amplitude> a,
                                 std::span<const Amplitude> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// Deterministic generator for sample-mode measurements.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) with 53 random bits; identical across standard libraries.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

enum class PermutationCheck { off, verify };

namespace detail {

inline std::vector<const Register*> lookup(const RegisterLayout& layout,
                                           std::span<const std::string> names) {
  std::vector<const Register*> regs;
  regs.reserve(names.size());
  for (const auto& n : names) {
    const Register* r = &layout[n];
    if (std::find(regs.begin(), regs.end(), r) != regs.end())
      throw std::invalid_argument("register " + n + " listed twice");
    regs.push_back(r);
  }
  return regs;
}

// Exhaustive injectivity check over the listed registers' 2^k inputs.
template <class F>
void verify_bijection(const std::vector<const Register*>& regs, F& f) {
  int bits = 0;
  for (const auto* r : regs) bits += r->width;
  const BasisIndex count = BasisIndex{1} << bits;
  std::vector<bool> hit(count, false);
  std::vector<BasisIndex> values(regs.size());
  for (BasisIndex packed = 0; packed < count; ++packed) {
    BasisIndex rest = packed;
    for (std::size_t k = 0; k < regs.size(); ++k) {
      values[k] = rest & (regs[k]->dim() - 1);
      rest >>= regs[k]->width;
    }
    f(std::span<BasisIndex>(values));
    BasisIndex image = 0;
    int shift = 0;
    for (std::size_t k = 0; k < regs.size(); ++k) {
      if (values[k] >= regs[k]->dim())
        throw std::invalid_argument("permutation maps outside register " + regs[k]->name);
      image |= values[k] << shift;
      shift += regs[k]->width;
    }
    if (hit[image]) throw std::invalid_argument("map is not a bijection on the listed registers");
    hit[image] = true;
  }
}

}  // namespace detail

/// Applies the basis permutation `f` acting on the listed registers:
/// amplitude at f(x) becomes the old amplitude at x. `f` rewrites the
/// register values in place, in the order the names are listed.
template <class F>
void apply_permutation(StateView state, std::span<const std::string> registers, F&& f,
                       PermutationCheck check = PermutationCheck::off) {
  const auto regs = detail::lookup(state.layout, registers);
  if (check == PermutationCheck::verify) detail::verify_bijection(regs, f);

  std::vector<Amplitude> out(state.amps.size());
  std::vector<BasisIndex> values(regs.size());
  for (BasisIndex x = 0; x < state.amps.size(); ++x) {
    const Amplitude a = state.amps[x];
    if (a == Amplitude{}) continue;
    for (std::size_t k = 0; k < regs.size(); ++k) values[k] = regs[k]->extract(x);
    f(std::span<BasisIndex>(values));
    BasisIndex y = x;
    for (std::size_t k = 0; k < regs.size(); ++k) {
      if (values[k] >= regs[k]->dim())
        throw std::invalid_argument("permutation maps outside register " + regs[k]->name);
      y = regs[k]->insert(y, values[k]);
    }
    out[y] = a;
  }
  std::copy(out.begin(), out.end(), state.amps.begin());
}

template <class F>
void apply_permutation(QuantumState& state, std::span<const std::string> registers, F&& f,
                       PermutationCheck check = PermutationCheck::off) {
  apply_permutation(state.view(), registers, std::forward<F>(f), check);
}

/// Multiplies by -1 every amplitude whose basis index satisfies `marked`.
template <class Pred>
void apply_phase_flip(StateView state, Pred&& marked) {
  for (BasisIndex x = 0; x < state.amps.size(); ++x)
    if (marked(x)) state.amps[x] = -state.amps[x];
}

/// Calls `fn(base)` for every basis index whose bits in `reg` are zero.
template <class Fn>
void for_each_fiber(const RegisterLayout& layout, const Register& reg, Fn&& fn) {
  const BasisIndex low = BasisIndex{1} << reg.offset;
  const BasisIndex high = layout.dimension() >> (reg.offset + reg.width);
  for (BasisIndex h = 0; h < high; ++h)
    for (BasisIndex l = 0; l < low; ++l) fn((h << (reg.offset + reg.width)) | l);
}

/// Applies `op` to the block selected by `bit` of `control` being 1.
/// `control` must be the most significant register; `op` receives a view
/// over the remaining registers for each such control value.
template <class Op>
void apply_controlled(QuantumState& state, std::string_view control, int bit, Op&& op) {
  const RegisterLayout& layout = state.layout();
  const Register& ctrl = layout[control];
  if (ctrl.offset + ctrl.width != layout.total_qubits())
    throw std::invalid_argument("control register must be the most significant register");
  if (bit < 0 || bit >= ctrl.width)
    throw std::invalid_argument("control bit outside register " + ctrl.name);
  const RegisterLayout work = layout.without(control);
  const std::size_t block = work.dimension();
  auto amps = state.amplitudes();
  for (BasisIndex c = 0; c < ctrl.dim(); ++c) {
    if (((c >> bit) & 1U) == 0) continue;
    op(StateView{work, amps.subspan(c * block, block)});
  }
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

/// Marginal probability of each value of `reg`.
inline std::vector<double> marginal_distribution(const QuantumState& state,
                                                 std::string_view reg) {
  const Register& r = state.layout()[reg];
  std::vector<double> probs(r.dim(), 0.0);
  const auto amps = state.amplitudes();
  for (BasisIndex x = 0; x < amps.size(); ++x) probs[r.extract(x)] += std::norm(amps[x]);
  return probs;
}

/// Post-measurement state for outcome `value` of `reg`, renormalized.
inline QuantumState collapse(const QuantumState& state, std::string_view reg,
                             BasisIndex value) {
  const Register& r = state.layout()[reg];
  if (value >= r.dim())
    throw std::invalid_argument("outcome " + std::to_string(value) + " exceeds register " + r.name);
  std::vector<Amplitude> amps(state.amplitudes().begin(), state.amplitudes().end());
  double prob = 0.0;
  for (BasisIndex x = 0; x < amps.size(); ++x) {
    if (r.extract(x) == value)
      prob += std::norm(amps[x]);
    else
      amps[x] = 0.0;
  }
  if (prob < kMinRenormProbability)
    throw std::domain_error("cannot renormalize: outcome " + std::to_string(value) + " of " +
                            r.name + " has probability " + std::to_string(prob));
  const double scale = 1.0 / std::sqrt(prob);
  for (auto& a : amps) a *= scale;
  return QuantumState(state.layout(), std::move(amps));
}

struct MeasurementOutcome {
  BasisIndex value = 0;
  double probability = 0.0;
  QuantumState state;
};

/// Every outcome with probability above the renormalization floor, in value order.
inline std::vector<MeasurementOutcome> measure_distribution(const QuantumState& state,
                                                            std::string_view reg) {
  const auto probs = marginal_distribution(state, reg);
  std::vector<MeasurementOutcome> out;
  for (BasisIndex v = 0; v < probs.size(); ++v)
    if (probs[v] >= kMinRenormProbability)
      out.push_back(MeasurementOutcome{v, probs[v], collapse(state, reg, v)});
  return out;
}

/// Inverse-CDF draw from a discrete distribution.
inline BasisIndex sample_index(std::span<const double> probs, SeededRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  BasisIndex last = 0;
  for (BasisIndex v = 0; v < probs.size(); ++v) {
    if (probs[v] <= 0.0) continue;
    acc += probs[v];
    last = v;
    if (u < acc) return v;
  }
  return last;
}

/// Most probable value; ties go to the lowest value.
inline BasisIndex most_probable(std::span<const double> probs) {
  BasisIndex best = 0;
  for (BasisIndex v = 1; v < probs.size(); ++v)
    if (probs[v] > probs[best] + 1e-12) best = v;
  return best;
}

inline MeasurementOutcome measure_sample(const QuantumState& state, std::string_view reg,
                                         SeededRng& rng) {
  const auto probs = marginal_distribution(state, reg);
  const BasisIndex v = sample_index(probs, rng);
  return MeasurementOutcome{v, probs[v], collapse(state, reg, v)};
}

/// Removes `reg` when it holds the same basis value on every branch (a
/// product factor), e.g. a register just measured.
inline QuantumState drop_register(const QuantumState& state, std::string_view reg,
                                  double tol = 1e-12) {
  const Register& r = state.layout()[reg];
  const auto probs = marginal_distribution(state, reg);
  const BasisIndex value = most_probable(probs);
  if (std::abs(probs[value] - 1.0) > tol)
    throw std::invalid_argument("register " + r.name + " is not in a definite basis state");
  RegisterLayout layout = state.layout().without(reg);
  std::vector<Amplitude> amps(layout.dimension());
  const auto src = state.amplitudes();
  const BasisIndex low_mask = (BasisIndex{1} << r.offset) - 1;
  for (BasisIndex y = 0; y < amps.size(); ++y) {
    const BasisIndex x = (y & low_mask) | (value << r.offset) |
                         ((y & ~low_mask) << r.width);
    amps[y] = src[x];
  }
  return QuantumState(std::move(layout), std::move(amps));
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

struct DensityMatrix {
  Eigen::MatrixXcd entries;

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }

  Eigen::VectorXd eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
  }

  /// Hermitian, unit trace, positive semidefinite.
  void validate(double tol = 1e-10) const {
    if (entries.rows() != entries.cols())
      throw std::invalid_argument("density matrix is not square");
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(entries.trace() - Amplitude{1.0}) > tol)
      throw std::invalid_argument("density matrix trace is not 1");
    if (eigenvalues().minCoeff() < -tol)
      throw std::invalid_argument("density matrix has a negative eigenvalue");
  }
};

namespace detail {

// Amplitudes reshaped to (kept, environment); the kept index is packed
// little-endian in the listed order.
inline Eigen::MatrixXcd bipartition(const QuantumState& state, std::span<const std::string> keep) {
  if (keep.empty()) throw std::invalid_argument("need at least one register to keep");
  const auto& layout = state.layout();
  const auto kept = lookup(layout, keep);
  std::vector<const Register*> env;
  for (const auto& r : layout.registers())
    if (std::find(kept.begin(), kept.end(), &r) == kept.end()) env.push_back(&r);

  int keep_bits = 0;
  for (const auto* r : kept) keep_bits += r->width;
  const std::size_t dk = std::size_t{1} << keep_bits;
  const std::size_t de = layout.dimension() / dk;

  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dk),
                                                static_cast<Eigen::Index>(de));
  const auto amps = state.amplitudes();
  for (BasisIndex x = 0; x < amps.size(); ++x) {
    if (amps[x] == Amplitude{}) continue;
    BasisIndex k = 0, e = 0;
    int shift = 0;
    for (const auto* r : kept) {
      k |= r->extract(x) << shift;
      shift += r->width;
    }
    shift = 0;
    for (const auto* r : env) {
      e |= r->extract(x) << shift;
      shift += r->width;
    }
    psi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(e)) = amps[x];
  }
  return psi;
}

inline double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (const double lambda : eigenvalues)
    if (lambda > 1e-12) s -= lambda * std::log2(lambda);
  return std::max(0.0, s);
}

}  // namespace detail

/// Partial trace onto `keep` (packed little-endian in the listed order).
inline DensityMatrix reduced_density(const QuantumState& state,
                                     std::span<const std::string> keep,
                                     std::size_t max_dim = kDefaultMaxDensityDim) {
  int keep_bits = 0;
  for (const auto* r : detail::lookup(state.layout(), keep)) keep_bits += r->width;
  if (keep_bits >= 63 || (std::size_t{1} << keep_bits) > max_dim)
    throw std::length_error("reduced density dimension 2^" + std::to_string(keep_bits) +
                            " exceeds limit " + std::to_string(max_dim));
  const Eigen::MatrixXcd psi = detail::bipartition(state, keep);
  DensityMatrix rho{psi * psi.adjoint()};
  if (std::abs(rho.entries.trace() - Amplitude{1.0}) > 1e-10)
    throw std::invalid_argument("reduced density of an unnormalized state");
  return rho;
}

inline DensityMatrix reduced_density(const QuantumState& state,
                                     std::initializer_list<std::string> keep,
                                     std::size_t max_dim = kDefaultMaxDensityDim) {
  const std::vector<std::string> names(keep);
  return reduced_density(state, std::span<const std::string>(names), max_dim);
}

/// -sum lambda log2 lambda over eigenvalues above 1e-12, in bits.
inline double von_neumann_entropy(const DensityMatrix& rho, double tol = 1e-10) {
  if (rho.entries.rows() != rho.entries.cols())
    throw std::invalid_argument("density matrix is not square");
  if ((rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho.entries.trace() - Amplitude{1.0}) > tol)
    throw std::invalid_argument("density matrix trace is not 1");
  const Eigen::VectorXd lambda = rho.eigenvalues();
  if (lambda.minCoeff() < -tol) throw std::invalid_argument("density matrix has a negative eigenvalue");
  return detail::entropy_of_spectrum(lambda);
}

/// Entropy of the reduced state on `keep`, from whichever of the two Gram
/// matrices is smaller (they share their nonzero spectrum).
inline double entanglement_entropy(const QuantumState& state, std::span<const std::string> keep) {
  state.check_normalized(1e-10);
  const Eigen::MatrixXcd psi = detail::bipartition(state, keep);
  const Eigen::MatrixXcd gram = psi.rows() <= psi.cols() ? Eigen::MatrixXcd(psi * psi.adjoint())
                                                         : Eigen::MatrixXcd(psi.adjoint() * psi);
  return von_neumann_entropy(DensityMatrix{gram});
}

inline double entanglement_entropy(const QuantumState& state, std::initializer_list<std::string> keep) {
  const std::vector<std::string> names(keep);
  return entanglement_entropy(state, std::span<const std::string>(names));
}

}  // namespace pqgi
