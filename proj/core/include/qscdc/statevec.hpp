// Exact state-vector simulation of one to three qubits.
//
// Conventions used throughout the library:
//  - Qubit 0 is Alice's particle, qubit 1 is Bob's, qubit 2 (when present)
//    is Eve's ancilla.
//  - Qubit 0 is the most significant bit of a basis index, so |01> on two
//    qubits means Alice holds |0> and Bob holds |1>.
//  - Constructors fix the global phase so the first nonzero amplitude is
//    real and positive.
//  - No randomness lives here: measure() takes the uniform variate from the
//    caller, everything else is deterministic.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qscdc {

using Amplitude = std::complex<double>;

// Algebraic identities (norms, unitarity, probability sums) hold to this.
inline constexpr double kNormTolerance = 1e-12;
// State comparisons (overlap magnitudes) are asserted to this.
inline constexpr double kStateTolerance = 1e-10;

enum class Basis { Z, X, Y };

std::string to_string(Basis b);
Basis basis_from_string(std::string_view s);

// The four Bell states, in codeword order 00, 01, 10, 11.
enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

// The eight three-qubit GHZ-class states (|b> +- |~b>)/sqrt(2) with base
// bitstrings 000 (P), 001 (Q), 010 (R), 011 (S).
enum class GhzLabel {
  PPlus, PMinus, QPlus, QMinus, RPlus, RMinus, SPlus, SMinus
};

std::string to_string(BellLabel label);
BellLabel bell_label_from_string(std::string_view s);
std::string to_string(GhzLabel label);
GhzLabel ghz_label_from_string(std::string_view s);

std::array<BellLabel, 4> all_bell_labels();
std::array<GhzLabel, 8> all_ghz_labels();

// Single-qubit unitary, row-major. The constructor rejects matrices that
// are not unitary to kNormTolerance.
class LocalUnitary {
 public:
  LocalUnitary(Amplitude u00, Amplitude u01, Amplitude u10, Amplitude u11);

  Amplitude at(int row, int col) const { return u_[row * 2 + col]; }

  static LocalUnitary identity();
  static LocalUnitary sigma_z();

 private:
  std::array<Amplitude, 4> u_;
};

// Dense normalized state of 1..3 qubits. Value type, fits on the stack.
class QubitRegister {
 public:
  // Throws std::invalid_argument unless amps has 2^n_qubits entries, all
  // finite, with squared magnitudes summing to 1 within kNormTolerance.
  QubitRegister(int n_qubits, std::span<const Amplitude> amps);

  static QubitRegister basis_state(int n_qubits, unsigned index);

  int n_qubits() const { return n_qubits_; }
  int dim() const { return 1 << n_qubits_; }
  Amplitude amplitude(int index) const;

  // Bit of `index` belonging to `qubit` under the MSB-first convention.
  int bit_of(int index, int qubit) const;

  double norm_squared() const;

 private:
  int n_qubits_ = 1;
  std::array<Amplitude, 8> amp_{};
};

QubitRegister make_bell(BellLabel label);
QubitRegister make_ghz(GhzLabel label);

// Applies a single-qubit unitary to the given qubit slot.
// Throws std::out_of_range for a bad qubit index.
QubitRegister apply_local(const QubitRegister& reg, int qubit,
                          const LocalUnitary& u);

// Joint Born-rule distribution over the listed (qubit, basis) measurements.
// Keys are outcome bitstrings in the same order the qubits were listed;
// unmeasured qubits are simply summed over. Entries below 1e-15 are dropped.
class OutcomeDistribution {
 public:
  using Map = std::map<std::string, double>;

  explicit OutcomeDistribution(Map entries) : entries_(std::move(entries)) {}

  // 0 for outcomes outside the support.
  double probability(std::string_view outcome) const;
  const Map& entries() const { return entries_; }
  double total() const;

 private:
  Map entries_;
};

// Throws std::invalid_argument on an empty or duplicated qubit list,
// std::out_of_range on a bad qubit index.
OutcomeDistribution outcome_distribution(
    const QubitRegister& reg,
    std::span<const std::pair<int, Basis>> measurements);

// Result of projecting one qubit onto a basis outcome. `state` is absent
// when the branch has (numerically) zero probability.
struct Projection {
  double probability = 0.0;
  std::optional<QubitRegister> state;
};

Projection project(const QubitRegister& reg, int qubit, Basis basis,
                   int outcome);

// Projective measurement of one qubit. `sample` must lie in [0, 1); the
// outcome is 0 when sample < P(outcome 0), else 1. Returns the outcome and
// the renormalized post-measurement state (register size unchanged).
std::pair<int, QubitRegister> measure(const QubitRegister& reg, int qubit,
                                      Basis basis, double sample);

// |<a|b>| of two equal-sized registers; insensitive to global phase.
// Throws std::invalid_argument on a size mismatch.
double overlap_magnitude(const QubitRegister& a, const QubitRegister& b);

// Human-readable ket expansion with 12 significant digits, e.g.
// "0.707106781187|00> + 0.707106781187|11>". Zero amplitudes are skipped.
std::string to_debug_string(const QubitRegister& reg);

}  // namespace qscdc
