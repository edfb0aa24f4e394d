#include "qscdc/statevec.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qscdc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Measurement basis vectors, outcome 0 then outcome 1.
std::array<std::array<Amplitude, 2>, 2> basis_vectors(Basis b) {
  const Amplitude i{0.0, 1.0};
  switch (b) {
    case Basis::Z:
      return {{{1.0, 0.0}, {0.0, 1.0}}};
    case Basis::X:
      return {{{kInvSqrt2, kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}}};
    case Basis::Y:
      return {{{kInvSqrt2, i * kInvSqrt2}, {kInvSqrt2, -i * kInvSqrt2}}};
  }
  throw std::invalid_argument("unknown basis");
}

// Unitary whose row k is the conjugated outcome-k basis vector; applying it
// maps "amplitude along outcome k" onto computational |k>.
LocalUnitary analysis_unitary(Basis b) {
  const auto v = basis_vectors(b);
  return LocalUnitary(std::conj(v[0][0]), std::conj(v[0][1]),
                      std::conj(v[1][0]), std::conj(v[1][1]));
}

void check_qubit(const QubitRegister& reg, int qubit) {
  if (qubit < 0 || qubit >= reg.n_qubits()) {
    throw std::out_of_range("qubit index out of range");
  }
}

}  // namespace

std::string to_string(Basis b) {
  switch (b) {
    case Basis::Z: return "Z";
    case Basis::X: return "X";
    case Basis::Y: return "Y";
  }
  throw std::invalid_argument("unknown basis");
}

Basis basis_from_string(std::string_view s) {
  if (s == "Z") return Basis::Z;
  if (s == "X") return Basis::X;
  if (s == "Y") return Basis::Y;
  throw std::invalid_argument("unknown basis: " + std::string(s));
}

std::string to_string(BellLabel label) {
  switch (label) {
    case BellLabel::PhiPlus:  return "phi+";
    case BellLabel::PhiMinus: return "phi-";
    case BellLabel::PsiPlus:  return "psi+";
    case BellLabel::PsiMinus: return "psi-";
  }
  throw std::invalid_argument("unknown Bell label");
}

BellLabel bell_label_from_string(std::string_view s) {
  if (s == "phi+") return BellLabel::PhiPlus;
  if (s == "phi-") return BellLabel::PhiMinus;
  if (s == "psi+") return BellLabel::PsiPlus;
  if (s == "psi-") return BellLabel::PsiMinus;
  throw std::invalid_argument("unknown Bell label: " + std::string(s));
}

std::string to_string(GhzLabel label) {
  switch (label) {
    case GhzLabel::PPlus:  return "P+";
    case GhzLabel::PMinus: return "P-";
    case GhzLabel::QPlus:  return "Q+";
    case GhzLabel::QMinus: return "Q-";
    case GhzLabel::RPlus:  return "R+";
    case GhzLabel::RMinus: return "R-";
    case GhzLabel::SPlus:  return "S+";
    case GhzLabel::SMinus: return "S-";
  }
  throw std::invalid_argument("unknown GHZ label");
}

GhzLabel ghz_label_from_string(std::string_view s) {
  for (GhzLabel g : all_ghz_labels()) {
    if (to_string(g) == s) return g;
  }
  throw std::invalid_argument("unknown GHZ label: " + std::string(s));
}

std::array<BellLabel, 4> all_bell_labels() {
  return {BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus,
          BellLabel::PsiMinus};
}

std::array<GhzLabel, 8> all_ghz_labels() {
  return {GhzLabel::PPlus, GhzLabel::PMinus, GhzLabel::QPlus,
          GhzLabel::QMinus, GhzLabel::RPlus, GhzLabel::RMinus,
          GhzLabel::SPlus, GhzLabel::SMinus};
}

LocalUnitary::LocalUnitary(Amplitude u00, Amplitude u01, Amplitude u10,
                           Amplitude u11)
    : u_{u00, u01, u10, u11} {
  // U dagger U = I, checked entrywise.
  const Amplitude g00 = std::conj(u00) * u00 + std::conj(u10) * u10;
  const Amplitude g01 = std::conj(u00) * u01 + std::conj(u10) * u11;
  const Amplitude g11 = std::conj(u01) * u01 + std::conj(u11) * u11;
  if (std::abs(g00 - 1.0) > kNormTolerance ||
      std::abs(g11 - 1.0) > kNormTolerance ||
      std::abs(g01) > kNormTolerance) {
    throw std::invalid_argument("matrix is not unitary");
  }
}

LocalUnitary LocalUnitary::identity() {
  return LocalUnitary(1.0, 0.0, 0.0, 1.0);
}

LocalUnitary LocalUnitary::sigma_z() {
  return LocalUnitary(1.0, 0.0, 0.0, -1.0);
}

QubitRegister::QubitRegister(int n_qubits, std::span<const Amplitude> amps)
    : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 3) {
    throw std::invalid_argument("register holds 1 to 3 qubits");
  }
  if (amps.size() != static_cast<std::size_t>(1 << n_qubits)) {
    throw std::invalid_argument("amplitude count must be 2^n_qubits");
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (!std::isfinite(amps[i].real()) || !std::isfinite(amps[i].imag())) {
      throw std::invalid_argument("amplitude is not finite");
    }
    amp_[i] = amps[i];
    norm += std::norm(amps[i]);
  }
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw std::invalid_argument("state is not normalized");
  }
}

QubitRegister QubitRegister::basis_state(int n_qubits, unsigned index) {
  if (n_qubits < 1 || n_qubits > 3) {
    throw std::invalid_argument("register holds 1 to 3 qubits");
  }
  if (index >= (1u << n_qubits)) {
    throw std::out_of_range("basis index out of range");
  }
  std::array<Amplitude, 8> amps{};
  amps[index] = 1.0;
  return QubitRegister(n_qubits, std::span(amps.data(), std::size_t{1} << n_qubits));
}

Amplitude QubitRegister::amplitude(int index) const {
  if (index < 0 || index >= dim()) {
    throw std::out_of_range("basis index out of range");
  }
  return amp_[index];
}

int QubitRegister::bit_of(int index, int qubit) const {
  if (index < 0 || index >= dim()) {
    throw std::out_of_range("basis index out of range");
  }
  check_qubit(*this, qubit);
  return (index >> (n_qubits_ - 1 - qubit)) & 1;
}

double QubitRegister::norm_squared() const {
  double norm = 0.0;
  for (int i = 0; i < dim(); ++i) norm += std::norm(amp_[i]);
  return norm;
}

QubitRegister make_bell(BellLabel label) {
  // (|0y> + s|1y'>)/sqrt(2): phi pairs 00/11, psi pairs 01/10, the sign
  // rides on the higher basis index so the leading amplitude stays positive.
  std::array<Amplitude, 4> amps{};
  const bool psi = label == BellLabel::PsiPlus || label == BellLabel::PsiMinus;
  const bool minus =
      label == BellLabel::PhiMinus || label == BellLabel::PsiMinus;
  amps[psi ? 1 : 0] = kInvSqrt2;
  amps[psi ? 2 : 3] = minus ? -kInvSqrt2 : kInvSqrt2;
  return QubitRegister(2, amps);
}

QubitRegister make_ghz(GhzLabel label) {
  // (|b> + s|~b>)/sqrt(2) with b = 000, 001, 010, 011 for P, Q, R, S.
  static constexpr int kBase[] = {0, 0, 1, 1, 2, 2, 3, 3};
  const int idx = static_cast<int>(label);
  const int base = kBase[idx];
  const bool minus = (idx % 2) == 1;
  std::array<Amplitude, 8> amps{};
  amps[base] = kInvSqrt2;
  amps[7 - base] = minus ? -kInvSqrt2 : kInvSqrt2;
  return QubitRegister(3, amps);
}

QubitRegister apply_local(const QubitRegister& reg, int qubit,
                          const LocalUnitary& u) {
  check_qubit(reg, qubit);
  const int stride = 1 << (reg.n_qubits() - 1 - qubit);
  std::array<Amplitude, 8> amps{};
  for (int i = 0; i < reg.dim(); ++i) {
    if ((i & stride) != 0) continue;
    const Amplitude a0 = reg.amplitude(i);
    const Amplitude a1 = reg.amplitude(i | stride);
    amps[i] = u.at(0, 0) * a0 + u.at(0, 1) * a1;
    amps[i | stride] = u.at(1, 0) * a0 + u.at(1, 1) * a1;
  }
  return QubitRegister(reg.n_qubits(),
                       std::span(amps.data(), static_cast<std::size_t>(reg.dim())));
}

double OutcomeDistribution::probability(std::string_view outcome) const {
  auto it = entries_.find(std::string(outcome));
  return it == entries_.end() ? 0.0 : it->second;
}

double OutcomeDistribution::total() const {
  double sum = 0.0;
  for (const auto& [key, p] : entries_) sum += p;
  return sum;
}

OutcomeDistribution outcome_distribution(
    const QubitRegister& reg,
    std::span<const std::pair<int, Basis>> measurements) {
  if (measurements.empty()) {
    throw std::invalid_argument("no qubits listed for measurement");
  }
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    check_qubit(reg, measurements[i].first);
    for (std::size_t j = i + 1; j < measurements.size(); ++j) {
      if (measurements[i].first == measurements[j].first) {
        throw std::invalid_argument("duplicate qubit in measurement list");
      }
    }
  }

  QubitRegister rotated = reg;
  for (const auto& [qubit, basis] : measurements) {
    rotated = apply_local(rotated, qubit, analysis_unitary(basis));
  }

  OutcomeDistribution::Map entries;
  for (int i = 0; i < rotated.dim(); ++i) {
    const double p = std::norm(rotated.amplitude(i));
    if (p == 0.0) continue;
    std::string key;
    key.reserve(measurements.size());
    for (const auto& [qubit, basis] : measurements) {
      key.push_back(rotated.bit_of(i, qubit) ? '1' : '0');
    }
    entries[key] += p;
  }
  for (auto it = entries.begin(); it != entries.end();) {
    it = it->second < 1e-15 ? entries.erase(it) : std::next(it);
  }
  return OutcomeDistribution(std::move(entries));
}

Projection project(const QubitRegister& reg, int qubit, Basis basis,
                   int outcome) {
  check_qubit(reg, qubit);
  if (outcome != 0 && outcome != 1) {
    throw std::invalid_argument("outcome must be 0 or 1");
  }
  const auto v = basis_vectors(basis)[outcome];
  const int stride = 1 << (reg.n_qubits() - 1 - qubit);

  std::array<Amplitude, 8> amps{};
  double prob = 0.0;
  for (int i = 0; i < reg.dim(); ++i) {
    if ((i & stride) != 0) continue;
    const Amplitude c = std::conj(v[0]) * reg.amplitude(i) +
                        std::conj(v[1]) * reg.amplitude(i | stride);
    prob += std::norm(c);
    amps[i] = c * v[0];
    amps[i | stride] = c * v[1];
  }

  Projection result;
  result.probability = std::min(std::max(prob, 0.0), 1.0);
  if (prob >= 1e-15) {
    const double scale = 1.0 / std::sqrt(prob);
    for (auto& a : amps) a *= scale;
    result.state = QubitRegister(
        reg.n_qubits(), std::span(amps.data(), static_cast<std::size_t>(reg.dim())));
  }
  return result;
}

std::pair<int, QubitRegister> measure(const QubitRegister& reg, int qubit,
                                      Basis basis, double sample) {
  if (!(sample >= 0.0 && sample < 1.0)) {
    throw std::invalid_argument("sample must lie in [0, 1)");
  }
  const double p0 = project(reg, qubit, basis, 0).probability;
  int outcome = sample < p0 ? 0 : 1;
  Projection proj = project(reg, qubit, basis, outcome);
  if (!proj.state) {  // chosen branch numerically empty, take the other
    outcome = 1 - outcome;
    proj = project(reg, qubit, basis, outcome);
  }
  return {outcome, *proj.state};
}

double overlap_magnitude(const QubitRegister& a, const QubitRegister& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("register sizes differ");
  }
  Amplitude inner = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    inner += std::conj(a.amplitude(i)) * b.amplitude(i);
  }
  return std::abs(inner);
}

std::string to_debug_string(const QubitRegister& reg) {
  std::string out;
  char buf[80];
  for (int i = 0; i < reg.dim(); ++i) {
    const Amplitude a = reg.amplitude(i);
    if (std::abs(a) < 1e-15) continue;
    if (!out.empty()) out += " + ";
    if (std::abs(a.imag()) < 1e-15) {
      std::snprintf(buf, sizeof buf, "%.12g", a.real());
    } else {
      std::snprintf(buf, sizeof buf, "(%.12g%+.12gi)", a.real(), a.imag());
    }
    out += buf;
    out += '|';
    for (int q = 0; q < reg.n_qubits(); ++q) {
      out += reg.bit_of(i, q) ? '1' : '0';
    }
    out += '>';
  }
  return out.empty() ? "0" : out;
}

}  // namespace qscdc
