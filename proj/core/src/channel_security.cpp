#include "qscdc/channel_security.hpp"

#include <sstream>
#include <stdexcept>

#include "qscdc/protocol.hpp"

namespace qscdc {

Parity expected_parity(BellLabel label, Basis basis) {
  // Spelled out rather than computed so the table itself is the reference
  // the rest of the library is checked against.
  switch (label) {
    case BellLabel::PhiPlus:
      switch (basis) {
        case Basis::Z: return Parity::Same;
        case Basis::X: return Parity::Same;
        case Basis::Y: return Parity::Anti;
      }
      break;
    case BellLabel::PhiMinus:
      switch (basis) {
        case Basis::Z: return Parity::Same;
        case Basis::X: return Parity::Anti;
        case Basis::Y: return Parity::Same;
      }
      break;
    case BellLabel::PsiPlus:
      switch (basis) {
        case Basis::Z: return Parity::Anti;
        case Basis::X: return Parity::Same;
        case Basis::Y: return Parity::Same;
      }
      break;
    case BellLabel::PsiMinus:
      switch (basis) {
        case Basis::Z: return Parity::Anti;
        case Basis::X: return Parity::Anti;
        case Basis::Y: return Parity::Anti;
      }
      break;
  }
  throw std::invalid_argument("unknown label or basis");
}

std::array<CorrelationExpectation, 12> correlation_table() {
  std::array<CorrelationExpectation, 12> table{};
  std::size_t i = 0;
  for (BellLabel label : all_bell_labels()) {
    for (Basis basis : {Basis::Z, Basis::X, Basis::Y}) {
      table[i++] = {label, basis, expected_parity(label, basis)};
    }
  }
  return table;
}

std::string to_string(Parity parity) {
  return parity == Parity::Same ? "same" : "anti";
}

std::string to_string(Verdict::Outcome o) {
  return o == Verdict::Outcome::Pass ? "pass" : "tampered";
}

std::string TestRecord::csv_line() const {
  std::ostringstream out;
  out << pair_id << ',' << to_string(label) << ',' << to_string(basis) << ','
      << alice_bit << ',' << bob_bit << ',' << (pass ? 1 : 0);
  return out.str();
}

SecurityTestResult run_security_test(
    const std::vector<std::pair<PairRecord, QubitRegister>>& test_pairs,
    RandomStream& rng) {
  SecurityTestResult result;
  result.verdict.tested = static_cast<int>(test_pairs.size());
  for (const auto& [record, state] : test_pairs) {
    const Basis basis = rng.bit() ? Basis::X : Basis::Z;
    auto [alice_bit, after_alice] = measure(state, 0, basis, rng.unit());
    auto [bob_bit, after_both] = measure(after_alice, 1, basis, rng.unit());
    const Parity want = expected_parity(record.initial_label, basis);
    const Parity got = alice_bit == bob_bit ? Parity::Same : Parity::Anti;
    const bool pass = want == got;
    result.records.push_back(
        {record.pair_id, record.initial_label, basis, alice_bit, bob_bit,
         pass});
    if (!pass) ++result.verdict.mismatches;
  }
  result.verdict.outcome = result.verdict.mismatches == 0
                               ? Verdict::Outcome::Pass
                               : Verdict::Outcome::Tampered;
  return result;
}

double detection_probability_exact(const AttackModel& attack,
                                   BellLabel label) {
  double detect = 0.0;
  for (const AttackBranch& branch : attack_branches(attack, label)) {
    for (Basis basis : {Basis::Z, Basis::X}) {
      const std::vector<std::pair<int, Basis>> meas{{0, basis}, {1, basis}};
      const OutcomeDistribution dist =
          outcome_distribution(branch.state, meas);
      const Parity want = expected_parity(label, basis);
      double mismatch = 0.0;
      for (const auto& [key, prob] : dist.entries()) {
        const Parity got = key[0] == key[1] ? Parity::Same : Parity::Anti;
        if (got != want) mismatch += prob;
      }
      detect += branch.probability * 0.5 * mismatch;
    }
  }
  return detect;
}

}  // namespace qscdc
