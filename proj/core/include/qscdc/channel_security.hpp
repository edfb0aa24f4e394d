// Channel verification: sacrifice a subset of pairs, measure both sides in
// a random shared basis (Z or X), compare against the Bell correlation
// pattern once the controller reveals the labels, abort on any mismatch.

#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qscdc/adversary.hpp"
#include "qscdc/random.hpp"
#include "qscdc/statevec.hpp"

namespace qscdc {

struct PairRecord;  // protocol.hpp

enum class Parity { Same, Anti };

std::string to_string(Parity p);

struct CorrelationExpectation {
  BellLabel label;
  Basis basis;
  Parity parity;
};

// Expected outcome parity when both qubits of a Bell pair are measured in
// the same basis. Defined for all twelve (label, basis) combinations.
Parity expected_parity(BellLabel label, Basis basis);

// The full twelve-entry table, label-major.
std::array<CorrelationExpectation, 12> correlation_table();

struct TestRecord {
  int pair_id = 0;
  BellLabel label = BellLabel::PhiPlus;
  Basis basis = Basis::Z;
  int alice_bit = 0;
  int bob_bit = 0;
  bool pass = true;

  // Canonical CSV line: pair_id,label,basis,alice_bit,bob_bit,pass
  std::string csv_line() const;
};

struct Verdict {
  enum class Outcome { Pass, Tampered };
  int tested = 0;
  int mismatches = 0;
  Outcome outcome = Outcome::Pass;
};

std::string to_string(Verdict::Outcome o);

struct SecurityTestResult {
  Verdict verdict;
  std::vector<TestRecord> records;
};

// Runs the comparison over the sacrificial pairs. Per pair: draw Z or X
// uniformly, measure Alice's then Bob's qubit in it, reveal the label, and
// check the parity. A present Eve ancilla is left alone.
SecurityTestResult run_security_test(
    const std::vector<std::pair<PairRecord, QubitRegister>>& test_pairs,
    RandomStream& rng);

// Exact per-pair probability that one test pair under `attack` fails the
// parity check, averaged over the uniform Z/X basis choice. Enumerates the
// attack's branch ensemble; no sampling.
double detection_probability_exact(const AttackModel& attack, BellLabel label);

}  // namespace qscdc
