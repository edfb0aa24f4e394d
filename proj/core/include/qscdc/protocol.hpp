// The two conditional direct-communication schemes, driven per pair:
//
//  scheme A: the controller distributes Bell pairs, Alice encodes her bit
//    with a phase flip and measures in X, announcing the outcome; Bob
//    measures in X and combines both outcomes with the revealed label.
//  scheme B: both parties measure in Z; Alice announces whether her outcome
//    equals her bit; Bob infers her outcome from his own plus the revealed
//    label.
//
// Either way the revealed Bell label is the decoding key, which is what
// keeps the controller in charge.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qscdc/adversary.hpp"
#include "qscdc/channel_security.hpp"
#include "qscdc/statevec.hpp"

namespace qscdc {

enum class Scheme { A, B };

std::string to_string(Scheme s);
Scheme scheme_from_string(std::string_view s);

// Two-bit Bell codeword: high bit is the letter (0 phi, 1 psi), low bit the
// sign (0 plus, 1 minus).
struct BellCode {
  std::uint8_t bits = 0;

  int letter_bit() const { return (bits >> 1) & 1; }
  int sign_bit() const { return bits & 1; }
  std::string text() const;  // "00".."11"
};

BellCode bell_encode(BellLabel label);
// Throws std::invalid_argument if code.bits > 3.
BellLabel bell_decode(BellCode code);

int letter_bit(BellLabel label);
int sign_bit(BellLabel label);

// The two encoding operations and their one-bit codec.
enum class PauliOp { Sigma0, Sigma1 };

int pauli_encode(PauliOp op);
PauliOp pauli_decode(int bit);
LocalUnitary pauli_unitary(PauliOp op);

struct ClassicalMessage {
  enum class Kind { AliceXAnnounce, AliceDelta, BobMeasured, CharlieReveal };

  Kind kind = Kind::BobMeasured;
  int pair_id = 0;
  std::optional<int> bit;        // AliceXAnnounce / AliceDelta
  std::optional<BellCode> code;  // CharlieReveal

  // Canonical text form "pair_id:variant:payload", e.g. "3:alice_delta:1",
  // "3:charlie_reveal:01", "3:bob_measured:".
  std::string text() const;
  static ClassicalMessage parse(std::string_view line);
};

enum class PairRole { Message, SecurityTest };

std::string to_string(PairRole role);

struct PairRecord {
  int pair_id = 0;
  BellLabel initial_label = BellLabel::PhiPlus;
  PairRole role = PairRole::Message;
  std::optional<std::string> attack_applied;
  std::optional<int> alice_outcome;
  std::optional<int> bob_outcome;
  std::vector<ClassicalMessage> messages;
  std::optional<int> decoded_bit;
};

struct SessionConfig {
  Scheme scheme = Scheme::B;
  int n_pairs = 0;
  std::vector<BellLabel> label_pool{BellLabel::PhiPlus, BellLabel::PhiMinus,
                                    BellLabel::PsiPlus, BellLabel::PsiMinus};
  double test_fraction = 0.25;
  std::string secret_message;
  std::uint64_t seed = 1;
  AttackModel attack;
  bool charlie_cooperates = true;
};

// Returns every violated constraint (empty = usable config): pool minimums
// with the named bypass diagnoses, message capacity, ranges, and the
// configured attack's own constraints.
std::vector<std::string> validate_config(const SessionConfig& config);

// Thrown by run_session on a config it refuses to run.
class ConfigViolation : public std::runtime_error {
 public:
  explicit ConfigViolation(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct SessionReport {
  SessionConfig config;
  std::vector<PairRecord> pairs;
  Verdict verdict;
  std::vector<TestRecord> test_records;
  // Present iff charlie_cooperates and the verdict is pass.
  std::optional<std::string> recovered_message;
  // Fraction of message bits Bob got right; with reveals withheld this is
  // the accuracy of his constant fallback guess (bit 0), and 0 when the
  // session aborted before transport.
  double recovery_accuracy = 0.0;
  bool detection_flag = false;
  EveView eve_view;
};

// Applies sigma0/sigma1 to Alice's qubit (slot 0). At least two qubits;
// extra slots (an eavesdropper's ancilla) ride along untouched.
QubitRegister scheme_a_encode(const QubitRegister& pair_state, int secret_bit);

// Alice's X measurement; the outcome is what she announces.
std::pair<int, QubitRegister> scheme_a_alice_measure(
    const QubitRegister& pair_state, double sample);

// (alice_x XOR bob_x) XOR sign_bit(initial): the X outcomes agree exactly
// when the final state's sign bit is 0, so their parity reads the final
// sign, and the initial sign marks whether Alice flipped it.
int scheme_a_bob_decode(BellLabel initial, int alice_x, int bob_x);

// Alice's Z measurement yields a; returns the announced delta = a XOR
// secret_bit (first element) along with the post-measurement state.
std::pair<int, QubitRegister> scheme_b_alice(const QubitRegister& pair_state,
                                             int secret_bit, double sample);

// Inferred alice_z = bob_z XOR letter_bit(initial); returns alice_z XOR delta.
int scheme_b_bob_decode(BellLabel initial, int bob_z, int delta);

// Runs a full session: label draws, distribution under the configured
// attack, the security test (any mismatch aborts before transport), then
// message transport with per-pair reveals when the controller cooperates.
// Throws ConfigViolation unless allow_invalid, which exists to demonstrate
// deliberately degenerate configurations.
SessionReport run_session(const SessionConfig& config,
                          bool allow_invalid = false);

}  // namespace qscdc
