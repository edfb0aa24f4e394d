#include "qscdc/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

namespace qscdc {

std::string to_string(Scheme s) { return s == Scheme::A ? "A" : "B"; }

Scheme scheme_from_string(std::string_view s) {
  if (s == "A" || s == "a") return Scheme::A;
  if (s == "B" || s == "b") return Scheme::B;
  throw std::invalid_argument("unknown scheme: " + std::string(s));
}

std::string BellCode::text() const {
  return {static_cast<char>('0' + letter_bit()),
          static_cast<char>('0' + sign_bit())};
}

BellCode bell_encode(BellLabel label) {
  return BellCode{static_cast<std::uint8_t>(label)};
}

BellLabel bell_decode(BellCode code) {
  if (code.bits > 3) {
    throw std::invalid_argument("bell code out of range");
  }
  return static_cast<BellLabel>(code.bits);
}

int letter_bit(BellLabel label) { return bell_encode(label).letter_bit(); }
int sign_bit(BellLabel label) { return bell_encode(label).sign_bit(); }

int pauli_encode(PauliOp op) { return op == PauliOp::Sigma1 ? 1 : 0; }

PauliOp pauli_decode(int bit) {
  if (bit == 0) return PauliOp::Sigma0;
  if (bit == 1) return PauliOp::Sigma1;
  throw std::invalid_argument("pauli code must be 0 or 1");
}

LocalUnitary pauli_unitary(PauliOp op) {
  return op == PauliOp::Sigma1 ? LocalUnitary::sigma_z()
                               : LocalUnitary::identity();
}

namespace {

std::string kind_name(ClassicalMessage::Kind kind) {
  switch (kind) {
    case ClassicalMessage::Kind::AliceXAnnounce: return "alice_x_announce";
    case ClassicalMessage::Kind::AliceDelta:     return "alice_delta";
    case ClassicalMessage::Kind::BobMeasured:    return "bob_measured";
    case ClassicalMessage::Kind::CharlieReveal:  return "charlie_reveal";
  }
  throw std::invalid_argument("unknown message kind");
}

ClassicalMessage::Kind kind_from_name(std::string_view name) {
  if (name == "alice_x_announce") return ClassicalMessage::Kind::AliceXAnnounce;
  if (name == "alice_delta") return ClassicalMessage::Kind::AliceDelta;
  if (name == "bob_measured") return ClassicalMessage::Kind::BobMeasured;
  if (name == "charlie_reveal") return ClassicalMessage::Kind::CharlieReveal;
  throw std::invalid_argument("unknown message variant: " + std::string(name));
}

}  // namespace

std::string ClassicalMessage::text() const {
  std::string payload;
  switch (kind) {
    case Kind::AliceXAnnounce:
    case Kind::AliceDelta:
      if (!bit) throw std::invalid_argument("announcement carries no bit");
      payload = *bit ? "1" : "0";
      break;
    case Kind::BobMeasured:
      break;
    case Kind::CharlieReveal:
      if (!code) throw std::invalid_argument("reveal carries no code");
      payload = code->text();
      break;
  }
  return std::to_string(pair_id) + ":" + kind_name(kind) + ":" + payload;
}

ClassicalMessage ClassicalMessage::parse(std::string_view line) {
  const std::size_t first = line.find(':');
  if (first == std::string_view::npos) {
    throw std::invalid_argument("message line has no variant field");
  }
  const std::size_t second = line.find(':', first + 1);
  if (second == std::string_view::npos) {
    throw std::invalid_argument("message line has no payload field");
  }
  const std::string_view id_text = line.substr(0, first);
  const std::string_view name = line.substr(first + 1, second - first - 1);
  const std::string_view payload = line.substr(second + 1);

  ClassicalMessage msg;
  const auto [ptr, ec] = std::from_chars(
      id_text.data(), id_text.data() + id_text.size(), msg.pair_id);
  if (ec != std::errc{} || ptr != id_text.data() + id_text.size()) {
    throw std::invalid_argument("bad pair id: " + std::string(id_text));
  }
  msg.kind = kind_from_name(name);
  switch (msg.kind) {
    case Kind::AliceXAnnounce:
    case Kind::AliceDelta:
      if (payload != "0" && payload != "1") {
        throw std::invalid_argument("announcement payload must be 0 or 1");
      }
      msg.bit = payload == "1" ? 1 : 0;
      break;
    case Kind::BobMeasured:
      if (!payload.empty()) {
        throw std::invalid_argument("bob_measured carries no payload");
      }
      break;
    case Kind::CharlieReveal: {
      if (payload.size() != 2 || (payload[0] != '0' && payload[0] != '1') ||
          (payload[1] != '0' && payload[1] != '1')) {
        throw std::invalid_argument("reveal payload must be two bits");
      }
      const std::uint8_t bits = static_cast<std::uint8_t>(
          ((payload[0] - '0') << 1) | (payload[1] - '0'));
      msg.code = BellCode{bits};
      break;
    }
  }
  return msg;
}

std::string to_string(PairRole role) {
  return role == PairRole::Message ? "message" : "security_test";
}

namespace {

// First ceil(test_fraction * n_pairs) pairs are sacrificed; the epsilon
// absorbs representation error in products like 0.07 * 100.
int test_pair_count(int n_pairs, double test_fraction) {
  return static_cast<int>(std::ceil(test_fraction * n_pairs - 1e-9));
}

// Constraints that make a session impossible to execute at all, as opposed
// to the control-bypass diagnostics that a caller may deliberately override.
std::vector<std::string> structural_violations(const SessionConfig& config) {
  std::vector<std::string> violations;
  if (config.n_pairs <= 0) {
    violations.push_back("n_pairs must be positive");
  }
  if (!(config.test_fraction >= 0.0 && config.test_fraction < 1.0)) {
    violations.push_back("test_fraction must lie in [0, 1)");
  }
  if (config.label_pool.empty()) {
    violations.push_back("label_pool is empty");
  }
  if (config.secret_message.find_first_not_of("01") != std::string::npos) {
    violations.push_back("secret_message must contain only '0' and '1'");
  }
  if (violations.empty()) {
    const int capacity =
        config.n_pairs - test_pair_count(config.n_pairs, config.test_fraction);
    if (config.secret_message.size() > static_cast<std::size_t>(capacity)) {
      violations.push_back("secret_message exceeds message capacity");
    }
  }
  return violations;
}

}  // namespace

std::vector<std::string> validate_config(const SessionConfig& config) {
  std::vector<std::string> violations = structural_violations(config);

  const std::set<BellLabel> unique(config.label_pool.begin(),
                                   config.label_pool.end());
  if (unique.size() < config.label_pool.size()) {
    violations.push_back("label_pool contains duplicates");
  }
  if (unique.size() == 1) {
    violations.push_back("control bypass: single Bell state");
  } else if (config.scheme == Scheme::B && unique.size() == 2) {
    // Any two distinct Bell states share their parity in exactly one basis,
    // which hands the parties a reveal-free decoding rule.
    const BellLabel a = *unique.begin();
    const BellLabel b = *std::next(unique.begin());
    for (Basis basis : {Basis::Z, Basis::X, Basis::Y}) {
      if (expected_parity(a, basis) == expected_parity(b, basis)) {
        violations.push_back("control bypass: " + to_string(basis) +
                             "-basis correlated pool");
      }
    }
  }

  for (std::string& v : validate_attack(config.attack)) {
    violations.push_back(std::move(v));
  }
  if (config.attack.kind == AttackKind::GhzCoupling) {
    for (const BellLabel label : unique) {
      if (!config.attack.ghz_map.contains(label)) {
        violations.push_back("ghz map has no image for " + to_string(label));
      }
    }
  }
  return violations;
}

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string joined = "invalid session config";
  const char* sep = ": ";
  for (const std::string& v : violations) {
    joined += sep;
    joined += v;
    sep = "; ";
  }
  return joined;
}

}  // namespace

ConfigViolation::ConfigViolation(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)),
      violations_(std::move(violations)) {}

QubitRegister scheme_a_encode(const QubitRegister& pair_state,
                              int secret_bit) {
  if (pair_state.n_qubits() < 2) {
    throw std::invalid_argument("encoding expects a shared pair");
  }
  return apply_local(pair_state, 0, pauli_unitary(pauli_decode(secret_bit)));
}

std::pair<int, QubitRegister> scheme_a_alice_measure(
    const QubitRegister& pair_state, double sample) {
  if (pair_state.n_qubits() < 2) {
    throw std::invalid_argument("measurement expects a shared pair");
  }
  return measure(pair_state, 0, Basis::X, sample);
}

int scheme_a_bob_decode(BellLabel initial, int alice_x, int bob_x) {
  return (alice_x ^ bob_x) ^ sign_bit(initial);
}

std::pair<int, QubitRegister> scheme_b_alice(const QubitRegister& pair_state,
                                             int secret_bit, double sample) {
  if (pair_state.n_qubits() < 2) {
    throw std::invalid_argument("measurement expects a shared pair");
  }
  if (secret_bit != 0 && secret_bit != 1) {
    throw std::invalid_argument("secret bit must be 0 or 1");
  }
  auto [alice_z, post] = measure(pair_state, 0, Basis::Z, sample);
  return {alice_z ^ secret_bit, std::move(post)};
}

int scheme_b_bob_decode(BellLabel initial, int bob_z, int delta) {
  const int alice_z = bob_z ^ letter_bit(initial);
  return alice_z ^ delta;
}

SessionReport run_session(const SessionConfig& config, bool allow_invalid) {
  {
    std::vector<std::string> violations = validate_config(config);
    if (!violations.empty() && !allow_invalid) {
      throw ConfigViolation(std::move(violations));
    }
    std::vector<std::string> blocking = structural_violations(config);
    if (!blocking.empty()) {
      throw ConfigViolation(std::move(blocking));
    }
  }

  SessionReport report;
  report.config = config;
  RandomStream rng(config.seed);

  const int n_test = test_pair_count(config.n_pairs, config.test_fraction);

  // Distribution: Charlie draws a label per pair, Eve acts in transit.
  std::vector<QubitRegister> states;
  states.reserve(static_cast<std::size_t>(config.n_pairs));
  report.pairs.reserve(static_cast<std::size_t>(config.n_pairs));
  for (int i = 0; i < config.n_pairs; ++i) {
    const BellLabel label =
        config.label_pool[rng.index(config.label_pool.size())];
    AttackedPair attacked = apply_attack(config.attack, label, rng);

    PairRecord record;
    record.pair_id = i;
    record.initial_label = label;
    record.role = i < n_test ? PairRole::SecurityTest : PairRole::Message;
    if (config.attack.kind != AttackKind::None) {
      record.attack_applied = config.attack.tag();
    }
    if (attacked.eve) {
      attacked.eve->pair_id = i;
      report.eve_view.records.push_back(*attacked.eve);
    }
    report.pairs.push_back(std::move(record));
    states.push_back(std::move(attacked.state));
  }

  // Channel verification over the sacrificial prefix.
  std::vector<std::pair<PairRecord, QubitRegister>> test_inputs;
  test_inputs.reserve(static_cast<std::size_t>(n_test));
  for (int i = 0; i < n_test; ++i) {
    test_inputs.emplace_back(report.pairs[i], states[i]);
  }
  SecurityTestResult security = run_security_test(test_inputs, rng);
  report.verdict = security.verdict;
  report.test_records = std::move(security.records);
  for (const TestRecord& t : report.test_records) {
    PairRecord& rec = report.pairs[static_cast<std::size_t>(t.pair_id)];
    rec.alice_outcome = t.alice_bit;
    rec.bob_outcome = t.bob_bit;
    rec.messages.push_back({ClassicalMessage::Kind::CharlieReveal, t.pair_id,
                            std::nullopt, bell_encode(rec.initial_label)});
  }
  report.detection_flag =
      report.verdict.outcome == Verdict::Outcome::Tampered;
  if (report.detection_flag) {
    // Tampering aborts before any message bit is risked.
    report.recovery_accuracy = 0.0;
    return report;
  }

  // Transport: one secret bit per message pair, in pair-id order.
  const std::string& secret = config.secret_message;
  std::string recovered;
  recovered.reserve(secret.size());
  int correct = 0;
  for (std::size_t k = 0; k < secret.size(); ++k) {
    const int pair_id = n_test + static_cast<int>(k);
    PairRecord& rec = report.pairs[static_cast<std::size_t>(pair_id)];
    const int secret_bit = secret[k] == '1' ? 1 : 0;
    const BellLabel label = rec.initial_label;

    int announce = 0;  // Alice's public bit: X outcome (A) or delta (B)
    if (config.scheme == Scheme::A) {
      const QubitRegister encoded =
          scheme_a_encode(states[static_cast<std::size_t>(pair_id)],
                          secret_bit);
      auto [alice_x, after_alice] = scheme_a_alice_measure(encoded,
                                                           rng.unit());
      announce = alice_x;
      rec.alice_outcome = alice_x;
      rec.messages.push_back({ClassicalMessage::Kind::AliceXAnnounce, pair_id,
                              alice_x, std::nullopt});
      states[static_cast<std::size_t>(pair_id)] = std::move(after_alice);
    } else {
      auto [delta, after_alice] =
          scheme_b_alice(states[static_cast<std::size_t>(pair_id)],
                         secret_bit, rng.unit());
      announce = delta;
      rec.alice_outcome = delta ^ secret_bit;
      rec.messages.push_back({ClassicalMessage::Kind::AliceDelta, pair_id,
                              delta, std::nullopt});
      states[static_cast<std::size_t>(pair_id)] = std::move(after_alice);
    }

    QubitRegister& current = states[static_cast<std::size_t>(pair_id)];
    if (current.n_qubits() == 3) {
      auto [eve_bit, after_eve] =
          measure(current, 2, config.attack.eve_ancilla_basis, rng.unit());
      report.eve_view.records.push_back({pair_id, EveRecord::Origin::Ancilla,
                                         config.attack.eve_ancilla_basis,
                                         eve_bit});
      current = std::move(after_eve);
    }

    const Basis bob_basis = config.scheme == Scheme::A ? Basis::X : Basis::Z;
    auto [bob_bit, after_bob] = measure(current, 1, bob_basis, rng.unit());
    rec.bob_outcome = bob_bit;
    rec.messages.push_back(
        {ClassicalMessage::Kind::BobMeasured, pair_id, std::nullopt,
         std::nullopt});
    current = std::move(after_bob);

    if (config.charlie_cooperates) {
      rec.messages.push_back({ClassicalMessage::Kind::CharlieReveal, pair_id,
                              std::nullopt, bell_encode(label)});
      const int decoded =
          config.scheme == Scheme::A
              ? scheme_a_bob_decode(label, announce, bob_bit)
              : scheme_b_bob_decode(label, bob_bit, announce);
      rec.decoded_bit = decoded;
      recovered.push_back(decoded ? '1' : '0');
      if (decoded == secret_bit) ++correct;
    } else if (secret_bit == 0) {
      ++correct;  // Bob's constant fallback guess without the reveal
    }
  }

  if (config.charlie_cooperates) {
    report.recovered_message = std::move(recovered);
  }
  report.recovery_accuracy =
      secret.empty() ? 1.0
                     : static_cast<double>(correct) /
                           static_cast<double>(secret.size());
  return report;
}

}  // namespace qscdc
