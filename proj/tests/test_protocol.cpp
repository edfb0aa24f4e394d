#include "qscdc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "qscdc/random.hpp"

using namespace qscdc;

namespace {

bool contains(const std::vector<std::string>& violations,
              const std::string& needle) {
  return std::find(violations.begin(), violations.end(), needle) !=
         violations.end();
}

// Reads the single forced outcome of measuring `qubit` in `basis`; fails the
// test if the outcome is not deterministic.
int forced_bit(const QubitRegister& reg, int qubit, Basis basis) {
  const std::vector<std::pair<int, Basis>> meas{{qubit, basis}};
  const OutcomeDistribution dist = outcome_distribution(reg, meas);
  const int bit = dist.probability("1") > 0.5 ? 1 : 0;
  REQUIRE(dist.probability(bit ? "1" : "0") == doctest::Approx(1.0).epsilon(1e-12));
  return bit;
}

std::string random_bits(std::uint64_t seed, int count) {
  RandomStream stream(seed);
  std::string bits;
  bits.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) bits += stream.bit() ? '1' : '0';
  return bits;
}

SessionConfig valid_config() {
  SessionConfig config;
  config.scheme = Scheme::B;
  config.n_pairs = 16;
  config.test_fraction = 0.25;
  config.secret_message = "100101010111";
  config.seed = 1;
  return config;
}

}  // namespace

TEST_CASE("bell label codec") {
  struct Row {
    BellLabel label;
    int bits;
    const char* text;
    int letter;
    int sign;
  };
  const Row rows[] = {
      {BellLabel::PhiPlus, 0, "00", 0, 0},
      {BellLabel::PhiMinus, 1, "01", 0, 1},
      {BellLabel::PsiPlus, 2, "10", 1, 0},
      {BellLabel::PsiMinus, 3, "11", 1, 1},
  };
  for (const Row& row : rows) {
    const BellCode code = bell_encode(row.label);
    CHECK(code.bits == row.bits);
    CHECK(code.text() == row.text);
    CHECK(code.letter_bit() == row.letter);
    CHECK(code.sign_bit() == row.sign);
    CHECK(letter_bit(row.label) == row.letter);
    CHECK(sign_bit(row.label) == row.sign);
    CHECK(bell_decode(code) == row.label);
  }
  CHECK_THROWS_AS(bell_decode(BellCode{4}), std::invalid_argument);
  CHECK_THROWS_AS(bell_decode(BellCode{255}), std::invalid_argument);
}

TEST_CASE("pauli codec and unitaries") {
  CHECK(pauli_encode(PauliOp::Sigma0) == 0);
  CHECK(pauli_encode(PauliOp::Sigma1) == 1);
  CHECK(pauli_decode(0) == PauliOp::Sigma0);
  CHECK(pauli_decode(1) == PauliOp::Sigma1);
  CHECK_THROWS_AS(pauli_decode(2), std::invalid_argument);
  CHECK_THROWS_AS(pauli_decode(-1), std::invalid_argument);

  // sigma1 on the first qubit exchanges plus and minus labels.
  const QubitRegister flipped =
      apply_local(make_bell(BellLabel::PhiPlus), 0,
                  pauli_unitary(PauliOp::Sigma1));
  CHECK(overlap_magnitude(flipped, make_bell(BellLabel::PhiMinus)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const QubitRegister kept = apply_local(
      make_bell(BellLabel::PsiMinus), 0, pauli_unitary(PauliOp::Sigma0));
  CHECK(overlap_magnitude(kept, make_bell(BellLabel::PsiMinus)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("classical message text form") {
  SUBCASE("canonical examples") {
    ClassicalMessage delta;
    delta.kind = ClassicalMessage::Kind::AliceDelta;
    delta.pair_id = 3;
    delta.bit = 1;
    CHECK(delta.text() == "3:alice_delta:1");

    ClassicalMessage reveal;
    reveal.kind = ClassicalMessage::Kind::CharlieReveal;
    reveal.pair_id = 3;
    reveal.code = bell_encode(BellLabel::PhiMinus);
    CHECK(reveal.text() == "3:charlie_reveal:01");

    ClassicalMessage measured;
    measured.kind = ClassicalMessage::Kind::BobMeasured;
    measured.pair_id = 3;
    CHECK(measured.text() == "3:bob_measured:");

    ClassicalMessage announce;
    announce.kind = ClassicalMessage::Kind::AliceXAnnounce;
    announce.pair_id = 7;
    announce.bit = 0;
    CHECK(announce.text() == "7:alice_x_announce:0");
  }

  SUBCASE("parse round trip") {
    for (const char* line :
         {"0:alice_x_announce:1", "12:alice_delta:0", "5:bob_measured:",
          "9:charlie_reveal:11"}) {
      CHECK(ClassicalMessage::parse(line).text() == line);
    }
  }

  SUBCASE("parsed fields") {
    const ClassicalMessage msg = ClassicalMessage::parse("9:charlie_reveal:10");
    CHECK(msg.pair_id == 9);
    CHECK(msg.kind == ClassicalMessage::Kind::CharlieReveal);
    REQUIRE(msg.code.has_value());
    CHECK(bell_decode(*msg.code) == BellLabel::PsiPlus);
  }

  SUBCASE("malformed lines are rejected") {
    for (const char* line :
         {"", "3", "3:alice_delta", "x:alice_delta:1", ":alice_delta:1",
          "3:unknown_kind:1", "3:alice_delta:2", "3:alice_delta:",
          "3:bob_measured:1", "3:charlie_reveal:0", "3:charlie_reveal:012",
          "3:charlie_reveal:ab"}) {
      CAPTURE(line);
      CHECK_THROWS_AS(ClassicalMessage::parse(line), std::invalid_argument);
    }
  }
}

TEST_CASE("config validation") {
  SUBCASE("a full pool with capacity to spare is clean") {
    CHECK(validate_config(valid_config()).empty());
  }

  SUBCASE("single-label pools surrender control") {
    SessionConfig config = valid_config();
    config.scheme = Scheme::A;
    config.label_pool = {BellLabel::PhiPlus};
    CHECK(contains(validate_config(config),
                   "control bypass: single Bell state"));
    config.scheme = Scheme::B;
    CHECK(contains(validate_config(config),
                   "control bypass: single Bell state"));
  }

  SUBCASE("two-label pools expose their shared-parity basis under scheme B") {
    struct Row {
      BellLabel a;
      BellLabel b;
      const char* violation;
    };
    const Row rows[] = {
        {BellLabel::PhiMinus, BellLabel::PsiPlus,
         "control bypass: Y-basis correlated pool"},
        {BellLabel::PhiPlus, BellLabel::PsiMinus,
         "control bypass: Y-basis correlated pool"},
        {BellLabel::PhiPlus, BellLabel::PhiMinus,
         "control bypass: Z-basis correlated pool"},
        {BellLabel::PsiPlus, BellLabel::PsiMinus,
         "control bypass: Z-basis correlated pool"},
        {BellLabel::PhiPlus, BellLabel::PsiPlus,
         "control bypass: X-basis correlated pool"},
        {BellLabel::PhiMinus, BellLabel::PsiMinus,
         "control bypass: X-basis correlated pool"},
    };
    for (const Row& row : rows) {
      SessionConfig config = valid_config();
      config.label_pool = {row.a, row.b};
      CAPTURE(row.violation);
      CHECK(contains(validate_config(config), row.violation));
    }
  }

  SUBCASE("scheme A accepts any two distinct labels") {
    SessionConfig config = valid_config();
    config.scheme = Scheme::A;
    config.label_pool = {BellLabel::PhiMinus, BellLabel::PsiPlus};
    CHECK(validate_config(config).empty());
  }

  SUBCASE("scheme B accepts any three labels") {
    SessionConfig config = valid_config();
    config.label_pool = {BellLabel::PhiPlus, BellLabel::PhiMinus,
                         BellLabel::PsiPlus};
    CHECK(validate_config(config).empty());
  }

  SUBCASE("range and content checks") {
    SessionConfig config = valid_config();
    config.n_pairs = 0;
    CHECK(contains(validate_config(config), "n_pairs must be positive"));

    config = valid_config();
    config.test_fraction = 1.0;
    CHECK(contains(validate_config(config),
                   "test_fraction must lie in [0, 1)"));
    config.test_fraction = -0.1;
    CHECK(contains(validate_config(config),
                   "test_fraction must lie in [0, 1)"));

    config = valid_config();
    config.label_pool.clear();
    CHECK(contains(validate_config(config), "label_pool is empty"));

    config = valid_config();
    config.label_pool.push_back(BellLabel::PhiPlus);
    CHECK(contains(validate_config(config), "label_pool contains duplicates"));

    config = valid_config();
    config.secret_message = "10021";
    CHECK(contains(validate_config(config),
                   "secret_message must contain only '0' and '1'"));
  }

  SUBCASE("message capacity accounts for the sacrificial subset") {
    SessionConfig config = valid_config();
    config.n_pairs = 8;
    config.test_fraction = 0.25;  // 2 test pairs, capacity 6
    config.secret_message = "101010";
    CHECK(validate_config(config).empty());
    config.secret_message = "1010101";
    CHECK(contains(validate_config(config),
                   "secret_message exceeds message capacity"));
  }

  SUBCASE("ghz attack must cover the pool and keep Z statistics") {
    SessionConfig config = valid_config();
    config.attack.kind = AttackKind::GhzCoupling;
    config.attack.ghz_map.erase(BellLabel::PsiMinus);
    CHECK(contains(validate_config(config),
                   "ghz map has no image for psi-"));

    config = valid_config();
    config.attack.kind = AttackKind::GhzCoupling;
    config.attack.ghz_map[BellLabel::PhiPlus] = GhzLabel::SPlus;
    const std::vector<std::string> violations = validate_config(config);
    CHECK(std::any_of(violations.begin(), violations.end(),
                      [](const std::string& v) {
                        return v.find("breaks Z statistics") !=
                               std::string::npos;
                      }));
  }

  SUBCASE("violations accumulate") {
    SessionConfig config;
    config.n_pairs = 0;
    config.test_fraction = 2.0;
    config.label_pool = {BellLabel::PhiPlus};
    CHECK(validate_config(config).size() >= 3);
  }
}

TEST_CASE("phase-flip scheme operations") {
  SUBCASE("encoding maps between sign partners") {
    CHECK(overlap_magnitude(scheme_a_encode(make_bell(BellLabel::PhiPlus), 1),
                            make_bell(BellLabel::PhiMinus)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(overlap_magnitude(scheme_a_encode(make_bell(BellLabel::PsiMinus), 0),
                            make_bell(BellLabel::PsiMinus)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(overlap_magnitude(scheme_a_encode(make_bell(BellLabel::PsiPlus), 1),
                            make_bell(BellLabel::PsiMinus)) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("sender X measurement halves the state and steers the receiver") {
    const QubitRegister state = make_bell(BellLabel::PhiMinus);
    for (int outcome : {0, 1}) {
      const Projection branch = project(state, 0, Basis::X, outcome);
      CHECK(branch.probability == doctest::Approx(0.5).epsilon(1e-12));
    }
    // announce 0 on the anti-correlated-in-X pair forces the receiver to 1.
    auto [announce, post] = scheme_a_alice_measure(state, 0.25);
    CHECK(announce == 0);
    CHECK(forced_bit(post, 1, Basis::X) == 1);
  }

  SUBCASE("an X eigenstate announces deterministically") {
    const double s = 1.0 / std::sqrt(2.0);
    const std::vector<Amplitude> plus_zero{s, 0.0, s, 0.0};
    const QubitRegister state(2, plus_zero);
    auto [announce, post] = scheme_a_alice_measure(state, 0.999);
    CHECK(announce == 0);
  }

  SUBCASE("decode identities") {
    CHECK(scheme_a_bob_decode(BellLabel::PhiPlus, 0, 1) == 1);
    CHECK(scheme_a_bob_decode(BellLabel::PhiPlus, 0, 0) == 0);
    CHECK(scheme_a_bob_decode(BellLabel::PsiMinus, 0, 0) == 1);
  }

  SUBCASE("round trip is exact over all labels, bits, and branches") {
    for (BellLabel label : all_bell_labels()) {
      for (int bit : {0, 1}) {
        const QubitRegister encoded =
            scheme_a_encode(make_bell(label), bit);
        for (int alice_x : {0, 1}) {
          const Projection branch = project(encoded, 0, Basis::X, alice_x);
          REQUIRE(branch.probability ==
                  doctest::Approx(0.5).epsilon(1e-12));
          REQUIRE(branch.state.has_value());
          const int bob_x = forced_bit(*branch.state, 1, Basis::X);
          CAPTURE(to_string(label));
          CAPTURE(bit);
          CAPTURE(alice_x);
          CHECK(scheme_a_bob_decode(label, alice_x, bob_x) == bit);
        }
      }
    }
  }
}

TEST_CASE("measurement-comparison scheme operations") {
  SUBCASE("delta is the parity of outcome and secret") {
    // Forcing the Z outcome through the sample argument.
    auto [delta00, post00] =
        scheme_b_alice(make_bell(BellLabel::PhiPlus), 0, 0.25);
    CHECK(delta00 == 0);
    auto [delta01, post01] =
        scheme_b_alice(make_bell(BellLabel::PhiPlus), 1, 0.25);
    CHECK(delta01 == 1);
    auto [delta11, post11] =
        scheme_b_alice(make_bell(BellLabel::PhiPlus), 1, 0.75);
    CHECK(delta11 == 0);
  }

  SUBCASE("decode identities") {
    CHECK(scheme_b_bob_decode(BellLabel::PhiPlus, 0, 1) == 1);
    CHECK(scheme_b_bob_decode(BellLabel::PsiPlus, 1, 0) == 0);
    CHECK(scheme_b_bob_decode(BellLabel::PhiPlus, 0, 0) == 0);
  }

  SUBCASE("round trip is exact over all labels, bits, and outcomes") {
    for (BellLabel label : all_bell_labels()) {
      for (int bit : {0, 1}) {
        for (int alice_z : {0, 1}) {
          auto [delta, post] = scheme_b_alice(make_bell(label), bit,
                                              alice_z == 0 ? 0.25 : 0.75);
          CHECK(delta == (alice_z ^ bit));
          const int bob_z = forced_bit(post, 1, Basis::Z);
          CAPTURE(to_string(label));
          CAPTURE(bit);
          CAPTURE(alice_z);
          CHECK(scheme_b_bob_decode(label, bob_z, delta) == bit);
        }
      }
    }
  }

  SUBCASE("invalid secret bit is rejected") {
    CHECK_THROWS_AS(scheme_b_alice(make_bell(BellLabel::PhiPlus), 2, 0.5),
                    std::invalid_argument);
  }
}

TEST_CASE("session round trips recover every bit") {
  for (Scheme scheme : {Scheme::A, Scheme::B}) {
    SessionConfig config;
    config.scheme = scheme;
    config.n_pairs = 280;
    config.test_fraction = 0.25;  // 70 test pairs, capacity 210
    config.secret_message = random_bits(99, 200);
    config.seed = 20240517;

    const SessionReport report = run_session(config);
    CAPTURE(to_string(scheme));
    CHECK(report.verdict.outcome == Verdict::Outcome::Pass);
    CHECK(report.verdict.tested == 70);
    CHECK_FALSE(report.detection_flag);
    REQUIRE(report.recovered_message.has_value());
    CHECK(*report.recovered_message == config.secret_message);
    CHECK(report.recovery_accuracy == 1.0);
    CHECK(report.eve_view.records.empty());
  }
}

TEST_CASE("session with all-zero message recovers all zeros") {
  SessionConfig config;
  config.scheme = Scheme::A;
  config.n_pairs = 40;
  config.test_fraction = 0.25;
  config.secret_message = std::string(30, '0');
  const SessionReport report = run_session(config);
  REQUIRE(report.recovered_message.has_value());
  CHECK(*report.recovered_message == config.secret_message);
  CHECK(report.recovery_accuracy == 1.0);
}

TEST_CASE("recovered bit order matches message-pair order") {
  SessionConfig config = valid_config();
  config.secret_message = "110010";
  const SessionReport report = run_session(config);
  REQUIRE(report.recovered_message.has_value());
  const int n_test = report.verdict.tested;
  for (std::size_t k = 0; k < report.recovered_message->size(); ++k) {
    const PairRecord& rec = report.pairs[static_cast<std::size_t>(n_test) + k];
    CHECK(rec.role == PairRole::Message);
    REQUIRE(rec.decoded_bit.has_value());
    CHECK(*rec.decoded_bit == (*report.recovered_message)[k] - '0');
  }
}

TEST_CASE("message pairs carry the expected transcript") {
  SessionConfig config = valid_config();
  config.scheme = Scheme::B;
  const SessionReport report = run_session(config);
  const PairRecord& rec =
      report.pairs[static_cast<std::size_t>(report.verdict.tested)];
  REQUIRE(rec.messages.size() == 3);
  CHECK(rec.messages[0].kind == ClassicalMessage::Kind::AliceDelta);
  CHECK(rec.messages[1].kind == ClassicalMessage::Kind::BobMeasured);
  CHECK(rec.messages[2].kind == ClassicalMessage::Kind::CharlieReveal);
  for (const ClassicalMessage& msg : rec.messages) {
    CHECK(msg.pair_id == rec.pair_id);
  }
  // The scheme with X announcements sends its own first message kind.
  config.scheme = Scheme::A;
  const SessionReport report_a = run_session(config);
  const PairRecord& rec_a =
      report_a.pairs[static_cast<std::size_t>(report_a.verdict.tested)];
  REQUIRE(rec_a.messages.size() == 3);
  CHECK(rec_a.messages[0].kind == ClassicalMessage::Kind::AliceXAnnounce);
}

TEST_CASE("non-cooperating controller leaves bits undetermined") {
  for (Scheme scheme : {Scheme::A, Scheme::B}) {
    SessionConfig config;
    config.scheme = scheme;
    config.n_pairs = 13334;
    config.test_fraction = 0.25;  // capacity 10000
    config.secret_message = random_bits(7, 10000);
    config.charlie_cooperates = false;
    config.seed = 1234 + static_cast<std::uint64_t>(scheme);

    const SessionReport report = run_session(config);
    CAPTURE(to_string(scheme));
    CHECK_FALSE(report.recovered_message.has_value());
    // Best constant guess: accuracy near one half.
    CHECK(report.recovery_accuracy >= 0.47);
    CHECK(report.recovery_accuracy <= 0.53);
    // No reveal, no decode, and only two public messages per pair.
    const PairRecord& rec =
        report.pairs[static_cast<std::size_t>(report.verdict.tested)];
    CHECK_FALSE(rec.decoded_bit.has_value());
    CHECK(rec.messages.size() == 2);
  }
}

TEST_CASE("degenerate pool lets both parties agree without the controller") {
  // The two-label pool rejected by validation really does correlate the
  // parties in Y regardless of which label was drawn.
  for (BellLabel label : {BellLabel::PhiMinus, BellLabel::PsiPlus}) {
    const std::vector<std::pair<int, Basis>> meas{{0, Basis::Y},
                                                  {1, Basis::Y}};
    const OutcomeDistribution dist =
        outcome_distribution(make_bell(label), meas);
    const double agree = dist.probability("00") + dist.probability("11");
    CHECK(agree == doctest::Approx(1.0).epsilon(1e-12));
  }

  SessionConfig config = valid_config();
  config.label_pool = {BellLabel::PhiMinus, BellLabel::PsiPlus};
  CHECK_THROWS_AS(run_session(config), ConfigViolation);
  // The override exists exactly to demonstrate such degenerate setups.
  const SessionReport report = run_session(config, /*allow_invalid=*/true);
  CHECK(report.verdict.outcome == Verdict::Outcome::Pass);
}

TEST_CASE("run_session rejects invalid configs") {
  SessionConfig config = valid_config();
  config.scheme = Scheme::A;
  config.label_pool = {BellLabel::PhiPlus};
  try {
    run_session(config);
    FAIL("expected a config violation");
  } catch (const ConfigViolation& e) {
    CHECK(contains(e.violations(), "control bypass: single Bell state"));
    CHECK(std::string(e.what()).find("control bypass") != std::string::npos);
  }

  // Structural problems stay fatal even under the override.
  SessionConfig broken = valid_config();
  broken.n_pairs = 0;
  CHECK_THROWS_AS(run_session(broken, /*allow_invalid=*/true),
                  ConfigViolation);
  broken = valid_config();
  broken.secret_message = std::string(20, '1');  // capacity is 12
  CHECK_THROWS_AS(run_session(broken, /*allow_invalid=*/true),
                  ConfigViolation);
}

TEST_CASE("sacrificial subset size rounds up") {
  struct Row {
    int n_pairs;
    double fraction;
    int expected;
  };
  const Row rows[] = {
      {8, 0.25, 2}, {10, 0.25, 3}, {100, 0.07, 7}, {16, 0.0, 0}, {5, 0.5, 3},
  };
  for (const Row& row : rows) {
    SessionConfig config = valid_config();
    config.n_pairs = row.n_pairs;
    config.test_fraction = row.fraction;
    config.secret_message = "";
    const SessionReport report = run_session(config);
    CAPTURE(row.n_pairs);
    CAPTURE(row.fraction);
    CHECK(report.verdict.tested == row.expected);
    CHECK(static_cast<int>(report.test_records.size()) == row.expected);
  }
}

TEST_CASE("empty message sessions still verify the channel") {
  SessionConfig config = valid_config();
  config.secret_message.clear();
  const SessionReport report = run_session(config);
  CHECK(report.verdict.outcome == Verdict::Outcome::Pass);
  REQUIRE(report.recovered_message.has_value());
  CHECK(report.recovered_message->empty());
  CHECK(report.recovery_accuracy == 1.0);
}
