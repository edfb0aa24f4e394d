// Eavesdropping models applied while pairs are in transit, plus Eve's
// inference over everything she intercepted and everything said in public.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qscdc/random.hpp"
#include "qscdc/statevec.hpp"

namespace qscdc {

struct ClassicalMessage;  // protocol.hpp

enum class AttackKind { None, InterceptResend, GhzCoupling, AncillaEntangle };
enum class Side { Alice, Bob };

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(std::string_view s);
std::string to_string(Side side);
Side side_from_string(std::string_view s);

// Swaps each Bell pair for a triplet that keeps the parties' Z statistics
// intact, so only transverse-basis tests can notice.
std::map<BellLabel, GhzLabel> default_ghz_map();

struct AttackModel {
  AttackKind kind = AttackKind::None;

  // InterceptResend: which basis Eve measures in and whose qubit she grabs.
  Basis intercept_basis = Basis::Z;
  // InterceptResend and AncillaEntangle: the targeted side.
  Side target = Side::Bob;
  // GhzCoupling: which triplet replaces each Bell label.
  std::map<BellLabel, GhzLabel> ghz_map = default_ghz_map();
  // GhzCoupling / AncillaEntangle: basis Eve uses on her ancilla, measured
  // after Alice's own measurement.
  Basis eve_ancilla_basis = Basis::Z;

  std::string tag() const { return to_string(kind); }
};

// Constraint check for a configured attack; only GhzCoupling has one: every
// mapped triplet must reproduce the Alice-Bob Z distribution of the Bell
// state it replaces.
std::vector<std::string> validate_attack(const AttackModel& attack);

// One observation Eve made during the session.
struct EveRecord {
  enum class Origin { Intercept, Ancilla };
  int pair_id = -1;
  Origin origin = Origin::Intercept;
  Basis basis = Basis::Z;
  int outcome = 0;
};

struct EveView {
  std::vector<EveRecord> records;
};

// The attacked channel as an exact ensemble: each branch carries the
// probability Eve steered the pair there and, for measuring attacks, the
// outcome she recorded. Non-measuring attacks yield one branch.
struct AttackBranch {
  double probability = 1.0;
  QubitRegister state;
  int eve_outcome = -1;  // -1 when the attack records nothing here
};

// Enumerates every branch (deterministic, no sampling).
// Throws std::invalid_argument for a GhzCoupling map missing `label`.
std::vector<AttackBranch> attack_branches(const AttackModel& attack,
                                          BellLabel label);

struct AttackedPair {
  QubitRegister state;
  std::optional<EveRecord> eve;  // pair_id left for the caller to fill
};

// Samples one branch. Attack None forwards make_bell(label) untouched and
// draws nothing from the stream.
AttackedPair apply_attack(const AttackModel& attack, BellLabel label,
                          RandomStream& rng);

struct EveInference {
  std::string guesses;  // one '0'/'1' per transported message bit
  double accuracy = 0.0;
};

// Eve's best per-bit guess from her records plus the public transcript.
// `true_message` is ground truth used only to score her.
EveInference eve_infer(const AttackModel& attack, const EveView& view,
                       const std::vector<ClassicalMessage>& public_messages,
                       std::string_view true_message);

}  // namespace qscdc
