#include "qscdc/adversary.hpp"

#include <algorithm>
#include <stdexcept>

#include "qscdc/channel_security.hpp"
#include "qscdc/protocol.hpp"

namespace qscdc {

namespace {

// The one multi-qubit gate in the library: extend the pair with an ancilla
// in |0> and CNOT the targeted transiting qubit onto it.
QubitRegister couple_ancilla(const QubitRegister& pair, Side control) {
  if (pair.n_qubits() != 2) {
    throw std::invalid_argument("ancilla coupling expects a 2-qubit state");
  }
  std::array<Amplitude, 8> amps{};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const int anc = control == Side::Bob ? b : a;
      amps[(a << 2) | (b << 1) | anc] = pair.amplitude((a << 1) | b);
    }
  }
  return QubitRegister(3, amps);
}

int target_qubit(Side side) { return side == Side::Alice ? 0 : 1; }

OutcomeDistribution z_marginal(const QubitRegister& reg) {
  const std::vector<std::pair<int, Basis>> meas{{0, Basis::Z}, {1, Basis::Z}};
  return outcome_distribution(reg, meas);
}

}  // namespace

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::None:            return "none";
    case AttackKind::InterceptResend: return "intercept-resend";
    case AttackKind::GhzCoupling:     return "ghz-coupling";
    case AttackKind::AncillaEntangle: return "ancilla-entangle";
  }
  throw std::invalid_argument("unknown attack kind");
}

AttackKind attack_kind_from_string(std::string_view s) {
  if (s == "none") return AttackKind::None;
  if (s == "intercept-resend") return AttackKind::InterceptResend;
  if (s == "ghz-coupling") return AttackKind::GhzCoupling;
  if (s == "ancilla-entangle") return AttackKind::AncillaEntangle;
  throw std::invalid_argument("unknown attack kind: " + std::string(s));
}

std::string to_string(Side side) {
  return side == Side::Alice ? "alice" : "bob";
}

Side side_from_string(std::string_view s) {
  if (s == "alice") return Side::Alice;
  if (s == "bob") return Side::Bob;
  throw std::invalid_argument("unknown side: " + std::string(s));
}

std::map<BellLabel, GhzLabel> default_ghz_map() {
  return {{BellLabel::PhiPlus, GhzLabel::PPlus},
          {BellLabel::PhiMinus, GhzLabel::PMinus},
          {BellLabel::PsiPlus, GhzLabel::RPlus},
          {BellLabel::PsiMinus, GhzLabel::RMinus}};
}

std::vector<std::string> validate_attack(const AttackModel& attack) {
  std::vector<std::string> violations;
  if (attack.kind != AttackKind::GhzCoupling) return violations;
  if (attack.ghz_map.empty()) {
    violations.push_back("ghz map is empty");
    return violations;
  }
  for (const auto& [bell, ghz] : attack.ghz_map) {
    const OutcomeDistribution want = z_marginal(make_bell(bell));
    const OutcomeDistribution got = z_marginal(make_ghz(ghz));
    for (const std::string key : {"00", "01", "10", "11"}) {
      if (std::abs(want.probability(key) - got.probability(key)) >
          kNormTolerance) {
        violations.push_back("ghz map breaks Z statistics for " +
                             to_string(bell) + " -> " + to_string(ghz));
        break;
      }
    }
  }
  return violations;
}

std::vector<AttackBranch> attack_branches(const AttackModel& attack,
                                          BellLabel label) {
  std::vector<AttackBranch> branches;
  switch (attack.kind) {
    case AttackKind::None:
      branches.push_back({1.0, make_bell(label), -1});
      break;
    case AttackKind::InterceptResend: {
      const QubitRegister pair = make_bell(label);
      const int qubit = target_qubit(attack.target);
      for (int outcome = 0; outcome < 2; ++outcome) {
        const Projection proj =
            project(pair, qubit, attack.intercept_basis, outcome);
        if (!proj.state) continue;
        branches.push_back({proj.probability, *proj.state, outcome});
      }
      break;
    }
    case AttackKind::GhzCoupling: {
      const auto it = attack.ghz_map.find(label);
      if (it == attack.ghz_map.end()) {
        throw std::invalid_argument("ghz map has no image for " +
                                    to_string(label));
      }
      branches.push_back({1.0, make_ghz(it->second), -1});
      break;
    }
    case AttackKind::AncillaEntangle:
      branches.push_back(
          {1.0, couple_ancilla(make_bell(label), attack.target), -1});
      break;
  }
  return branches;
}

AttackedPair apply_attack(const AttackModel& attack, BellLabel label,
                          RandomStream& rng) {
  if (attack.kind == AttackKind::None) {
    return {make_bell(label), std::nullopt};
  }
  const std::vector<AttackBranch> branches = attack_branches(attack, label);
  const AttackBranch* chosen = &branches.front();
  if (branches.size() > 1) {
    const double u = rng.unit();
    double cumulative = 0.0;
    for (const AttackBranch& branch : branches) {
      cumulative += branch.probability;
      chosen = &branch;
      if (u < cumulative) break;
    }
  }
  std::optional<EveRecord> eve;
  if (chosen->eve_outcome >= 0) {
    eve = EveRecord{-1, EveRecord::Origin::Intercept, attack.intercept_basis,
                    chosen->eve_outcome};
  }
  return {chosen->state, eve};
}

namespace {

// Eve's bit for the base branch (the parties' 00... component) of each
// triplet family: P and R leave the ancilla at 0, Q and S at 1. For any of
// the eight states, ancilla Z outcome = Alice Z outcome XOR this bit.
int ancilla_offset(GhzLabel g) {
  return (static_cast<int>(g) / 2) & 1;
}

// Triplet the ancilla coupling produces for a given input label; mirrors
// couple_ancilla and is pinned to it by test.
GhzLabel coupling_image(BellLabel label, Side target) {
  const bool psi =
      label == BellLabel::PsiPlus || label == BellLabel::PsiMinus;
  const bool minus =
      label == BellLabel::PhiMinus || label == BellLabel::PsiMinus;
  int base;  // P, Q, R, S = 0..3
  if (!psi) {
    base = 0;
  } else {
    base = target == Side::Bob ? 3 : 2;
  }
  return static_cast<GhzLabel>(base * 2 + (minus ? 1 : 0));
}

struct PublicPairView {
  std::optional<int> announce;  // AliceXAnnounce or AliceDelta payload
  std::optional<ClassicalMessage::Kind> announce_kind;
  std::optional<BellLabel> revealed;
};

}  // namespace

EveInference eve_infer(const AttackModel& attack, const EveView& view,
                       const std::vector<ClassicalMessage>& public_messages,
                       std::string_view true_message) {
  std::map<int, PublicPairView> public_by_pair;
  for (const ClassicalMessage& msg : public_messages) {
    PublicPairView& p = public_by_pair[msg.pair_id];
    switch (msg.kind) {
      case ClassicalMessage::Kind::AliceXAnnounce:
      case ClassicalMessage::Kind::AliceDelta:
        p.announce = msg.bit;
        p.announce_kind = msg.kind;
        break;
      case ClassicalMessage::Kind::CharlieReveal:
        if (msg.code) p.revealed = bell_decode(*msg.code);
        break;
      case ClassicalMessage::Kind::BobMeasured:
        break;
    }
  }

  std::map<int, EveRecord> eve_by_pair;
  for (const EveRecord& rec : view.records) eve_by_pair[rec.pair_id] = rec;

  // With her own map in hand Eve may not even need the reveal: if every
  // image shifts the ancilla by the same bit, the label never matters.
  std::optional<int> uniform_offset;
  {
    std::vector<GhzLabel> images;
    if (attack.kind == AttackKind::GhzCoupling) {
      for (const auto& [bell, ghz] : attack.ghz_map) images.push_back(ghz);
    } else if (attack.kind == AttackKind::AncillaEntangle) {
      for (BellLabel bell : all_bell_labels()) {
        images.push_back(coupling_image(bell, attack.target));
      }
    }
    if (!images.empty()) {
      uniform_offset = ancilla_offset(images.front());
      for (GhzLabel g : images) {
        if (ancilla_offset(g) != *uniform_offset) {
          uniform_offset.reset();
          break;
        }
      }
    }
  }

  EveInference result;
  int correct = 0;
  std::size_t bit_index = 0;
  for (const auto& [pair_id, pub] : public_by_pair) {
    if (!pub.announce) continue;  // message pairs always announce
    const bool scheme_b =
        pub.announce_kind == ClassicalMessage::Kind::AliceDelta;
    const int announce = *pub.announce;
    const auto eve_it = eve_by_pair.find(pair_id);

    int guess = 0;
    if (eve_it != eve_by_pair.end()) {
      const EveRecord& rec = eve_it->second;
      switch (attack.kind) {
        case AttackKind::None:
          break;
        case AttackKind::InterceptResend:
          if (scheme_b && rec.basis == Basis::Z) {
            if (attack.target == Side::Alice) {
              guess = rec.outcome ^ announce;
            } else if (pub.revealed) {
              guess = (rec.outcome ^ letter_bit(*pub.revealed)) ^ announce;
            }
          } else if (!scheme_b && rec.basis == Basis::X) {
            // Her X collapse pre-dates the phase flip, so Alice's announced
            // outcome differs from Eve's record exactly when a flip happened.
            if (attack.target == Side::Alice) {
              guess = announce ^ rec.outcome;
            } else if (pub.revealed) {
              guess = announce ^ rec.outcome ^ sign_bit(*pub.revealed);
            }
          }
          break;
        case AttackKind::GhzCoupling:
        case AttackKind::AncillaEntangle:
          if (scheme_b && rec.basis == Basis::Z) {
            std::optional<int> offset = uniform_offset;
            if (pub.revealed) {
              if (attack.kind == AttackKind::AncillaEntangle) {
                offset = ancilla_offset(
                    coupling_image(*pub.revealed, attack.target));
              } else {
                const auto img = attack.ghz_map.find(*pub.revealed);
                if (img != attack.ghz_map.end()) {
                  offset = ancilla_offset(img->second);
                }
              }
            }
            if (offset) {
              const int alice_z = rec.outcome ^ *offset;
              guess = alice_z ^ announce;
            }
          }
          break;
      }
    }

    result.guesses.push_back(guess ? '1' : '0');
    if (bit_index < true_message.size() &&
        (true_message[bit_index] == '1') == (guess == 1)) {
      ++correct;
    }
    ++bit_index;
  }

  result.accuracy =
      result.guesses.empty()
          ? 0.0
          : static_cast<double>(correct) / static_cast<double>(bit_index);
  return result;
}

}  // namespace qscdc
