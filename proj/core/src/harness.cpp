#include "qscdc/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "qscdc/adversary.hpp"
#include "qscdc/random.hpp"

namespace qscdc {

namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest exact decimal that round-trips a double (for CSV/text output;
// JSON numbers go through the JSON library's own round-trip formatting).
std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double parsed = 0.0;
  std::sscanf(buf, "%lf", &parsed);
  if (parsed == v) {
    for (int precision = 1; precision < 17; ++precision) {
      char shorter[64];
      std::snprintf(shorter, sizeof shorter, "%.*g", precision, v);
      std::sscanf(shorter, "%lf", &parsed);
      if (parsed == v) return shorter;
    }
  }
  return buf;
}

ordered_json attack_to_json(const AttackModel& attack) {
  ordered_json map = ordered_json::object();
  for (BellLabel label : all_bell_labels()) {
    const auto it = attack.ghz_map.find(label);
    if (it != attack.ghz_map.end()) {
      map[to_string(label)] = to_string(it->second);
    }
  }
  return ordered_json{{"kind", to_string(attack.kind)},
                      {"intercept_basis", to_string(attack.intercept_basis)},
                      {"target", to_string(attack.target)},
                      {"eve_ancilla_basis", to_string(attack.eve_ancilla_basis)},
                      {"ghz_map", std::move(map)}};
}

ordered_json session_to_json(const SessionConfig& config) {
  ordered_json pool = ordered_json::array();
  for (BellLabel label : config.label_pool) pool.push_back(to_string(label));
  return ordered_json{{"scheme", to_string(config.scheme)},
                      {"n_pairs", config.n_pairs},
                      {"label_pool", std::move(pool)},
                      {"test_fraction", config.test_fraction},
                      {"secret_message", config.secret_message},
                      {"seed", config.seed},
                      {"charlie_cooperates", config.charlie_cooperates},
                      {"attack", attack_to_json(config.attack)}};
}

// Collects problems instead of throwing so a bad config reports everything
// wrong with it at once.
AttackModel attack_from_json(const ordered_json& j,
                             std::vector<std::string>& violations) {
  AttackModel attack;
  if (!j.is_object()) {
    violations.push_back("attack must be a JSON object");
    return attack;
  }
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "kind") {
        attack.kind = attack_kind_from_string(value.get<std::string>());
      } else if (key == "intercept_basis") {
        attack.intercept_basis = basis_from_string(value.get<std::string>());
      } else if (key == "target") {
        attack.target = side_from_string(value.get<std::string>());
      } else if (key == "eve_ancilla_basis") {
        attack.eve_ancilla_basis = basis_from_string(value.get<std::string>());
      } else if (key == "ghz_map") {
        if (!value.is_object()) {
          violations.push_back("attack.ghz_map must be a JSON object");
          continue;
        }
        attack.ghz_map.clear();
        for (const auto& [bell, ghz] : value.items()) {
          attack.ghz_map[bell_label_from_string(bell)] =
              ghz_label_from_string(ghz.get<std::string>());
        }
      } else {
        violations.push_back("unknown attack field: " + key);
      }
    } catch (const nlohmann::json::exception& e) {
      violations.push_back("attack field '" + key + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      violations.push_back("attack field '" + key + "': " + e.what());
    }
  }
  return attack;
}

void write_file(const std::filesystem::path& path,
                const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read config file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) {
    throw IoError("cannot read config file " + path.string());
  }
  return parse_run_config(text.str());
}

RunConfig parse_run_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigViolation({std::string("config is not valid JSON: ") +
                           e.what()});
  }
  if (!j.is_object()) {
    throw ConfigViolation({"config root must be a JSON object"});
  }

  RunConfig config;
  std::vector<std::string> violations;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "scheme") {
        config.session.scheme = scheme_from_string(value.get<std::string>());
      } else if (key == "n_pairs") {
        config.session.n_pairs = value.get<int>();
      } else if (key == "label_pool") {
        if (!value.is_array()) {
          violations.push_back("label_pool must be a JSON array");
          continue;
        }
        config.session.label_pool.clear();
        for (const auto& item : value) {
          config.session.label_pool.push_back(
              bell_label_from_string(item.get<std::string>()));
        }
      } else if (key == "test_fraction") {
        config.session.test_fraction = value.get<double>();
      } else if (key == "secret_message") {
        config.session.secret_message = value.get<std::string>();
      } else if (key == "seed") {
        if (!value.is_number_unsigned() &&
            !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
          violations.push_back("seed must be a non-negative integer");
          continue;
        }
        config.session.seed = value.get<std::uint64_t>();
      } else if (key == "charlie_cooperates") {
        config.session.charlie_cooperates = value.get<bool>();
      } else if (key == "attack") {
        config.session.attack = attack_from_json(value, violations);
      } else if (key == "repetitions") {
        config.repetitions = value.get<int>();
        if (config.repetitions < 1) {
          violations.push_back("repetitions must be at least 1");
        }
      } else if (key == "format") {
        config.format = value.get<std::string>();
        if (config.format != "json" && config.format != "csv" &&
            config.format != "text") {
          violations.push_back("format must be one of json, csv, text");
        }
      } else if (key == "out_dir") {
        config.out_dir = value.get<std::string>();
      } else if (key == "random_message_bits") {
        if (value.is_null()) {
          config.random_message_bits.reset();
        } else {
          const int n = value.get<int>();
          if (n < 0) {
            violations.push_back("random_message_bits must be non-negative");
          } else {
            config.random_message_bits = n;
          }
        }
      } else {
        violations.push_back("unknown config field: " + key);
      }
    } catch (const nlohmann::json::exception& e) {
      violations.push_back("field '" + key + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      violations.push_back("field '" + key + "': " + e.what());
    }
  }
  if (!violations.empty()) {
    throw ConfigViolation(std::move(violations));
  }
  return config;
}

std::string run_config_to_json(const RunConfig& config) {
  ordered_json j = session_to_json(config.session);
  j["repetitions"] = config.repetitions;
  j["format"] = config.format;
  j["out_dir"] = config.out_dir.string();
  j["random_message_bits"] = config.random_message_bits
                                 ? ordered_json(*config.random_message_bits)
                                 : ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::string report_to_json(const SessionReport& report) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = session_to_json(report.config);
  j["verdict"] = ordered_json{
      {"tested", report.verdict.tested},
      {"mismatches", report.verdict.mismatches},
      {"outcome", to_string(report.verdict.outcome)}};
  j["detection_flag"] = report.detection_flag;
  j["recovered_message"] = report.recovered_message
                               ? ordered_json(*report.recovered_message)
                               : ordered_json(nullptr);
  j["recovery_accuracy"] = report.recovery_accuracy;

  ordered_json tests = ordered_json::array();
  for (const TestRecord& t : report.test_records) {
    tests.push_back(ordered_json{{"pair_id", t.pair_id},
                                 {"label", to_string(t.label)},
                                 {"basis", to_string(t.basis)},
                                 {"alice_bit", t.alice_bit},
                                 {"bob_bit", t.bob_bit},
                                 {"pass", t.pass}});
  }
  j["test_records"] = std::move(tests);

  const auto opt_int = [](const std::optional<int>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  ordered_json pairs = ordered_json::array();
  for (const PairRecord& p : report.pairs) {
    ordered_json messages = ordered_json::array();
    for (const ClassicalMessage& m : p.messages) messages.push_back(m.text());
    pairs.push_back(ordered_json{
        {"pair_id", p.pair_id},
        {"initial_label", to_string(p.initial_label)},
        {"role", to_string(p.role)},
        {"attack_applied", p.attack_applied
                               ? ordered_json(*p.attack_applied)
                               : ordered_json(nullptr)},
        {"alice_outcome", opt_int(p.alice_outcome)},
        {"bob_outcome", opt_int(p.bob_outcome)},
        {"messages", std::move(messages)},
        {"decoded_bit", opt_int(p.decoded_bit)}});
  }
  j["pairs"] = std::move(pairs);

  ordered_json eve_records = ordered_json::array();
  for (const EveRecord& rec : report.eve_view.records) {
    eve_records.push_back(ordered_json{
        {"pair_id", rec.pair_id},
        {"origin", rec.origin == EveRecord::Origin::Intercept ? "intercept"
                                                              : "ancilla"},
        {"basis", to_string(rec.basis)},
        {"outcome", rec.outcome}});
  }
  ordered_json eve;
  eve["records"] = std::move(eve_records);
  if (report.config.attack.kind != AttackKind::None) {
    std::vector<ClassicalMessage> transcript;
    for (const PairRecord& p : report.pairs) {
      transcript.insert(transcript.end(), p.messages.begin(),
                        p.messages.end());
    }
    const EveInference inference =
        eve_infer(report.config.attack, report.eve_view, transcript,
                  report.config.secret_message);
    eve["inference"] = ordered_json{{"guesses", inference.guesses},
                                    {"accuracy", inference.accuracy}};
  } else {
    eve["inference"] = nullptr;
  }
  j["eve"] = std::move(eve);

  return j.dump(2) + "\n";
}

std::string report_to_csv(const SessionReport& report) {
  std::string out = "pair_id,label,basis,alice_bit,bob_bit,pass\n";
  for (const TestRecord& t : report.test_records) {
    out += t.csv_line();
    out += '\n';
  }
  return out;
}

std::string report_to_text(const SessionReport& report) {
  std::ostringstream out;
  const SessionConfig& c = report.config;
  out << "session: scheme " << to_string(c.scheme) << ", " << c.n_pairs
      << " pairs (" << report.verdict.tested << " security-test), seed "
      << c.seed << "\n";
  out << "attack: " << c.attack.tag() << "\n";
  out << "verdict: " << to_string(report.verdict.outcome) << " ("
      << report.verdict.mismatches << " mismatches over "
      << report.verdict.tested << " tested)\n";
  if (report.recovered_message) {
    out << "recovered message: " << *report.recovered_message << "\n";
  } else if (report.detection_flag) {
    out << "recovered message: (aborted before transport)\n";
  } else {
    out << "recovered message: (withheld: controller did not reveal)\n";
  }
  out << "recovery accuracy: " << format_double(report.recovery_accuracy)
      << "\n";
  return out.str();
}

BatchResult run_batch(const RunConfig& config) {
  RunConfig effective = config;
  if (effective.repetitions < 1) {
    throw ConfigViolation({"repetitions must be at least 1"});
  }
  if (effective.format != "json" && effective.format != "csv" &&
      effective.format != "text") {
    throw ConfigViolation({"format must be one of json, csv, text"});
  }
  if (effective.random_message_bits) {
    if (*effective.random_message_bits < 0) {
      throw ConfigViolation({"random_message_bits must be non-negative"});
    }
    // Stream tag is the ASCII bytes of "message": distinct from every
    // session seed while still derived from it.
    RandomStream bits(effective.session.seed ^ 0x6D657373616765ULL);
    std::string msg(static_cast<std::size_t>(*effective.random_message_bits),
                    '0');
    for (char& ch : msg) ch = bits.bit() ? '1' : '0';
    effective.session.secret_message = std::move(msg);
  }
  {
    std::vector<std::string> violations = validate_config(effective.session);
    if (!violations.empty()) {
      throw ConfigViolation(std::move(violations));
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(effective.out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " +
                  effective.out_dir.string() + ": " + ec.message());
  }

  BatchResult result;
  double accuracy_sum = 0.0;
  double mismatch_sum = 0.0;
  int detected = 0;
  for (int rep = 0; rep < effective.repetitions; ++rep) {
    SessionConfig session = effective.session;
    session.seed =
        effective.session.seed + static_cast<std::uint64_t>(rep);
    const SessionReport report = run_session(session);
    accuracy_sum += report.recovery_accuracy;
    mismatch_sum += report.verdict.mismatches;
    if (report.detection_flag) ++detected;

    char name[32];
    std::snprintf(name, sizeof name, "session_%04d", rep);
    const std::filesystem::path json_path =
        effective.out_dir / (std::string(name) + ".json");
    write_file(json_path, report_to_json(report));
    result.report_files.push_back(json_path);
    if (effective.format == "csv") {
      write_file(effective.out_dir / (std::string(name) + ".csv"),
                 report_to_csv(report));
    } else if (effective.format == "text") {
      write_file(effective.out_dir / (std::string(name) + ".txt"),
                 report_to_text(report));
    }
  }

  result.sessions = effective.repetitions;
  result.recovery_rate = accuracy_sum / result.sessions;
  result.detection_rate = static_cast<double>(detected) / result.sessions;
  result.mean_mismatches = mismatch_sum / result.sessions;

  const ordered_json summary{{"schema_version", kReportSchemaVersion},
                             {"sessions", result.sessions},
                             {"recovery_rate", result.recovery_rate},
                             {"detection_rate", result.detection_rate},
                             {"mean_mismatches", result.mean_mismatches}};
  result.summary_file = effective.out_dir / "summary.json";
  write_file(result.summary_file, summary.dump(2) + "\n");
  return result;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  if (config.repetitions < 1) {
    throw ConfigViolation({"repetitions must be at least 1"});
  }
  if (config.attacks.empty()) {
    throw ConfigViolation({"attack list is empty"});
  }
  if (config.test_pair_counts.empty()) {
    throw ConfigViolation({"test-pair count list is empty"});
  }
  for (int n : config.test_pair_counts) {
    if (n < 1) {
      throw ConfigViolation({"test-pair counts must be positive"});
    }
  }

  std::vector<SweepRow> rows;
  std::uint64_t seed = config.seed;
  for (const std::string& tag : config.attacks) {
    AttackModel attack;
    try {
      attack.kind = attack_kind_from_string(tag);
    } catch (const std::invalid_argument& e) {
      throw ConfigViolation({e.what()});
    }

    double per_pair = 0.0;
    for (BellLabel label : all_bell_labels()) {
      per_pair += detection_probability_exact(attack, label);
    }
    per_pair /= static_cast<double>(all_bell_labels().size());

    for (int n : config.test_pair_counts) {
      SessionConfig session;
      session.scheme = Scheme::B;
      session.n_pairs = n;
      // Puts every pair in the sacrificial subset: ceil(fraction * n) = n.
      session.test_fraction = 1.0 - 0.5 / static_cast<double>(n);
      session.secret_message.clear();
      session.attack = attack;

      int detected = 0;
      for (int rep = 0; rep < config.repetitions; ++rep) {
        session.seed = seed++;
        if (run_session(session).detection_flag) ++detected;
      }
      const double freq =
          static_cast<double>(detected) / config.repetitions;
      rows.push_back(
          {tag, n, per_pair, std::pow(1.0 - per_pair, n), freq,
           std::sqrt(freq * (1.0 - freq) / config.repetitions)});
    }
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "attack,n_test_pairs,exact_detection_per_pair,exact_all_pass,"
      "mc_detection_freq,std_err\n";
  for (const SweepRow& row : rows) {
    out += row.attack;
    out += ',';
    out += std::to_string(row.n_test_pairs);
    out += ',';
    out += format_double(row.exact_detection_per_pair);
    out += ',';
    out += format_double(row.exact_all_pass);
    out += ',';
    out += format_double(row.mc_detection_freq);
    out += ',';
    out += format_double(row.std_err);
    out += '\n';
  }
  return out;
}

namespace {

std::string render_labels(const std::vector<BellLabel>& labels) {
  std::string out;
  for (const BellLabel label : labels) {
    if (!out.empty()) out += ',';
    out += to_string(label);
  }
  return out;
}

}  // namespace

std::vector<CheckResult> builtin_checks() {
  std::vector<CheckResult> checks;

  // Phase-flip encoding turns the plus state into its sign partner.
  {
    const QubitRegister encoded =
        scheme_a_encode(make_bell(BellLabel::PhiPlus), 1);
    const double overlap =
        overlap_magnitude(encoded, make_bell(BellLabel::PhiMinus));
    checks.push_back({"phase-flip encoding maps phi+ to phi-",
                      std::abs(overlap - 1.0) <= kStateTolerance,
                      "overlap magnitude " + format_double(overlap)});
  }

  // Whichever X outcome the sender announces, the receiver decodes the 1.
  {
    const QubitRegister encoded =
        scheme_a_encode(make_bell(BellLabel::PhiPlus), 1);
    bool pass = true;
    std::string detail;
    for (int alice_x : {0, 1}) {
      const Projection branch = project(encoded, 0, Basis::X, alice_x);
      if (std::abs(branch.probability - 0.5) > kStateTolerance ||
          !branch.state) {
        pass = false;
        detail += "branch " + std::to_string(alice_x) +
                  " has probability " + format_double(branch.probability) +
                  "; ";
        continue;
      }
      const std::vector<std::pair<int, Basis>> bob_meas{{1, Basis::X}};
      const OutcomeDistribution dist =
          outcome_distribution(*branch.state, bob_meas);
      const int bob_x = dist.probability("1") > 0.5 ? 1 : 0;
      const bool forced =
          std::abs(dist.probability(bob_x ? "1" : "0") - 1.0) <=
          kStateTolerance;
      const int decoded =
          scheme_a_bob_decode(BellLabel::PhiPlus, alice_x, bob_x);
      if (!forced || decoded != 1) pass = false;
      detail += "announce " + std::to_string(alice_x) + " -> decode " +
                std::to_string(decoded) + "; ";
    }
    checks.push_back({"both announcement branches decode the encoded 1",
                      pass, detail});
  }

  // The controller's sixteen-bit string names eight specific pairs.
  const std::string controller_bits = "0001101100011110";
  std::vector<BellLabel> labels;
  for (std::size_t i = 0; i + 1 < controller_bits.size(); i += 2) {
    const std::uint8_t bits = static_cast<std::uint8_t>(
        ((controller_bits[i] - '0') << 1) | (controller_bits[i + 1] - '0'));
    labels.push_back(bell_decode(BellCode{bits}));
  }
  {
    const std::vector<BellLabel> expected{
        BellLabel::PhiPlus,  BellLabel::PhiMinus, BellLabel::PsiPlus,
        BellLabel::PsiMinus, BellLabel::PhiPlus,  BellLabel::PhiMinus,
        BellLabel::PsiMinus, BellLabel::PsiPlus};
    checks.push_back({"controller bit string decodes to the eight pairs",
                      labels == expected, render_labels(labels)});
  }

  // Forcing the receiver's Z outcomes pins the sender's outcomes exactly.
  const std::string bob_bits = "00101001";
  std::string alice_bits;
  {
    bool pass = labels.size() == bob_bits.size();
    for (std::size_t k = 0; pass && k < labels.size(); ++k) {
      const Projection branch =
          project(make_bell(labels[k]), 1, Basis::Z, bob_bits[k] - '0');
      if (std::abs(branch.probability - 0.5) > kStateTolerance ||
          !branch.state) {
        pass = false;
        break;
      }
      const std::vector<std::pair<int, Basis>> alice_meas{{0, Basis::Z}};
      const OutcomeDistribution dist =
          outcome_distribution(*branch.state, alice_meas);
      const int alice_z = dist.probability("1") > 0.5 ? 1 : 0;
      if (std::abs(dist.probability(alice_z ? "1" : "0") - 1.0) >
          kStateTolerance) {
        pass = false;
        break;
      }
      alice_bits += static_cast<char>('0' + alice_z);
    }
    pass = pass && alice_bits == "00011010";
    checks.push_back({"forced receiver outcomes pin the sender outcomes",
                      pass, "sender outcomes " + alice_bits});
  }

  // The announced deltas then decode to the transmitted message.
  {
    const std::string deltas = "10001111";
    std::string decoded;
    for (std::size_t k = 0;
         k < labels.size() && k < bob_bits.size() && k < deltas.size();
         ++k) {
      decoded += static_cast<char>(
          '0' + scheme_b_bob_decode(labels[k], bob_bits[k] - '0',
                                    deltas[k] - '0'));
    }
    checks.push_back({"announced deltas decode to the transmitted message",
                      decoded == "10010101", "decoded " + decoded});
  }

  return checks;
}

}  // namespace qscdc
