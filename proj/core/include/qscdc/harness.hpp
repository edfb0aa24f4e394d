// Batch front end over run_session: JSON config loading, deterministic
// report serialization, repetition batches with aggregate statistics,
// attack/test-size detection sweeps, and the built-in replay checks that
// gate every build.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qscdc/protocol.hpp"

namespace qscdc {

inline constexpr int kReportSchemaVersion = 1;

// Filesystem trouble (unreadable config, unwritable output); the CLI maps
// this to exit code 2, keeping it distinct from config violations (1).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SessionConfig session;
  int repetitions = 1;
  std::string format = "json";  // json | csv | text
  std::filesystem::path out_dir = "out";
  // When set, overrides secret_message with this many bits drawn from a
  // stream derived from the session seed; meant for large statistical runs
  // where spelling out the message would bloat the config.
  std::optional<int> random_message_bits;
};

// Reads and parses a JSON config. Unreadable file -> IoError; anything
// wrong with the content -> ConfigViolation listing every problem found.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text);

// Round-trip serialization of a full run config with every field spelled
// out (the committed example config is generated this way).
std::string run_config_to_json(const RunConfig& config);

// Deterministic serializations of one session; identical reports yield
// byte-identical strings. JSON carries schema_version = kReportSchemaVersion
// and validates against schemas/session_report.v1.schema.json.
std::string report_to_json(const SessionReport& report);
std::string report_to_csv(const SessionReport& report);   // test records
std::string report_to_text(const SessionReport& report);  // human summary

struct BatchResult {
  int sessions = 0;
  double recovery_rate = 0.0;   // mean per-session recovery accuracy
  double detection_rate = 0.0;  // fraction of sessions flagged tampered
  double mean_mismatches = 0.0;
  std::vector<std::filesystem::path> report_files;
  std::filesystem::path summary_file;
};

// Runs `repetitions` sessions with seeds seed, seed+1, ... and writes
// session_NNNN.json per session (plus .csv/.txt when the format asks),
// then summary.json with the aggregate statistics.
BatchResult run_batch(const RunConfig& config);

struct SweepConfig {
  std::vector<std::string> attacks{"none", "intercept-resend", "ghz-coupling",
                                   "ancilla-entangle"};
  std::vector<int> test_pair_counts{1, 4, 16, 64};
  int repetitions = 2000;
  std::uint64_t seed = 1;
};

struct SweepRow {
  std::string attack;
  int n_test_pairs = 0;
  double exact_detection_per_pair = 0.0;  // label-averaged, enumerated
  double exact_all_pass = 0.0;            // (1 - p)^n
  double mc_detection_freq = 0.0;         // sessions with >= 1 mismatch
  double std_err = 0.0;                   // binomial standard error
};

// Detection study: exact branch enumeration side by side with Monte-Carlo
// session frequencies for every (attack, test-set size) combination.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

// Canonical CSV with header
// attack,n_test_pairs,exact_detection_per_pair,exact_all_pass,mc_detection_freq,std_err
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // expected vs observed, for the log line
};

// The built-in replays used as a regression gate: the phase-flip encoding
// round trip (both announcement branches) and the eight-pair label-string
// session with forced receiver outcomes.
std::vector<CheckResult> builtin_checks();

}  // namespace qscdc
