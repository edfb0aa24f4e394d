// Command-line front end: `run` executes sessions from a JSON config,
// `sweep` tabulates detection statistics across attacks and test sizes,
// `paper-check` replays the built-in regression checks.
//
// Exit codes: 0 success, 1 config violation, 2 I/O failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qscdc/harness.hpp"

namespace {

int cmd_run(const std::string& config_path, const CLI::Option* seed_opt,
            std::uint64_t seed, const CLI::Option* reps_opt, int reps,
            const CLI::Option* format_opt, const std::string& format,
            const CLI::Option* out_opt, const std::string& out_dir) {
  qscdc::RunConfig config = qscdc::load_run_config(config_path);
  if (seed_opt->count() > 0) config.session.seed = seed;
  if (reps_opt->count() > 0) config.repetitions = reps;
  if (format_opt->count() > 0) config.format = format;
  if (out_opt->count() > 0) config.out_dir = out_dir;

  const qscdc::BatchResult result = qscdc::run_batch(config);
  std::cout << "sessions: " << result.sessions << "\n"
            << "recovery rate: " << result.recovery_rate << "\n"
            << "detection rate: " << result.detection_rate << "\n"
            << "mean mismatches: " << result.mean_mismatches << "\n"
            << "summary: " << result.summary_file.string() << "\n";
  return 0;
}

int cmd_sweep(const qscdc::SweepConfig& sweep, const CLI::Option* out_opt,
              const std::string& out_dir) {
  const std::vector<qscdc::SweepRow> rows = qscdc::run_sweep(sweep);
  const std::string csv = qscdc::sweep_to_csv(rows);
  std::cout << csv;
  if (out_opt->count() > 0) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
      throw qscdc::IoError("cannot create output directory " + out_dir +
                           ": " + ec.message());
    }
    const std::filesystem::path path =
        std::filesystem::path(out_dir) / "sweep.csv";
    std::FILE* file = std::fopen(path.string().c_str(), "wb");
    if (file == nullptr ||
        std::fwrite(csv.data(), 1, csv.size(), file) != csv.size() ||
        std::fclose(file) != 0) {
      if (file != nullptr) std::fclose(file);
      throw qscdc::IoError("cannot write " + path.string());
    }
  }
  return 0;
}

int cmd_paper_check() {
  bool all_pass = true;
  for (const qscdc::CheckResult& check : qscdc::builtin_checks()) {
    std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << " ("
              << check.detail << ")\n";
    all_pass = all_pass && check.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Deterministic simulator for controller-gated direct communication "
      "over Bell-pair channels, with eavesdropping-detection analysis"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand(
      "run", "Run sessions from a JSON config and write reports");
  std::string config_path;
  run->add_option("--config", config_path, "JSON config file")->required();
  std::uint64_t seed = 1;
  auto* run_seed = run->add_option("--seed", seed, "Override the base seed");
  int reps = 1;
  auto* run_reps =
      run->add_option("--reps", reps, "Override the repetition count");
  std::string format = "json";
  auto* run_format =
      run->add_option("--format", format, "Report format: json|csv|text");
  std::string out_dir = "out";
  auto* run_out = run->add_option("--out", out_dir, "Output directory");

  // sweep
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Tabulate detection statistics per attack and test size");
  qscdc::SweepConfig sweep;
  sweep_cmd
      ->add_option("--attacks", sweep.attacks,
                   "Comma-separated attack kinds")
      ->delimiter(',');
  sweep_cmd
      ->add_option("--test-pairs", sweep.test_pair_counts,
                   "Comma-separated security-test sizes")
      ->delimiter(',');
  sweep_cmd->add_option("--reps", sweep.repetitions,
                        "Monte-Carlo sessions per table cell");
  sweep_cmd->add_option("--seed", sweep.seed, "Base seed for the study");
  std::string sweep_out;
  auto* sweep_out_opt =
      sweep_cmd->add_option("--out", sweep_out, "Also write <out>/sweep.csv");

  // paper-check
  app.add_subcommand("paper-check",
                     "Replay the built-in worked-example checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      return cmd_run(config_path, run_seed, seed, run_reps, reps, run_format,
                     format, run_out, out_dir);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep, sweep_out_opt, sweep_out);
    }
    return cmd_paper_check();
  } catch (const qscdc::ConfigViolation& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const qscdc::IoError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
