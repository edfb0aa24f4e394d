#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>

#include "qscdc/harness.hpp"
#include "qscdc/protocol.hpp"
#include "qscdc/random.hpp"

namespace {

using namespace qscdc;

SessionConfig base_config(int n_pairs) {
  SessionConfig config;
  config.scheme = Scheme::B;
  config.n_pairs = n_pairs;
  config.test_fraction = 0.25;
  RandomStream bits(42);
  const int capacity = n_pairs - (n_pairs + 3) / 4;
  for (int i = 0; i < capacity; ++i) {
    config.secret_message += bits.bit() ? '1' : '0';
  }
  return config;
}

void BM_SessionNoAttack(benchmark::State& state) {
  SessionConfig config = base_config(static_cast<int>(state.range(0)));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    config.seed = seed++;
    benchmark::DoNotOptimize(run_session(config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SessionNoAttack)->Arg(16)->Arg(256)->Arg(4096);

void BM_SessionGhzCoupling(benchmark::State& state) {
  SessionConfig config = base_config(static_cast<int>(state.range(0)));
  config.attack.kind = AttackKind::GhzCoupling;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    config.seed = seed++;
    benchmark::DoNotOptimize(run_session(config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SessionGhzCoupling)->Arg(16)->Arg(256)->Arg(4096);

void BM_DetectionExact(benchmark::State& state) {
  AttackModel attack;
  attack.kind = AttackKind::InterceptResend;
  for (auto _ : state) {
    for (BellLabel label : all_bell_labels()) {
      benchmark::DoNotOptimize(detection_probability_exact(attack, label));
    }
  }
}
BENCHMARK(BM_DetectionExact);

void BM_ReportJson(benchmark::State& state) {
  SessionConfig config = base_config(64);
  config.attack.kind = AttackKind::InterceptResend;
  const SessionReport report = run_session(config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(report_to_json(report));
  }
}
BENCHMARK(BM_ReportJson);

}  // namespace

BENCHMARK_MAIN();
