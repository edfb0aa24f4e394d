#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "qscdc/statevec.hpp"

namespace {

using namespace qscdc;

void BM_MakeBell(benchmark::State& state) {
  const auto labels = all_bell_labels();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_bell(labels[i++ % labels.size()]));
  }
}
BENCHMARK(BM_MakeBell);

void BM_MakeGhz(benchmark::State& state) {
  const auto labels = all_ghz_labels();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_ghz(labels[i++ % labels.size()]));
  }
}
BENCHMARK(BM_MakeGhz);

void BM_ApplyLocal(benchmark::State& state) {
  const QubitRegister reg = make_ghz(GhzLabel::PPlus);
  const LocalUnitary flip = LocalUnitary::sigma_z();
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_local(reg, 0, flip));
  }
}
BENCHMARK(BM_ApplyLocal);

void BM_OutcomeDistributionPair(benchmark::State& state) {
  const QubitRegister reg = make_bell(BellLabel::PhiMinus);
  const std::vector<std::pair<int, Basis>> meas{{0, Basis::X}, {1, Basis::X}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(outcome_distribution(reg, meas));
  }
}
BENCHMARK(BM_OutcomeDistributionPair);

void BM_OutcomeDistributionTriplet(benchmark::State& state) {
  const QubitRegister reg = make_ghz(GhzLabel::SMinus);
  const std::vector<std::pair<int, Basis>> meas{
      {0, Basis::Y}, {1, Basis::Y}, {2, Basis::Y}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(outcome_distribution(reg, meas));
  }
}
BENCHMARK(BM_OutcomeDistributionTriplet);

void BM_MeasureCollapse(benchmark::State& state) {
  const QubitRegister reg = make_bell(BellLabel::PsiPlus);
  for (auto _ : state) {
    benchmark::DoNotOptimize(measure(reg, 0, Basis::X, 0.3));
  }
}
BENCHMARK(BM_MeasureCollapse);

}  // namespace
