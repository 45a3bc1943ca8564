#include <benchmark/benchmark.h>

#include <random>

#include "pathmine/adaptation.hpp"
#include "pathmine/alignment.hpp"
#include "pathmine/clustering.hpp"
#include "pathmine/discovery.hpp"
#include "pathmine/evaluation.hpp"

using namespace pathmine;

namespace {

GeneratorSpec bench_spec(int diseases, int traces) {
  GeneratorSpec spec;
  spec.n_diseases = diseases;
  spec.traces_per_disease = traces;
  spec.seed = 20250101;
  return spec;
}

const Benchmark& shared_benchmark() {
  static const Benchmark bench = generate_benchmark(bench_spec(3, 64));
  return bench;
}

}  // namespace

static void BM_DiscoverInductive(benchmark::State& state) {
  const EventLog& log = shared_benchmark().negative_logs[0];
  for (auto _ : state) benchmark::DoNotOptimize(discover_inductive(log));
}
BENCHMARK(BM_DiscoverInductive);

static void BM_DiscoverHeuristics(benchmark::State& state) {
  const EventLog& log = shared_benchmark().negative_logs[0];
  for (auto _ : state) benchmark::DoNotOptimize(discover_heuristics(log));
}
BENCHMARK(BM_DiscoverHeuristics);

static void BM_AlignFitting(benchmark::State& state) {
  const EventLog& log = shared_benchmark().negative_logs[0];
  const Aligner aligner(discover_inductive(log));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(aligner.align(log.traces[i % log.size()]));
    ++i;
  }
}
BENCHMARK(BM_AlignFitting);

static void BM_AlignDeviating(benchmark::State& state) {
  const pathmine::Benchmark& bench = shared_benchmark();
  const Aligner aligner(discover_inductive(bench.negative_logs[0]));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(aligner.align(bench.positive_log.traces[i % bench.positive_log.size()]));
    ++i;
  }
}
BENCHMARK(BM_AlignDeviating);

static void BM_ComputeDiagnoses(benchmark::State& state) {
  const pathmine::Benchmark& bench = shared_benchmark();
  KnowledgeBase kb;
  kb.add(discover_inductive(bench.negative_logs[0], "model_0"), {});
  kb.add(discover_inductive(bench.negative_logs[1], "model_1"), {});
  for (auto _ : state) benchmark::DoNotOptimize(compute_diagnoses(bench.positive_log, kb));
}
BENCHMARK(BM_ComputeDiagnoses);

static void BM_Dbscan(benchmark::State& state) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  std::vector<std::vector<double>> vectors;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i)
    vectors.push_back({coord(gen), coord(gen), coord(gen)});
  const PointSet points = make_point_set(std::move(vectors));
  for (auto _ : state) benchmark::DoNotOptimize(dbscan(points, 1.0, 4));
}
BENCHMARK(BM_Dbscan)->Arg(64)->Arg(256)->Arg(1024);

static void BM_AdaptIteration(benchmark::State& state) {
  const pathmine::Benchmark& bench = shared_benchmark();
  AdaptationConfig config;
  for (auto _ : state) {
    state.PauseTiming();
    KnowledgeBase kb = train_phase(bench.negative_logs[0], config);
    state.ResumeTiming();
    benchmark::DoNotOptimize(adapt_iteration(kb, bench.negative_logs[1], config));
  }
}
BENCHMARK(BM_AdaptIteration);

BENCHMARK_MAIN();
