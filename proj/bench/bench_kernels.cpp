// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "condop/oracle.hpp"
#include "instances.hpp"

using namespace condop;

namespace {

struct Fixture {
  MeasureSpace space;
  PartitionAlgebra partition;
  Vector f;

  explicit Fixture(std::size_t n) : Fixture(make(n)) {}

 private:
  static Fixture make(std::size_t n) {
    std::mt19937_64 rng(n);
    MeasureSpace s = testkit::random_space(rng, n);
    PartitionAlgebra p = testkit::random_partition(rng, s, std::max<std::size_t>(n / 8, 1));
    return Fixture(std::move(s), std::move(p), testkit::random_vector(rng, n));
  }
  Fixture(MeasureSpace s, PartitionAlgebra p, Vector v) : space(std::move(s)), partition(std::move(p)), f(std::move(v)) {}
};

CondOperator operator_for(const Fixture& fx, double p, double q) {
  return CondOperator::em_u(fx.partition, Function(fx.space, fx.f), ExponentPair(p, q));
}

void BM_CondExp(benchmark::State& st) {
  const Fixture fx(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(cond_exp_values(fx.partition, fx.f));
}

void BM_CondExpSerial(benchmark::State& st) {
  const Fixture fx(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(serial::cond_exp_values(fx.partition, fx.f));
}

void BM_MatrixOf(benchmark::State& st) {
  const Fixture fx(static_cast<std::size_t>(st.range(0)));
  const CondOperator op = operator_for(fx, 2, 2);
  for (auto _ : st) benchmark::DoNotOptimize(matrix_of(op));
}

void BM_MatrixOfSerial(benchmark::State& st) {
  const Fixture fx(static_cast<std::size_t>(st.range(0)));
  const CondOperator op = operator_for(fx, 2, 2);
  for (auto _ : st) benchmark::DoNotOptimize(serial::matrix_of(op));
}

void BM_OptimizeRatio(benchmark::State& st) {
  const Fixture fx(static_cast<std::size_t>(st.range(0)));
  const auto prob = detail::make_problem(operator_for(fx, 3, 1.5), nullptr);
  OracleConfig cfg;
  cfg.restarts = 8;
  for (auto _ : st) benchmark::DoNotOptimize(detail::optimize_ratio(prob, detail::Goal::maximize, cfg));
}

void BM_OptimizeRatioSerial(benchmark::State& st) {
  const Fixture fx(static_cast<std::size_t>(st.range(0)));
  const auto prob = detail::make_problem(operator_for(fx, 3, 1.5), nullptr);
  OracleConfig cfg;
  cfg.restarts = 8;
  for (auto _ : st) benchmark::DoNotOptimize(serial::optimize_ratio(prob, detail::Goal::maximize, cfg));
}

}  // namespace

BENCHMARK(BM_CondExp)->RangeMultiplier(4)->Range(64, 1 << 16);
BENCHMARK(BM_CondExpSerial)->RangeMultiplier(4)->Range(64, 1 << 16);
BENCHMARK(BM_MatrixOf)->RangeMultiplier(2)->Range(64, 1024);
BENCHMARK(BM_MatrixOfSerial)->RangeMultiplier(2)->Range(64, 1024);
BENCHMARK(BM_OptimizeRatio)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimizeRatioSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
