#include <benchmark/benchmark.h>

#include <vector>

#include "moilab/functions.hpp"
#include "moilab/moi.hpp"
#include "moilab/sampling.hpp"
#include "moilab/symbol.hpp"

namespace {

using namespace moilab;

struct Fixture {
  MoiSymbol phi;
  OperatorTuple tuple;
  std::vector<ComplexMatrix> xs;
};

Fixture make_fixture(Index d, int n) {
  Rng rng = keyed_rng(11, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(n));
  const HermitianMatrix a = sample_operator(d, SpectrumConstraint::any, 0, rng);
  std::vector<ComplexMatrix> xs;
  for (int i = 0; i < n; ++i) xs.push_back(gaussian_matrix(d, d, rng));
  return {MoiSymbol::divided_difference(builtin_a(n)), OperatorTuple::uniform(a, static_cast<std::size_t>(n) + 1),
          std::move(xs)};
}

void BM_Serial(benchmark::State& state) {
  const Fixture fx = make_fixture(state.range(0), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(apply_moi(fx.phi, fx.tuple, fx.xs, Execution::serial));
}

void BM_Parallel(benchmark::State& state) {
  const Fixture fx = make_fixture(state.range(0), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(apply_moi(fx.phi, fx.tuple, fx.xs, Execution::parallel));
}

// Literal projection sum; only small sizes.
void BM_Reference(benchmark::State& state) {
  const Fixture fx = make_fixture(state.range(0), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(apply_moi_reference(fx.phi, fx.tuple, fx.xs));
}

}  // namespace

BENCHMARK(BM_Serial)->ArgsProduct({{8, 16, 32, 64}, {2, 3}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Parallel)->ArgsProduct({{8, 16, 32, 64}, {2, 3}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Reference)->ArgsProduct({{8, 16}, {2}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
