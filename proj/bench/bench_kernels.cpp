// Parallel kernels against their serial references. Thread count comes from
// OMP_NUM_THREADS; on one core the two columns should match.

#include <benchmark/benchmark.h>

#include <map>

#include "syk/fock.hpp"
#include "syk/hamiltonian.hpp"

using namespace syk;

namespace {

CouplingTensor tensor(int n) {
  Rng rng = DisorderEnsemble(1, 1).stream(0);
  return sample_syk(n, 1.0, rng);
}

const SparseHermitian& hamiltonian(int n) {
  static std::map<int, SparseHermitian> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_syk(tensor(n), 0.0, fock::Basis::sector(n, n / 2))).first;
  return it->second;
}

Eigen::VectorXcd random_vector(Eigen::Index dim) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Random(dim);
  return v / v.norm();
}

void BM_MatvecParallel(benchmark::State& state) {
  const auto& h = hamiltonian(static_cast<int>(state.range(0)));
  const Eigen::VectorXcd x = random_vector(h.dim());
  Eigen::VectorXcd y(h.dim());
  for (auto _ : state) {
    h.apply(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["nnz"] = double(h.nnz());
}

void BM_MatvecSerial(benchmark::State& state) {
  const auto& h = hamiltonian(static_cast<int>(state.range(0)));
  const Eigen::VectorXcd x = random_vector(h.dim());
  Eigen::VectorXcd y(h.dim());
  for (auto _ : state) {
    h.apply_serial(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_BuildParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto t = tensor(n);
  const auto b = fock::Basis::sector(n, n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(build_syk(t, 0.0, b, Execution::parallel).nnz());
}

void BM_BuildSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto t = tensor(n);
  const auto b = fock::Basis::sector(n, n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(build_syk(t, 0.0, b, Execution::serial).nnz());
}

fock::PureState random_full_state(int n) {
  fock::PureState s{std::make_shared<const fock::Basis>(fock::Basis::full(n)),
                    random_vector(Eigen::Index{1} << n)};
  return s;
}

void BM_PartialTraceParallel(benchmark::State& state) {
  const auto s = random_full_state(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fock::partial_trace(s, 6).elements.data());
}

void BM_PartialTraceSerial(benchmark::State& state) {
  const auto s = random_full_state(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fock::partial_trace_serial(s, 6).elements.data());
}

}  // namespace

BENCHMARK(BM_MatvecParallel)->Arg(12)->Arg(14)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MatvecSerial)->Arg(12)->Arg(14)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BuildParallel)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildSerial)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PartialTraceParallel)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PartialTraceSerial)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
