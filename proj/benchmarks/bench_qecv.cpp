#include <benchmark/benchmark.h>

#include "qecv/runner.hpp"

using namespace qecv;

namespace {

codes::Scenario steane_h(pauli::Gate error) {
    codes::CycleOptions o;
    o.error = error;
    o.op = codes::LogicalOp::H;
    return codes::ec_cycle(codes::steane(), o);
}

void BM_ConjugateT(benchmark::State& st) {
    pauli::PauliSum p(pauli::PauliTerm::parse_sparse("X1 Y2 Z3", 3));
    for (auto _ : st) {
        auto q = p;
        for (int k = 0; k < 8; ++k) q = pauli::conjugate(pauli::Gate::T, 1, q);
        benchmark::DoNotOptimize(q);
    }
}
BENCHMARK(BM_ConjugateT);

void BM_WlpSurface(benchmark::State& st) {
    auto sc = codes::ec_cycle(codes::rotated_surface(static_cast<std::size_t>(st.range(0))), {});
    for (auto _ : st) benchmark::DoNotOptimize(vc::build_correction_vcs(sc));
}
BENCHMARK(BM_WlpSurface)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Case3Steane(benchmark::State& st) {
    auto sc = steane_h(pauli::Gate::T);
    for (auto _ : st) benchmark::DoNotOptimize(vc::build_correction_vcs(sc));
}
BENCHMARK(BM_Case3Steane)->Unit(benchmark::kMillisecond);

void BM_EncodeSteane(benchmark::State& st) {
    auto vcs = vc::build_correction_vcs(steane_h(pauli::Gate::Y));
    for (auto _ : st) benchmark::DoNotOptimize(smt::encode(vcs[0].vc));
}
BENCHMARK(BM_EncodeSteane);

void BM_SplitSurface(benchmark::State& st) {
    auto n = static_cast<std::size_t>(st.range(0));
    auto vcs = vc::build_correction_vcs(codes::ec_cycle(codes::rotated_surface(n), {}));
    for (auto _ : st) benchmark::DoNotOptimize(runner::split(vcs[0].vc, n, n * n));
}
BENCHMARK(BM_SplitSurface)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SolveSteane(benchmark::State& st) {
    auto vcs = vc::build_correction_vcs(steane_h(pauli::Gate::Y));
    auto cfg = smt::default_config();
    for (auto _ : st) benchmark::DoNotOptimize(smt::check(vcs[0].vc, cfg));
}
BENCHMARK(BM_SolveSteane)->Unit(benchmark::kMillisecond);

void BM_OracleSteane(benchmark::State& st) {
    auto sc = steane_h(st.range(0) ? pauli::Gate::T : pauli::Gate::Y);
    for (auto _ : st) benchmark::DoNotOptimize(oracle::brute_force_verify(sc, {}));
}
BENCHMARK(BM_OracleSteane)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
