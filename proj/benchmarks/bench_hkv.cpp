#include <benchmark/benchmark.h>

#include "hkv/hurwitz.hpp"
#include "hkv/kernels.hpp"
#include "hkv/kloosterman.hpp"
#include "hkv/ldata.hpp"
#include "hkv/voronoi.hpp"

using namespace hkv;

namespace {

// range(0) = beta, range(1) = n, range(2) = method
void BM_kl_table(benchmark::State& state) {
    const auto g = build_unit_group(5, static_cast<int>(state.range(0)));
    const int n = static_cast<int>(state.range(1));
    const auto m = static_cast<kl_method>(state.range(2));
    for (auto _ : state) benchmark::DoNotOptimize(kl_dlog_table(*g, n, m));
    state.SetLabel(std::string(kl_method_name(m)));
    state.SetItemsProcessed(state.iterations() * g->order());
}
BENCHMARK(BM_kl_table)
    ->ArgsProduct({{2, 3}, {2, 3}, {int(kl_method::naive), int(kl_method::dp), int(kl_method::fft_dp)}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kl_table)
    ->ArgsProduct({{4, 5, 6}, {2, 3}, {int(kl_method::dp), int(kl_method::fft_dp)}})
    ->Unit(benchmark::kMillisecond);

void BM_kl_salie(benchmark::State& state) {
    const int beta = static_cast<int>(state.range(0));
    if (!registered_lift(5, beta, 2)) calibrate_salie_lift(5, beta, 2);
    const auto g = build_unit_group(5, beta);
    for (auto _ : state) benchmark::DoNotOptimize(kl_dlog_table(*g, 2, kl_method::salie));
    state.SetItemsProcessed(state.iterations() * g->order());
}
BENCHMARK(BM_kl_salie)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_hurwitz(benchmark::State& state) {
    const cplx s(-0.7, 0.4 + static_cast<double>(state.range(0)));
    double a = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hurwitz_zeta(s, a));
        a = a < 0.9 ? a + 0.01 : 0.1;
    }
}
BENCHMARK(BM_hurwitz)->Arg(0)->Arg(20)->Arg(100);

void BM_sieve(benchmark::State& state) {
    const isobaric_datum d = parse_components("7:2,13:2");
    const i64 M = state.range(0);
    for (auto _ : state) {
        csum acc;
        coefficient_sieve(d, M).run([&](i64, const cplx* a, const double*, std::size_t len) {
            for (std::size_t i = 0; i < len; ++i) acc += a[i];
        });
        benchmark::DoNotOptimize(acc.value());
    }
    state.SetItemsProcessed(state.iterations() * M);
}
BENCHMARK(BM_sieve)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_cutoff(benchmark::State& state) {
    cutoff_function f;
    f.kind = static_cast<cutoff_kind>(state.range(0));
    f.gamma = gamma_data::trivial(2);
    double y = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_cutoff(f, y));
        y = y < 20 ? y * 1.3 : 0.05;
    }
    state.SetLabel(std::string(cutoff_kind_name(f.kind)));
}
BENCHMARK(BM_cutoff)->Arg(int(cutoff_kind::V1))->Arg(int(cutoff_kind::V2))->Arg(int(cutoff_kind::Phi_u));

void BM_twisted_sum(benchmark::State& state) {
    if (!registered_lift(5, 4, 2)) calibrate_salie_lift(5, 4, 2);
    const moment_query q(parse_components("7:2,7:4"), 5, 4, {0.6, 0.3}, 2.5);
    for (auto _ : state) benchmark::DoNotOptimize(twisted_sum_voronoi(q).total);
}
BENCHMARK(BM_twisted_sum)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
