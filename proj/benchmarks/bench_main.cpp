#include <benchmark/benchmark.h>

#include "decoyqkd/photonics.hpp"
#include "decoyqkd/privacy.hpp"
#include "decoyqkd/reconciliation.hpp"
#include "decoyqkd/session.hpp"

namespace {

using namespace decoyqkd;

void BM_Session(benchmark::State& state) {
    SessionConfig cfg;
    cfg.target_sifted_bits = static_cast<Count>(state.range(0));
    SessionOptions opts;
    opts.workers = 1;
    Count pulses = 0;
    for (auto _ : state) {
        const SessionResult r = run_session(cfg, opts);
        pulses += r.pulses_emitted;
        benchmark::DoNotOptimize(r.tally);
    }
    state.counters["pulses/s"] = benchmark::Counter(static_cast<double>(pulses), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Session)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_PoissonSample(benchmark::State& state) {
    PoissonSampler sampler(0.425);
    Rng rng(7);
    for (auto _ : state) benchmark::DoNotOptimize(sampler(rng));
}
BENCHMARK(BM_PoissonSample);

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> noisy_pair(std::size_t n, double qber) {
    Rng rng(11);
    std::vector<std::uint8_t> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = random_bit(rng);
        b[i] = static_cast<std::uint8_t>(a[i] ^ (bernoulli(rng, qber) ? 1 : 0));
    }
    return {a, b};
}

void BM_Cascade(benchmark::State& state) {
    const auto [a, b] = noisy_pair(static_cast<std::size_t>(state.range(0)), 0.0172);
    Rng rng(3);
    double f = 0.0;
    for (auto _ : state) {
        const ReconciliationResult r = cascade_reconcile(a, b, 0.0172, rng);
        f = static_cast<double>(r.leaked_bits) / (static_cast<double>(a.size()) * binary_entropy(0.0172));
    }
    state.counters["f_ec"] = f;
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Cascade)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_Toeplitz(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const std::size_t m = n * 3 / 10;
    Rng rng(5);
    std::vector<std::uint8_t> x(n);
    for (auto& bit : x) bit = random_bit(rng);
    const auto seed = toeplitz_seed(n, m, rng);
    for (auto _ : state) benchmark::DoNotOptimize(privacy_amplify(x, m, seed));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Toeplitz)->Arg(10'000)->Arg(100'000)->Arg(750'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
