#include <benchmark/benchmark.h>

#include <map>

#include "dpsi/kernels.hpp"
#include "dpsi/params.hpp"
#include "dpsi/protocol.hpp"

namespace {

using namespace dpsi;

struct Fixture {
    PublicParams params;
    std::vector<Polynomial> polys;
    FieldMatrix z;
    FieldMatrix values;

    explicit Fixture(std::size_t c) {
        SetupConfig cfg;
        cfg.c = c;
        params = cloud_setup(cfg);
        polys = kernels::random_polys(ExecPolicy::serial, Key::from_seed(1), params.h(), params.d(), params.field);
        z = kernels::expand_blinding(ExecPolicy::serial, Key::from_seed(2), params.h(), params.n(), true, params.field);
        Tally t;
        values = kernels::mask_single(ExecPolicy::serial, polys, params.xs, z, params.field, t);
    }
};

const Fixture& fixture(std::size_t c) {
    static std::map<std::size_t, Fixture> cache;
    auto it = cache.find(c);
    if (it == cache.end()) it = cache.emplace(c, Fixture(c)).first;
    return it->second;
}

ExecPolicy policy_of(const benchmark::State& state) {
    return state.range(1) == 0 ? ExecPolicy::serial : ExecPolicy::parallel;
}

void BM_ExpandBlinding(benchmark::State& state) {
    const auto& f = fixture(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            kernels::expand_blinding(policy_of(state), Key::from_seed(3), f.params.h(), f.params.n(), false, f.params.field));
    state.SetLabel(std::string(to_string(policy_of(state))));
}

void BM_MaskSingle(benchmark::State& state) {
    const auto& f = fixture(state.range(0));
    for (auto _ : state) {
        Tally t;
        benchmark::DoNotOptimize(kernels::mask_single(policy_of(state), f.polys, f.params.xs, f.z, f.params.field, t));
    }
    state.SetLabel(std::string(to_string(policy_of(state))));
}

void BM_RecoverBins(benchmark::State& state) {
    const auto& f = fixture(state.range(0));
    Tally nested;
    LagrangeBasis basis(f.params.xs, Arith(f.params.field, &nested));
    for (auto _ : state) {
        Tally t, n;
        benchmark::DoNotOptimize(
            kernels::recover_bins(policy_of(state), f.values, basis, f.params.enc, f.params.field, t, n, 0x5eed));
    }
    state.SetLabel(std::string(to_string(policy_of(state))));
}

void BM_Session(benchmark::State& state) {
    std::vector<u64> a, b;
    for (u64 i = 0; i < 50; ++i) {
        a.push_back(1000 + i);
        b.push_back(1025 + i);
    }
    Scheme scheme = state.range(0) == 0 ? Scheme::improved : Scheme::eo;
    SetupConfig cfg;
    u64 seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_session(scheme, a, b, Key::from_seed(seed++), cfg, policy_of(state)));
    state.SetLabel(std::string(to_string(scheme)) + "/" + std::string(to_string(policy_of(state))));
}

void kernel_args(benchmark::internal::Benchmark* b) {
    for (long c : {50, 256, 1024})
        for (long p : {0, 1}) b->Args({c, p});
}

BENCHMARK(BM_ExpandBlinding)->Apply(kernel_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaskSingle)->Apply(kernel_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecoverBins)->Apply(kernel_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Session)->Args({0, 0})->Args({0, 1})->Args({1, 0})->Args({1, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
