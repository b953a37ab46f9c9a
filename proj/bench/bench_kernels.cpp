#include <benchmark/benchmark.h>

#include <map>

#include "lpm/model.hpp"
#include "lpm/moments.hpp"
#include "lpm/partition.hpp"

using namespace lpm;

namespace {

const LinkParams kTheta{0.1, 0.7, 0.6};

const GeneratedNetwork& network(std::size_t n) {
    static std::map<std::size_t, GeneratedNetwork> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, sample_graph(n, kTheta, TruncGaussPrior{}, 7)).first;
    return it->second;
}

struct StoreFixture {
    Partition part;
    MomentStore store;
};

StoreFixture make_store(std::size_t n, int kappa) {
    const auto& net = network(n);
    StoreFixture f{build_partition(net.z, 0.1), {}};
    f.store = initialize_qm(net.z, net.graph, f.part, multi_index_set(kappa));
    return f;
}

void BM_ExactLikelihoodSerial(benchmark::State& state) {
    const auto& net = network(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(serial::exact_log_likelihood(net.graph, net.z, kTheta));
}

void BM_ExactLikelihoodParallel(benchmark::State& state) {
    const auto& net = network(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(exact_log_likelihood(net.graph, net.z, kTheta));
}

void BM_ApproxLikelihoodSerial(benchmark::State& state) {
    const auto f = make_store(static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(serial::approx_log_likelihood(f.store, kTheta));
    state.counters["K"] = static_cast<double>(f.part.K());
}

void BM_ApproxLikelihoodParallel(benchmark::State& state) {
    const auto f = make_store(static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(approx_log_likelihood(f.store, kTheta));
    state.counters["K"] = static_cast<double>(f.part.K());
}

void BM_InitializeMoments(benchmark::State& state) {
    const auto& net = network(static_cast<std::size_t>(state.range(0)));
    const auto part = build_partition(net.z, 0.1);
    const auto idx = multi_index_set(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(initialize_qm(net.z, net.graph, part, idx));
}

}  // namespace

BENCHMARK(BM_ExactLikelihoodSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactLikelihoodParallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApproxLikelihoodSerial)->Args({500, 1})->Args({500, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApproxLikelihoodParallel)->Args({500, 1})->Args({500, 4})->Args({2000, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InitializeMoments)->Args({2000, 1})->Args({2000, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
