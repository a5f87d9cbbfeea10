#include <benchmark/benchmark.h>

#include "flh/network.hpp"

namespace {

void bench_model(benchmark::State& state, flh::Model model) {
    flh::Network net = flh::five_link_network();
    flh::Scenario sc =
        flh::random_scenario(net, 42, 8, 1.0, static_cast<std::size_t>(state.range(0)), model);
    for (auto _ : state) {
        auto res = flh::simulate(net, sc);
        benchmark::DoNotOptimize(res.links.back().n_dn.back());
    }
}

}  // namespace

BENCHMARK_CAPTURE(bench_model, flh, flh::Model::flh)->Arg(100)->Arg(500)->Arg(2000);
BENCHMARK_CAPTURE(bench_model, lh, flh::Model::lh)->Arg(100)->Arg(500)->Arg(2000);
BENCHMARK_CAPTURE(bench_model, ctm, flh::Model::ctm)->Arg(100)->Arg(500)->Arg(2000);
BENCHMARK_CAPTURE(bench_model, ltm, flh::Model::ltm)->Arg(100)->Arg(500)->Arg(2000);

BENCHMARK_MAIN();
