#include <cmath>
#include <memory>

#include <benchmark/benchmark.h>

#include "pgdsdn/experiment.hpp"
#include "pgdsdn/filter.hpp"
#include "pgdsdn/sdn.hpp"
#include "pgdsdn/solver.hpp"

using namespace pgdsdn;

namespace {

struct Instance {
    GraphPtr graph;
    GraphFilter filter;
    Signal y;
};

Instance make_instance(std::size_t n) {
    auto g = std::make_shared<const Graph>(random_geometric_graph(n, std::sqrt(2.0 / n), 1234, 4096));
    auto h = build_experiment_filter_fig1(g, 0.05, 99);
    auto y = apply(h, add_uniform_noise(blockwise_polynomial(g), 0.2, 7));
    return {g, std::move(h), std::move(y)};
}

void BM_Apply(benchmark::State& state) {
    const auto inst = make_instance(static_cast<std::size_t>(state.range(0)));
    std::vector<double> out(inst.y.size());
    for (auto _ : state) {
        inst.filter.apply(inst.y.values(), out);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["nnz"] = static_cast<double>(inst.filter.nonzeros());
}
BENCHMARK(BM_Apply)->Arg(128)->Arg(512)->Arg(2048);

void BM_Solve(benchmark::State& state) {
    const auto inst = make_instance(512);
    const auto method = static_cast<Method>(state.range(0));
    SolverConfig cfg;
    cfg.method = method;
    cfg.max_iter = 200;
    cfg.params = method_params(inst.filter, method);
    for (auto _ : state) {
        auto r = solve(inst.filter, inst.y, cfg);
        benchmark::DoNotOptimize(r.x.values().data());
    }
    state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_Solve)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_DistributedPgda(benchmark::State& state) {
    const auto inst = make_instance(static_cast<std::size_t>(state.range(0)));
    Network::Options opts;
    opts.log.keep_messages = false;
    for (auto _ : state) {
        Network net(inst.graph, inst.filter.width(), opts);
        net.load_filter(inst.filter);
        net.load_observation(inst.y);
        net.reset_iterates();
        net.distributed_preconditioner();
        net.run_pgda(50);
        benchmark::DoNotOptimize(net.log().total_messages);
    }
}
BENCHMARK(BM_DistributedPgda)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_DirectOracle(benchmark::State& state) {
    const auto inst = make_instance(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto x = direct_solve_oracle(inst.filter, inst.y);
        benchmark::DoNotOptimize(x.values().data());
    }
}
BENCHMARK(BM_DirectOracle)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
