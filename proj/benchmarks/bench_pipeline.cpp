#include <smoothext/bench.hpp>
#include <smoothext/transmission.hpp>

#include <benchmark/benchmark.h>

#include <memory>

using namespace smoothext;

namespace {

std::shared_ptr<const Mesh> flat_mesh(int n) { return std::make_shared<const Mesh>(generate_square_split(n)); }

void BM_GenerateDisk(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(generate_disk_annulus(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_GenerateDisk)->Arg(8)->Arg(32);

void BM_Prepare(benchmark::State& state) {
    const auto problem = case_flat(-2.0).problem();
    const auto mesh = flat_mesh(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(prepare(problem, mesh));
    state.counters["vertices"] = static_cast<double>(mesh->vertex_count());
}
BENCHMARK(BM_Prepare)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Factorize(benchmark::State& state) {
    const auto ops = prepare(case_flat(-2.0).problem(), flat_mesh(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(factorize_spd(ops.extended_stiffness));
}
BENCHMARK(BM_Factorize)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SolveState(benchmark::State& state) {
    const auto ops = prepare(case_flat(-2.0).problem(), flat_mesh(static_cast<int>(state.range(0))));
    const Control w(ops.control_size(), 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(solve_state(ops, w));
}
BENCHMARK(BM_SolveState)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_Gradient(benchmark::State& state) {
    const auto ops = prepare(case_flat(-2.0).problem(), flat_mesh(static_cast<int>(state.range(0))));
    const Control w(ops.control_size(), 0.1);
    for (auto _ : state) {
        const auto s = solve_state(ops, w);
        benchmark::DoNotOptimize(gradient(ops, w, s, solve_adjoint(ops, s), 1e-4));
    }
}
BENCHMARK(BM_Gradient)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_Minimize(benchmark::State& state) {
    const auto ops = prepare(case_flat(-2.0).problem(), flat_mesh(static_cast<int>(state.range(0))));
    const double lambda = 0.002 * ops.h * ops.h;
    OptimizerOptions o;
    o.method = state.range(1) == 0 ? Method::lbfgs : Method::cg;
    for (auto _ : state) benchmark::DoNotOptimize(minimize(ops, lambda, Control(ops.control_size(), 0.0), o));
}
BENCHMARK(BM_Minimize)->Args({16, 0})->Args({16, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
