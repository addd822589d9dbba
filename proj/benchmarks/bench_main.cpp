#include <benchmark/benchmark.h>

#include <random>

#include "wander/approx.hpp"
#include "wander/branches.hpp"
#include "wander/schedule.hpp"

using namespace wander;

namespace {

Polynomial random_newton(int degree) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    NewtonForm t;
    for (int i = 0; i < degree; ++i) t.nodes.emplace_back(u(rng), u(rng));
    for (int i = 0; i <= degree; ++i) t.coeffs.emplace_back(u(rng) * 1e-3, u(rng) * 1e-3);
    t.scale = 0.3;
    return Polynomial::monomial({0.0, 3.0}) + Polynomial::from_newton(t);
}

void BM_PolynomialEval(benchmark::State& state) {
    auto p = random_newton(static_cast<int>(state.range(0)));
    cplx z(0.05, 0.02);
    for (auto _ : state) benchmark::DoNotOptimize(p.with_derivative(z));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PolynomialEval)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oN);

void BM_ArnoldiFit(benchmark::State& state) {
    const double eps = std::pow(10.0, -static_cast<double>(state.range(0)));
    ApproximationTask task;
    task.pieces.push_back({"D", Region::disk(0.0, 0.108), [](cplx z) { return 3.0 * z; }});
    task.pieces.push_back({"A", Region::disk(-0.25, 1.0 / 18), [](cplx) { return cplx(-0.25); }});
    task.pieces.push_back({"B", Region::annular_sector(5.0 / 27, 7.0 / 27, 0.12), [](cplx z) { return z + 1.0; }});
    task.constraints.push_back({0.0, 0.0, cplx(3.0)});
    task.epsilon = eps;
    int degree = 0;
    for (auto _ : state) degree = approximate(task).degree;
    state.counters["degree"] = degree;
}
BENCHMARK(BM_ArnoldiFit)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_InvertBranch(benchmark::State& state) {
    auto p = random_newton(200);
    Region D = Region::disk(0.0, 0.108);
    cplx w(0.15, 0.05);
    for (auto _ : state) benchmark::DoNotOptimize(invert_branch(p, D, w, w / 3.0));
}
BENCHMARK(BM_InvertBranch);

void BM_Density(benchmark::State& state) {
    auto s = lambda_schedule(0.5, 1);
    for (auto _ : state) benchmark::DoNotOptimize(density(s, state.range(0)));
}
BENCHMARK(BM_Density)->RangeMultiplier(100)->Range(100, 100000000);

void BM_MultiCenterDensity(benchmark::State& state) {
    MultiCenterSchedule ms({0.5, 0.3, 0.2});
    for (auto _ : state) benchmark::DoNotOptimize(multi_center_density(ms, 2, state.range(0)));
}
BENCHMARK(BM_MultiCenterDensity)->RangeMultiplier(100)->Range(100, 10000000);

}  // namespace
BENCHMARK_MAIN();
