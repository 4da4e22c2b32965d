#include <polyharm/planewave.hpp>
#include <polyharm/resonance.hpp>
#include <polyharm/series.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace polyharm;

namespace {

const Lattice& z2() {
    static const Lattice lattice = Lattice::cubic(2);
    return lattice;
}

Vec point(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

}  // namespace

static void BM_Assemble(benchmark::State& state) {
    const auto basis = PlanewaveBasis::full_ball(z2(), static_cast<double>(state.range(0)));
    const auto q = random_potential(1, z2(), 2.5, 1.0, 1.0);
    const Vec t = point(0.13, 0.37);
    for (auto _ : state) benchmark::DoNotOptimize(assemble(1, q, t, basis));
    state.counters["N"] = static_cast<double>(basis.size());
}
BENCHMARK(BM_Assemble)->Arg(4)->Arg(8)->Arg(12);

static void BM_Diagonalize(benchmark::State& state) {
    const auto basis = PlanewaveBasis::full_ball(z2(), static_cast<double>(state.range(0)));
    const auto q = cosine_potential(z2(), {{1, 0}, {0, 1}}, 0.2);
    const CMat H = assemble(1, q, point(0.13, 0.37), basis);
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(H));
    state.counters["N"] = static_cast<double>(basis.size());
}
BENCHMARK(BM_Diagonalize)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_EigenvaluesOnly(benchmark::State& state) {
    const auto basis = PlanewaveBasis::full_ball(z2(), static_cast<double>(state.range(0)));
    const auto q = cosine_potential(z2(), {{1, 0}, {0, 1}}, 0.2);
    const CMat H = assemble(1, q, point(0.13, 0.37), basis);
    for (auto _ : state) benchmark::DoNotOptimize(eigenvalues_only(H));
}
BENCHMARK(BM_EigenvaluesOnly)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_SeriesOrder(benchmark::State& state) {
    const auto q = random_potential(7, z2(), 1.5, 1.0, 0.5);
    const Vec v = point(14.3, 9.1);
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_series(0.0, v, 1, q, k));
    state.counters["support"] = static_cast<double>(q.size());
}
BENCHMARK(BM_SeriesOrder)->DenseRange(1, 5);

static void BM_Classify(benchmark::State& state) {
    ScaledOverrides o;
    o.thresholds = {2.0, 6.0};
    o.pool_radius = static_cast<double>(state.range(0));
    const auto c = derive_parameters(2, 1, 45.0, 50.0, CascadeMode::Scaled, o);
    const auto pool = direction_pool(z2(), c);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::vector<Vec> xs;
    for (int i = 0; i < 256; ++i) xs.push_back(50.0 * point(g(rng), g(rng)).normalized());
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(classify(xs[i++ % xs.size()], pool, c));
    state.counters["pool"] = static_cast<double>(pool.size());
}
BENCHMARK(BM_Classify)->Arg(2)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
