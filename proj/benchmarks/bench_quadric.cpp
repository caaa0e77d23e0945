#include <benchmark/benchmark.h>

#include <cmath>

#include "quadric/classify.hpp"
#include "quadric/closed_forms.hpp"
#include "quadric/green.hpp"
#include "quadric/heat.hpp"

using namespace quadric;

namespace {

CMatrix dense_hermitian(int n) {
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = std::sin(1.3 * i) + 1.5;
        for (int j = i + 1; j < n; ++j) {
            a(i, j) = cx(std::sin(0.7 * (i + 2 * j)), std::cos(1.1 * (3 * i + j)));
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

void bm_hermitian_eigen(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CMatrix a = dense_hermitian(n);
    for (auto _ : state) benchmark::DoNotOptimize(hermitian_eigen(a));
}
BENCHMARK(bm_hermitian_eigen)->Arg(2)->Arg(4)->Arg(8);

void bm_spectral_scan(benchmark::State& state) {
    const QuadricForm q = Preset::m3().quadric;
    int i = 0;
    for (auto _ : state) {
        const double th = 2.0 * 3.141592653589793 * (i++ % 512) / 512.0;
        const double al[2] = {std::cos(th), std::sin(th)};
        benchmark::DoNotOptimize(spectral(q, al));
    }
}
BENCHMARK(bm_spectral_scan);

void bm_integrate_r(benchmark::State& state) {
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    for (auto _ : state) {
        auto r = integrate_r([](double x, double omr) { return cx(std::sqrt(x / omr), 0.0); }, spec);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(bm_integrate_r);

void bm_heat_value(benchmark::State& state) {
    const QuadricForm q = Preset::m2().quadric;
    const std::vector<double> lam = {0.6, 0.8};
    const HeatContext ctx = make_heat_context(q, MultiIndex{}, lam);
    const std::vector<double> a2 = {0.4, 0.9};
    double s = 0.25;
    for (auto _ : state) {
        benchmark::DoNotOptimize(heat_value(ctx, a2, s));
        s = (s < 2.0) ? s + 1e-3 : 0.25;
    }
}
BENCHMARK(bm_heat_value);

void bm_green_point_m2(benchmark::State& state) {
    const QuadricForm q = Preset::m2().quadric;
    QuadratureSpec spec;
    spec.rel_tol = 1e-6;
    EvalPoint p;
    p.z = {cx(0.8, 0.1), cx(-0.4, 0.6)};
    p.t = {0.5, -0.3};
    p.q = 0;
    for (auto _ : state) benchmark::DoNotOptimize(eval_green(q, p, spec));
}
BENCHMARK(bm_green_point_m2);

void bm_szego_point_product_h(benchmark::State& state) {
    const QuadricForm q = Preset::product_heisenberg(std::vector<int>{1, 1}).quadric;
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    EvalPoint p;
    p.z = {cx(0.9, 0.1), cx(-0.5, 0.7)};
    p.t = {0.4, -0.9};
    p.q = 0;
    for (auto _ : state) benchmark::DoNotOptimize(eval_szego(q, p, spec));
}
BENCHMARK(bm_szego_point_product_h);

void bm_classify(benchmark::State& state) {
    const QuadricForm q = Preset::m3().quadric;
    SphereSampler s;
    s.m = 2;
    s.density = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(classify_degree(q, 1, s));
}
BENCHMARK(bm_classify)->Arg(512)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
