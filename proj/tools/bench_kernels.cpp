// Microbenchmarks pairing each serial reference kernel with its OpenMP twin
// on identical inputs. The omp rows use every available thread; with one
// core the pairs should land within noise of each other.
#include "chebtuck/kernels.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>
#include <random>

using namespace chebtuck;

namespace {

[[nodiscard]] Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
    return m;
}

[[nodiscard]] Vector random_vector(Index n, std::uint64_t seed) {
    return random_matrix(n, 1, seed).col(0);
}

void use_all_threads() { kernels::set_thread_count(omp_get_max_threads()); }
void use_one_thread() { kernels::set_thread_count(1); }

void bm_mode_multiply(benchmark::State& state, bool parallel) {
    DenseTensor3 t(64, 64, 64);
    std::mt19937_64 gen(1);
    for (double& v : t.values) v = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
    const Matrix m = random_matrix(64, 64, 2);
    DenseTensor3 out;
    parallel ? use_all_threads() : use_one_thread();
    for (auto _ : state) {
        if (parallel)
            kernels::omp::mode_multiply(t, m, 1, out);
        else
            kernels::serial::mode_multiply(t, m, 1, out);
        benchmark::DoNotOptimize(out.values.data());
    }
}

void bm_gram(benchmark::State& state, bool parallel) {
    const Matrix s = random_matrix(129, 8192, 3);
    Matrix g;
    parallel ? use_all_threads() : use_one_thread();
    for (auto _ : state) {
        if (parallel)
            kernels::omp::gram(s, g);
        else
            kernels::serial::gram(s, g);
        benchmark::DoNotOptimize(g.data());
    }
}

void bm_newton_columns(benchmark::State& state, bool parallel) {
    const Index n = 2048;
    const double h = 2.0 / static_cast<double>(n - 1);
    Vector grid(n);
    for (Index i = 0; i < n; ++i) grid(i) = -1.0 + h * static_cast<double>(i);
    Vector tq(129);
    for (Index k = 0; k < 129; ++k)
        tq(k) = 0.05 * std::exp(0.05 * static_cast<double>(k));
    Matrix out;
    parallel ? use_all_threads() : use_one_thread();
    for (auto _ : state) {
        if (parallel)
            kernels::omp::newton_columns(grid, h, tq, true, out);
        else
            kernels::serial::newton_columns(grid, h, tq, true, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_lift_columns(benchmark::State& state, bool parallel) {
    const Matrix b = random_matrix(512, 64, 4);
    Vector points(1024);
    for (Index i = 0; i < 1024; ++i)
        points(i) = -1.0 + 2.0 * static_cast<double>(i) / 1023.0;
    Matrix out;
    parallel ? use_all_threads() : use_one_thread();
    for (auto _ : state) {
        if (parallel)
            kernels::omp::lift_columns(b, InterpKind::Spline, points, out);
        else
            kernels::serial::lift_columns(b, InterpKind::Spline, points, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_dct_columns(benchmark::State& state, bool parallel) {
    const Matrix q = random_matrix(1025, 64, 5);
    Matrix out;
    parallel ? use_all_threads() : use_one_thread();
    for (auto _ : state) {
        if (parallel)
            kernels::omp::dct_columns(q, out);
        else
            kernels::serial::dct_columns(q, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_core_accumulate(benchmark::State& state, bool parallel) {
    const Matrix g1 = random_matrix(12, 129, 6);
    const Matrix g2 = random_matrix(12, 129, 7);
    const Matrix g3 = random_matrix(12, 129, 8);
    const Vector w = random_vector(129, 9);
    DenseTensor3 core;
    parallel ? use_all_threads() : use_one_thread();
    for (auto _ : state) {
        if (parallel)
            kernels::omp::core_accumulate(g1, g2, g3, w, core);
        else
            kernels::serial::core_accumulate(g1, g2, g3, w, core);
        benchmark::DoNotOptimize(core.values.data());
    }
}

void bm_cp_densify(benchmark::State& state, bool parallel) {
    const Vector xi = random_vector(64, 10);
    const Matrix u1 = random_matrix(64, 64, 11);
    const Matrix u2 = random_matrix(64, 64, 12);
    const Matrix u3 = random_matrix(64, 64, 13);
    DenseTensor3 out;
    parallel ? use_all_threads() : use_one_thread();
    for (auto _ : state) {
        if (parallel)
            kernels::omp::cp_densify(xi, u1, u2, u3, out);
        else
            kernels::serial::cp_densify(xi, u1, u2, u3, out);
        benchmark::DoNotOptimize(out.values.data());
    }
}

}  // namespace

BENCHMARK_CAPTURE(bm_mode_multiply, serial, false);
BENCHMARK_CAPTURE(bm_mode_multiply, omp, true);
BENCHMARK_CAPTURE(bm_gram, serial, false);
BENCHMARK_CAPTURE(bm_gram, omp, true);
BENCHMARK_CAPTURE(bm_newton_columns, serial, false);
BENCHMARK_CAPTURE(bm_newton_columns, omp, true);
BENCHMARK_CAPTURE(bm_lift_columns, serial, false);
BENCHMARK_CAPTURE(bm_lift_columns, omp, true);
BENCHMARK_CAPTURE(bm_dct_columns, serial, false);
BENCHMARK_CAPTURE(bm_dct_columns, omp, true);
BENCHMARK_CAPTURE(bm_core_accumulate, serial, false);
BENCHMARK_CAPTURE(bm_core_accumulate, omp, true);
BENCHMARK_CAPTURE(bm_cp_densify, serial, false);
BENCHMARK_CAPTURE(bm_cp_densify, omp, true);

BENCHMARK_MAIN();
