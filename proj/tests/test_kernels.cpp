#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chebtuck/chebyshev.hpp"
#include "chebtuck/kernels.hpp"

#include <cstring>
#include <random>

using namespace chebtuck;

namespace {

double unit_double(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = 2.0 * unit_double(gen) - 1.0;
    return m;
}

DenseTensor3 random_tensor(Index n1, Index n2, Index n3, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    DenseTensor3 t(n1, n2, n3);
    for (double& v : t.values) v = 2.0 * unit_double(gen) - 1.0;
    return t;
}

bool bitwise_equal(const DenseTensor3& a, const DenseTensor3& b) {
    return a.dims == b.dims &&
           std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) ==
               0;
}

// Runs the serial and OpenMP variants side by side with 3 threads forced.
struct ThreadGuard {
    ThreadGuard() { kernels::set_thread_count(3); }
    ~ThreadGuard() { kernels::set_thread_count(1); }
};

Vector uniform_grid(Index n) {
    Vector g(n);
    const double h = 2.0 / static_cast<double>(n - 1);
    for (Index i = 0; i < n; ++i) g(i) = -1.0 + h * static_cast<double>(i);
    return g;
}

}  // namespace

TEST_CASE("thread count control") {
    kernels::set_thread_count(2);
    CHECK(kernels::thread_count() == 2);
    kernels::set_thread_count(1);
    CHECK(kernels::thread_count() == 1);
    CHECK_THROWS_AS(kernels::set_thread_count(0), std::invalid_argument);
}

TEST_CASE("mode_multiply twins are bitwise equal") {
    ThreadGuard guard;
    const DenseTensor3 t = random_tensor(13, 9, 11, 1);
    for (int mode = 1; mode <= 3; ++mode) {
        const Matrix m =
            random_matrix(7, t.dims[static_cast<std::size_t>(mode - 1)],
                          static_cast<std::uint64_t>(10 + mode));
        DenseTensor3 a, b, c;
        kernels::serial::mode_multiply(t, m, mode, a);
        kernels::omp::mode_multiply(t, m, mode, b);
        kernels::mode_multiply(t, m, mode, c);
        CHECK(bitwise_equal(a, b));
        CHECK(bitwise_equal(a, c));
    }
    DenseTensor3 out;
    CHECK_THROWS_AS(kernels::mode_multiply(t, random_matrix(3, 5, 9), 1, out),
                    std::invalid_argument);
}

TEST_CASE("gram twins are bitwise equal") {
    ThreadGuard guard;
    const Matrix s = random_matrix(17, 401, 2);
    Matrix a, b, c;
    kernels::serial::gram(s, a);
    kernels::omp::gram(s, b);
    kernels::gram(s, c);
    CHECK(bitwise_equal(a, b));
    CHECK(bitwise_equal(a, c));
    // Gram really is S S^T.
    const Matrix direct = s * s.transpose();
    CHECK((a - direct).cwiseAbs().maxCoeff() <= 1e-12 * direct.cwiseAbs().maxCoeff());
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("newton_columns twins are bitwise equal") {
    ThreadGuard guard;
    const Vector grid = uniform_grid(33);
    Vector tq(5);
    tq << 0.25, 1.0, 3.0, 10.0, 40.0;
    for (bool erf_cells : {true, false}) {
        Matrix a, b, c;
        kernels::serial::newton_columns(grid, 2.0 / 32.0, tq, erf_cells, a);
        kernels::omp::newton_columns(grid, 2.0 / 32.0, tq, erf_cells, b);
        kernels::newton_columns(grid, 2.0 / 32.0, tq, erf_cells, c);
        CHECK(bitwise_equal(a, b));
        CHECK(bitwise_equal(a, c));
    }
}

TEST_CASE("lift_columns twins are bitwise equal for every interpolant") {
    ThreadGuard guard;
    const Matrix data = random_matrix(21, 14, 3);
    const Vector pts = cheb_nodes(37);
    for (InterpKind kind : {InterpKind::Spline, InterpKind::Linear, InterpKind::Nearest}) {
        Matrix a, b, c;
        kernels::serial::lift_columns(data, kind, pts, a);
        kernels::omp::lift_columns(data, kind, pts, b);
        kernels::lift_columns(data, kind, pts, c);
        CHECK(bitwise_equal(a, b));
        CHECK(bitwise_equal(a, c));
    }
}

TEST_CASE("dct_columns twins are bitwise equal across the size split") {
    ThreadGuard guard;
    for (Index m : {3, 5, 7, 8, 9, 64, 129}) {
        const Matrix q = random_matrix(m, 11, 400 + static_cast<std::uint64_t>(m));
        Matrix a, b, c;
        kernels::serial::dct_columns(q, a);
        kernels::omp::dct_columns(q, b);
        kernels::dct_columns(q, c);
        CHECK(bitwise_equal(a, b));
        CHECK(bitwise_equal(a, c));
    }
}

TEST_CASE("FFTW path agrees with the dense matrix to roundoff") {
    const Index m = 129;
    const Matrix q = random_matrix(m, 4, 5);
    Matrix fast;
    kernels::serial::dct_columns(q, fast);
    const Matrix w = dct_matrix(m);
    const Matrix dense = w * q;
    const double scale = dense.cwiseAbs().maxCoeff();
    CHECK((fast - dense).cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, scale));
}

TEST_CASE("core_accumulate twins are bitwise equal") {
    ThreadGuard guard;
    const Index r1 = 6, r2 = 5, r3 = 7, rank = 40;
    const Matrix g1 = random_matrix(r1, rank, 6), g2 = random_matrix(r2, rank, 7),
                 g3 = random_matrix(r3, rank, 8);
    std::mt19937_64 gen(9);
    Vector w(rank);
    for (Index k = 0; k < rank; ++k) w(k) = 2.0 * unit_double(gen) - 1.0;
    DenseTensor3 a, b, c;
    kernels::serial::core_accumulate(g1, g2, g3, w, a);
    kernels::omp::core_accumulate(g1, g2, g3, w, b);
    kernels::core_accumulate(g1, g2, g3, w, c);
    CHECK(bitwise_equal(a, b));
    CHECK(bitwise_equal(a, c));

    // Oracle: direct triple loop.
    double worst = 0.0;
    for (Index kc = 0; kc < r3; ++kc)
        for (Index jb = 0; jb < r2; ++jb)
            for (Index ia = 0; ia < r1; ++ia) {
                double s = 0.0;
                for (Index k = 0; k < rank; ++k) s += w(k) * g1(ia, k) * g2(jb, k) * g3(kc, k);
                worst = std::max(worst, std::abs(a.at(ia, jb, kc) - s));
            }
    CHECK(worst <= 1e-12);
}

TEST_CASE("cp_densify twins are bitwise equal") {
    ThreadGuard guard;
    const Matrix u1 = random_matrix(9, 12, 10), u2 = random_matrix(8, 12, 11),
                 u3 = random_matrix(7, 12, 12);
    std::mt19937_64 gen(13);
    Vector xi(12);
    for (Index k = 0; k < 12; ++k) xi(k) = 2.0 * unit_double(gen) - 1.0;
    DenseTensor3 a, b, c;
    kernels::serial::cp_densify(xi, u1, u2, u3, a);
    kernels::omp::cp_densify(xi, u1, u2, u3, b);
    kernels::cp_densify(xi, u1, u2, u3, c);
    CHECK(bitwise_equal(a, b));
    CHECK(bitwise_equal(a, c));
}

TEST_CASE("dispatcher uses the serial variant at one thread") {
    kernels::set_thread_count(1);
    const DenseTensor3 t = random_tensor(6, 6, 6, 14);
    const Matrix m = random_matrix(4, 6, 15);
    DenseTensor3 serial_out, dispatched;
    kernels::serial::mode_multiply(t, m, 2, serial_out);
    kernels::mode_multiply(t, m, 2, dispatched);
    CHECK(bitwise_equal(serial_out, dispatched));
}
