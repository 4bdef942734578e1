#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chebtuck/decomp.hpp"

#include <cmath>
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

Matrix orthonormal_factor(Index n, Index r, std::uint64_t seed) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(n, r, seed));
    Matrix q = Matrix::Identity(n, r);
    q = qr.householderQ() * q;
    return q;
}

double dense_rel_error(const DenseTensor3& t, const TuckerTensor& approx) {
    const DenseTensor3 hat = tucker_to_dense(approx);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        const double d = t.values[i] - hat.values[i];
        num += d * d;
        den += t.values[i] * t.values[i];
    }
    return std::sqrt(num / den);
}

// Exact Tucker rank-(2,2,2) tensor on a 6x6x6 grid.
DenseTensor3 rank222(std::uint64_t seed) {
    TuckerTensor t;
    t.core = random_tensor(2, 2, 2, seed);
    t.factors = {orthonormal_factor(6, 2, seed + 1), orthonormal_factor(6, 2, seed + 2),
                 orthonormal_factor(6, 2, seed + 3)};
    return tucker_to_dense(t);
}

}  // namespace

TEST_CASE("truncated_svd on the identity keeps everything at tol 0") {
    const TruncatedSvd r = truncated_svd(Matrix::Identity(4, 4), 0.0);
    CHECK(r.sigma.size() == 4);
    for (Index i = 0; i < 4; ++i) CHECK(r.sigma(i) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.tail_energy == 0.0);
}

TEST_CASE("truncated_svd detects rank-1 structure") {
    const Matrix a = random_matrix(7, 1, 1), b = random_matrix(5, 1, 2);
    const TruncatedSvd r = truncated_svd(a * b.transpose(), 1e-12);
    CHECK(r.sigma.size() == 1);
}

TEST_CASE("fixed-rank truncation satisfies Eckart-Young exactly") {
    const Matrix m = random_matrix(20, 8, 3);
    const TruncatedSvd r = truncated_svd_rank(m, 5);
    CHECK(r.sigma.size() == 5);
    const Matrix approx = r.u * r.sigma.asDiagonal() * r.v.transpose();
    const double resid = (m - approx).norm();
    const Vector& s = r.full_sigma;
    const double tail = std::sqrt(s(5) * s(5) + s(6) * s(6) + s(7) * s(7));
    CHECK(resid == doctest::Approx(tail).epsilon(1e-12));
    CHECK(r.tail_energy == doctest::Approx(tail * tail).epsilon(1e-12));
}

TEST_CASE("tied singular values truncate toward the smaller rank") {
    // Budget exactly two of four unit values: the strict test keeps cutting.
    const TruncatedSvd r = truncated_svd(Matrix::Identity(4, 4), std::sqrt(0.5));
    CHECK(r.sigma.size() == 2);
}

TEST_CASE("left_spectrum wide-matrix route matches the direct SVD") {
    const Matrix m = random_matrix(10, 1200, 4);  // takes the Gram route
    const Spectrum sp = left_spectrum(m);
    const Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    CHECK(sp.sigma.size() == svd.singularValues().size());
    for (Index i = 0; i < sp.sigma.size(); ++i)
        CHECK(std::abs(sp.sigma(i) - svd.singularValues()(i)) <= 1e-10 * svd.singularValues()(0));
    // Same left subspace: cross-projection has unit singular values.
    const Matrix cross = sp.u.transpose() * svd.matrixU();
    const Eigen::JacobiSVD<Matrix> csvd(cross);
    CHECK(csvd.singularValues()(cross.cols() - 1) >= 1.0 - 1e-9);
}

TEST_CASE("hosvd recovers exact Tucker structure") {
    const DenseTensor3 t = rank222(10);
    const TuckerResult r = hosvd(t, 1e-12);
    CHECK(r.report.ranks == std::array<Index, 3>{2, 2, 2});
    CHECK(dense_rel_error(t, r.tucker) <= 1e-12);
    for (const auto& v : r.tucker.factors) CHECK(orthonormality_defect(v) <= 1e-10);
}

TEST_CASE("hosvd keeps full rank on the superdiagonal tensor") {
    DenseTensor3 t(3, 3, 3);
    for (Index i = 0; i < 3; ++i) t.at(i, i, i) = 1.0;
    const TuckerResult r = hosvd(t, 1e-10);
    CHECK(r.report.ranks == std::array<Index, 3>{3, 3, 3});
}

TEST_CASE("hosvd meets a loose budget on random input") {
    const DenseTensor3 t = random_tensor(10, 10, 10, 20);
    const TuckerResult r = hosvd(t, 0.1);
    CHECK(dense_rel_error(t, r.tucker) <= 0.1);
    CHECK(r.report.rel_error_est <= 0.1);
}

TEST_CASE("tucker_als nails rank-(1,1,1) input") {
    const Matrix a = random_matrix(5, 1, 30), b = random_matrix(6, 1, 31),
                 c = random_matrix(7, 1, 32);
    DenseTensor3 t(5, 6, 7);
    for (Index k = 0; k < 7; ++k)
        for (Index j = 0; j < 6; ++j)
            for (Index i = 0; i < 5; ++i) t.at(i, j, k) = a(i, 0) * b(j, 0) * c(k, 0);
    const TuckerResult r = tucker_als(t, 1e-10);
    CHECK(r.report.ranks == std::array<Index, 3>{1, 1, 1});
    CHECK(r.report.rel_error_est <= 1e-13);
    CHECK(dense_rel_error(t, r.tucker) <= 1e-13);
}

TEST_CASE("tucker_als meets tight budgets on random input") {
    const DenseTensor3 t = random_tensor(8, 8, 8, 40);
    const TuckerResult r = tucker_als(t, 1e-6);
    CHECK(dense_rel_error(t, r.tucker) <= 1e-6);
    CHECK(r.report.iterations >= 1);
    for (const auto& v : r.tucker.factors) CHECK(orthonormality_defect(v) <= 1e-10);
}

TEST_CASE("ALS never does worse than HOSVD at equal ranks") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const DenseTensor3 t = random_tensor(6, 6, 6, 100 + trial);
        const TuckerResult h = hosvd(t, 0.3);
        const TuckerResult a = tucker_als(t, 0.3);
        REQUIRE(a.report.ranks == h.report.ranks);
        CHECK(dense_rel_error(t, a.tucker) <= dense_rel_error(t, h.tucker) + 1e-14);
    }
}

TEST_CASE("rank monotonicity in the budget") {
    const DenseTensor3 t = random_tensor(12, 12, 12, 50);
    std::array<Index, 3> prev{0, 0, 0};
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
        const TuckerResult r = hosvd(t, eps);
        for (int l = 0; l < 3; ++l)
            CHECK(r.report.ranks[static_cast<std::size_t>(l)] >=
                  prev[static_cast<std::size_t>(l)]);
        prev = r.report.ranks;
    }
}

TEST_CASE("rhosvd separates orthogonal CP terms exactly") {
    // Orthonormal columns per mode: both terms are essential.
    Matrix u = Matrix::Zero(5, 2);
    u(0, 0) = 1.0;
    u(1, 1) = 1.0;
    Vector w(2);
    w << 2.0, -1.0;
    CpTensor c;
    c.weights = w;
    c.factors = {u, u, u};
    const TuckerResult r = rhosvd(c, 1e-12);
    CHECK(r.report.ranks == std::array<Index, 3>{2, 2, 2});
    const DenseTensor3 dense = cp_to_dense(c);
    CHECK(dense_rel_error(dense, r.tucker) <= 1e-13);
}

TEST_CASE("rhosvd collapses duplicated rank-1 terms") {
    const Matrix a = random_matrix(6, 1, 60), b = random_matrix(6, 1, 61),
                 c = random_matrix(6, 1, 62);
    Vector w(2);
    w << 1.0, 3.0;
    const CpTensor dup = make_cp(
        w, {(Matrix(6, 2) << a, a).finished(), (Matrix(6, 2) << b, b).finished(),
            (Matrix(6, 2) << c, c).finished()});
    const TuckerResult r = rhosvd(dup, 1e-10);
    CHECK(r.report.ranks == std::array<Index, 3>{1, 1, 1});
}

TEST_CASE("rhosvd error stays inside the truncation bound") {
    std::mt19937_64 gen(70);
    Vector w(10);
    for (Index k = 0; k < 10; ++k) w(k) = 2.0 * unit_double(gen) - 1.0;
    const CpTensor c = make_cp(
        w, {random_matrix(30, 10, 71), random_matrix(30, 10, 72), random_matrix(30, 10, 73)});
    const TuckerResult r = rhosvd(c, 1e-6);
    const DenseTensor3 dense = cp_to_dense(c);
    const DenseTensor3 hat = tucker_to_dense(r.tucker);
    double err = 0.0;
    for (std::size_t i = 0; i < dense.values.size(); ++i) {
        const double d = dense.values[i] - hat.values[i];
        err += d * d;
    }
    err = std::sqrt(err);
    const double bound = rhosvd_error_bound(r.report, c.weights.norm(), 30, 3);
    CHECK(err <= bound + 1e-12);
    for (const auto& v : r.tucker.factors) CHECK(orthonormality_defect(v) <= 1e-10);

    CpTensor empty;
    empty.weights = Vector(0);
    empty.factors = {Matrix(4, 0), Matrix(4, 0), Matrix(4, 0)};
    CHECK_THROWS_AS((void)rhosvd(empty, 1e-6), std::invalid_argument);
}

TEST_CASE("rhosvd matches dense hosvd subspaces without ties") {
    // Weights spread out to keep the spectra cleanly separated.
    Vector w(4);
    w << 8.0, 4.0, 2.0, 1.0;
    const CpTensor c = make_cp(
        w, {random_matrix(7, 4, 80), random_matrix(7, 4, 81), random_matrix(7, 4, 82)});
    const TuckerResult r = rhosvd(c, 1e-3);
    const TuckerResult h = hosvd(cp_to_dense(c), 1e-3);
    REQUIRE(r.report.ranks == h.report.ranks);
    for (int l = 0; l < 3; ++l) {
        const Matrix cross = r.tucker.factors[static_cast<std::size_t>(l)].transpose() *
                             h.tucker.factors[static_cast<std::size_t>(l)];
        const Eigen::JacobiSVD<Matrix> svd(cross);
        CHECK(svd.singularValues()(cross.cols() - 1) >= 1.0 - 1e-8);
    }
}

TEST_CASE("rhosvd_error_bound arithmetic") {
    TruncationReport rep;
    CHECK(rhosvd_error_bound(rep, 3.0, 4, 3) == 0.0);
    rep.tail_rel = {0.0625, 0.0, 0.0};  // tau = 0.25
    CHECK(rhosvd_error_bound(rep, 2.0, 4, 3) == doctest::Approx(4.0).epsilon(1e-14));

    // Independent re-derivation from the stored spectra.
    Vector w(6);
    w << 5.0, 3.0, 2.0, 1.0, 0.5, 0.25;
    const CpTensor c = make_cp(
        w, {random_matrix(9, 6, 90), random_matrix(9, 6, 91), random_matrix(9, 6, 92)});
    const TuckerResult r = rhosvd(c, 1e-2);
    double sum = 0.0;
    for (int l = 0; l < 3; ++l) {
        const Vector& s = r.report.singular_values[static_cast<std::size_t>(l)];
        double tail = 0.0, total = 0.0;
        for (Index i = 0; i < s.size(); ++i) {
            total += s(i) * s(i);
            if (i >= r.report.ranks[static_cast<std::size_t>(l)]) tail += s(i) * s(i);
        }
        sum += std::sqrt(tail / total);
    }
    const double want = std::pow(9.0, 1.5) * c.weights.norm() * sum;
    CHECK(rhosvd_error_bound(r.report, c.weights.norm(), 9, 3) ==
          doctest::Approx(want).epsilon(1e-12));
}
