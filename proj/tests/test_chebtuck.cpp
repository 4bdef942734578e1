#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chebtuck/chebtuck.hpp"
#include "chebtuck/chebyshev.hpp"
#include "chebtuck/serialize.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>

using namespace chebtuck;

namespace {

double unit_double(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

double runge(double x, double y, double z) { return 1.0 / (1.0 + x * x + y * y + z * z); }

Vector uniform_pts(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

// Sup error of g against f over a p^3 uniform probe grid.
double probe_sup(const ChebTuckFunction& g, const ScalarField& f, Index p) {
    const Vector pts = uniform_pts(p);
    double worst = 0.0;
    for (Index a = 0; a < p; ++a)
        for (Index b = 0; b < p; ++b)
            for (Index c = 0; c < p; ++c)
                worst = std::max(worst, std::abs(evaluate(g, pts(a), pts(b), pts(c)) -
                                                 f(pts(a), pts(b), pts(c))));
    return worst;
}

double naive_t(Index k, double x) { return std::cos(static_cast<double>(k) * std::acos(x)); }

double tail_rel_at(const Vector& sigma, Index rank) {
    double kept = 0.0, total = 0.0;
    for (Index i = 0; i < sigma.size(); ++i) {
        total += sigma(i) * sigma(i);
        if (i < rank) kept += sigma(i) * sigma(i);
    }
    return total == 0.0 ? 0.0 : (total - kept) / total;
}

}  // namespace

TEST_CASE("separable monomial collapses to a single coefficient") {
    const ScalarField f = [](double x, double y, double z) { return x * y * z; };
    const ChebTuckFunction g = build_from_function(f, {5, 5, 5}, 1e-12);
    CHECK(g.ranks() == std::array<Index, 3>{1, 1, 1});
    REQUIRE(g.provenance.has_value());
    CHECK(g.provenance->source == BuildSource::Function);
    std::mt19937_64 gen(7);
    for (int i = 0; i < 50; ++i) {
        const double x = 2.0 * unit_double(gen) - 1.0;
        const double y = 2.0 * unit_double(gen) - 1.0;
        const double z = 2.0 * unit_double(gen) - 1.0;
        CHECK(std::abs(evaluate(g, x, y, z) - x * y * z) <= 1e-13);
    }
}

TEST_CASE("separable exponential compresses to rank one") {
    const ScalarField f = [](double x, double y, double z) { return std::exp(x + y + z); };
    const ChebTuckFunction g = build_from_function(f, {17, 17, 17}, 1e-10);
    CHECK(g.ranks() == std::array<Index, 3>{1, 1, 1});
    CHECK(probe_sup(g, f, 10) <= 1e-9);
}

TEST_CASE("smooth non-separable field meets the probe target below full rank") {
    const ChebTuckFunction g = build_from_function(runge, {33, 33, 33}, 1e-8);
    CHECK(probe_sup(g, runge, 21) <= 1e-6);
    for (int l = 0; l < 3; ++l) CHECK(g.ranks()[static_cast<std::size_t>(l)] < 33);
}

TEST_CASE("function build samples each node triple exactly once") {
    std::atomic<long long> calls{0};
    const ScalarField f = [&calls](double x, double y, double z) {
        calls.fetch_add(1, std::memory_order_relaxed);
        return std::sin(x) + y * z;
    };
    (void)build_from_function(f, {4, 5, 6}, 1e-8);
    CHECK(calls.load() == 4 * 5 * 6);

    const ScalarField bad = [](double x, double y, double z) {
        return (x == 1.0 && y == 1.0 && z == 1.0) ? std::nan("") : x;
    };
    CHECK_THROWS_AS((void)build_from_function(bad, {4, 4, 4}, 1e-8), std::invalid_argument);
}

TEST_CASE("compression adds at most the scaled truncation budget to interpolation error") {
    struct Case {
        ScalarField f;
        Index m;
    };
    const Case cases[] = {
        {[](double x, double y, double z) { return std::exp(x + y + z); }, 17},
        {runge, 25},
    };
    for (const Case& tc : cases) {
        const ChebTuckFunction exact = build_from_function(tc.f, {tc.m, tc.m, tc.m}, 0.0);
        const double interp_err = probe_sup(exact, tc.f, 21);
        const double c_norm = frobenius_norm(exact.cct);
        for (const double eps : {1e-4, 1e-8}) {
            const ChebTuckFunction g = build_from_function(tc.f, {tc.m, tc.m, tc.m}, eps);
            const double total = probe_sup(g, tc.f, 21);
            const double budget = std::pow(static_cast<double>(tc.m), 1.5) * eps * c_norm;
            CHECK(total <= interp_err + budget + 1e-12);
        }
    }
}

TEST_CASE("eps = 0 build reproduces the node samples") {
    const std::array<Index, 3> m{7, 8, 9};
    const ChebTuckFunction g = build_from_function(runge, m, 0.0);
    const std::array<Vector, 3> nodes{cheb_nodes(m[0]), cheb_nodes(m[1]), cheb_nodes(m[2])};
    for (Index a = 0; a < m[0]; ++a)
        for (Index b = 0; b < m[1]; ++b)
            for (Index c = 0; c < m[2]; ++c) {
                const double want = runge(nodes[0](a), nodes[1](b), nodes[2](c));
                CHECK(std::abs(evaluate(g, nodes[0](a), nodes[1](b), nodes[2](c)) - want) <=
                      1e-12);
            }
    // Same statement through the grid discretizer on the node point sets.
    const DenseTensor3 dense = tucker_to_dense(evaluate_grid_points(g, nodes));
    for (Index a = 0; a < m[0]; ++a)
        for (Index b = 0; b < m[1]; ++b)
            for (Index c = 0; c < m[2]; ++c)
                CHECK(std::abs(dense.at(a, b, c) - runge(nodes[0](a), nodes[1](b), nodes[2](c))) <=
                      1e-12);
}

TEST_CASE("grid build recovers cubic products at the grid") {
    const Index n = 16;
    const Vector pts = uniform_pts(n);
    DenseTensor3 f(n, n, n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b)
            for (Index c = 0; c < n; ++c) f.at(a, b, c) = pts(a) * pts(b) * pts(c);
    const ChebTuckFunction g = build_from_grid(f, {9, 9, 9}, 1e-12);
    REQUIRE(g.provenance.has_value());
    CHECK(g.provenance->source == BuildSource::Grid);
    const DenseTensor3 back = tucker_to_dense(evaluate_grid(g, {n, n, n}));
    double worst = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        worst = std::max(worst, std::abs(back.values[i] - f.values[i]));
    CHECK(worst <= 1e-12);
}

TEST_CASE("grid and cp builds agree on CP-structured data") {
    const Index n = 16;
    const Vector pts = uniform_pts(n);
    Matrix u1(n, 2), u2(n, 2), u3(n, 2);
    for (Index i = 0; i < n; ++i) {
        const double x = pts(i);
        u1(i, 0) = std::sin(std::numbers::pi * x) + 0.3;
        u1(i, 1) = std::exp(-x * x);
        u2(i, 0) = std::cos(x);
        u2(i, 1) = 1.0 / (2.0 + x);
        u3(i, 0) = x * x + 0.5;
        u3(i, 1) = std::cosh(x / 2.0);
    }
    Vector w(2);
    w << 2.0, 0.7;
    const CpTensor cp = make_cp(w, {u1, u2, u3});
    const ChebTuckFunction ga = build_from_grid(cp_to_dense(cp), {17, 17, 17}, 1e-12);
    const ChebTuckFunction gb = build_from_cp(cp, {17, 17, 17}, 1e-12);
    const Vector probes = uniform_pts(11);
    double worst = 0.0;
    for (Index a = 0; a < 11; ++a)
        for (Index b = 0; b < 11; ++b)
            for (Index c = 0; c < 11; ++c)
                worst = std::max(worst, std::abs(evaluate(ga, probes(a), probes(b), probes(c)) -
                                                 evaluate(gb, probes(a), probes(b), probes(c))));
    CHECK(worst <= 1e-10);
}

TEST_CASE("rank-one cubic CP is recovered exactly at grid points") {
    const Index n = 16;
    const Vector pts = uniform_pts(n);
    Matrix u1(n, 1), u2(n, 1), u3(n, 1);
    for (Index i = 0; i < n; ++i) {
        const double x = pts(i);
        u1(i, 0) = x * x * x - x;
        u2(i, 0) = 2.0 * x * x + 1.0;
        u3(i, 0) = x + 3.0;
    }
    Vector w(1);
    w << 2.5;
    const CpTensor cp = make_cp(w, {u1, u2, u3});
    const ChebTuckFunction g = build_from_cp(cp, {9, 9, 9}, 1e-12);
    REQUIRE(g.provenance.has_value());
    CHECK(g.provenance->source == BuildSource::Cp);
    const DenseTensor3 want = cp_to_dense(cp);
    const DenseTensor3 got = tucker_to_dense(evaluate_grid(g, {n, n, n}));
    double worst = 0.0;
    for (std::size_t i = 0; i < want.values.size(); ++i)
        worst = std::max(worst, std::abs(got.values[i] - want.values[i]));
    CHECK(worst <= 1e-12);
}

TEST_CASE("uncompressed CP interpolant obeys the weighted-delta bound") {
    const Index n = 32, r = 4;
    const Vector pts = uniform_pts(n);
    std::array<Matrix, 3> u{Matrix(n, r), Matrix(n, r), Matrix(n, r)};
    for (Index i = 0; i < n; ++i) {
        const double x = pts(i);
        for (Index k = 0; k < r; ++k) {
            const double s = static_cast<double>(k + 1);
            u[0](i, k) = std::sin(s * x) + 1.5;
            u[1](i, k) = std::cos(s * x * x);
            u[2](i, k) = std::exp(-s * x * x / 4.0);
        }
    }
    Vector w(r);
    w << 3.0, 1.0, 0.4, 0.1;
    const CpTensor cp = make_cp(w, {u[0], u[1], u[2]});
    const ChebTuckFunction g = build_from_cp(cp, {33, 33, 33}, 0.0);
    REQUIRE(g.provenance.has_value());
    const double delta = g.provenance->delta;
    CHECK(delta > 0.0);
    CHECK(g.provenance->xi_l1 == doctest::Approx(cp.weights.cwiseAbs().sum()).epsilon(1e-14));

    const DenseTensor3 want = cp_to_dense(cp);
    const DenseTensor3 got = tucker_to_dense(evaluate_grid(g, {n, n, n}));
    double dev = 0.0;
    for (std::size_t i = 0; i < want.values.size(); ++i)
        dev = std::max(dev, std::abs(got.values[i] - want.values[i]));
    const double rhs = g.provenance->xi_l1 * (std::pow(1.0 + delta, 3) - 1.0);
    CHECK(dev <= rhs + 1e-15);
}

TEST_CASE("point evaluation matches the naive coefficient sum") {
    const ChebTuckFunction g = build_from_function(runge, {6, 7, 8}, 0.0);
    const DenseTensor3 cct = tucker_to_dense(g.cct);
    std::mt19937_64 gen(11);
    for (int p = 0; p < 10; ++p) {
        const double x = 2.0 * unit_double(gen) - 1.0;
        const double y = 2.0 * unit_double(gen) - 1.0;
        const double z = 2.0 * unit_double(gen) - 1.0;
        double want = 0.0;
        for (Index a = 0; a < 6; ++a)
            for (Index b = 0; b < 7; ++b)
                for (Index c = 0; c < 8; ++c)
                    want += cct.at(a, b, c) * naive_t(a, x) * naive_t(b, y) * naive_t(c, z);
        CHECK(std::abs(evaluate(g, x, y, z) - want) <= 1e-12);
    }
    // T_k(1) = 1, so the corner value is the plain sum of all coefficients.
    double total = 0.0;
    for (const double v : cct.values) total += v;
    CHECK(evaluate(g, 1.0, 1.0, 1.0) == doctest::Approx(total).epsilon(1e-12));

    bool flag = false;
    (void)evaluate(g, 1.2, 0.0, 0.0, &flag);
    CHECK(flag);
    flag = true;
    (void)evaluate(g, 0.3, -0.4, 0.9, &flag);
    CHECK(!flag);
}

TEST_CASE("grid evaluation coheres with pointwise evaluation") {
    const ChebTuckFunction g = build_from_function(runge, {9, 9, 9}, 1e-6);
    const Index p = 5;
    const Vector pts = uniform_pts(p);
    const DenseTensor3 grid = tucker_to_dense(evaluate_grid(g, {p, p, p}));
    for (Index a = 0; a < p; ++a)
        for (Index b = 0; b < p; ++b)
            for (Index c = 0; c < p; ++c)
                CHECK(std::abs(grid.at(a, b, c) - evaluate(g, pts(a), pts(b), pts(c))) <= 1e-12);

    const TuckerTensor raw = evaluate_grid(g, {12, 12, 12});
    const TuckerTensor ortho = evaluate_grid(g, {12, 12, 12}, true);
    for (int l = 0; l < 3; ++l)
        CHECK(orthonormality_defect(ortho.factors[static_cast<std::size_t>(l)]) <= 1e-12);
    const DenseTensor3 a = tucker_to_dense(raw);
    const DenseTensor3 b = tucker_to_dense(ortho);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    CHECK(worst <= 1e-12 * max_abs(a));
}

TEST_CASE("error bound arithmetic") {
    TruncationReport rep;
    rep.tail_rel = {0.0, 0.0, 0.0};
    CHECK(chebtuck_error_bound(0.0, 5.0, 2.0, rep, {9, 9, 9}) == 0.0);
    CHECK(chebtuck_error_bound(1e-4, 10.0, 2.0, rep, {9, 9, 9}) ==
          doctest::Approx(10.0 * std::numbers::e * 3e-4).epsilon(1e-12));
    // delta*d >= 1 switches to the product form for the interpolation term.
    CHECK(chebtuck_error_bound(0.5, 10.0, 2.0, rep, {9, 9, 9}) ==
          doctest::Approx(10.0 * (std::pow(1.5, 3) - 1.0)).epsilon(1e-12));
    // The truncation term alone: tails (0.04, 0, 0.01), m = 4, ||xi|| = 2.
    rep.tail_rel = {0.04, 0.0, 0.01};
    CHECK(chebtuck_error_bound(0.0, 5.0, 2.0, rep, {4, 4, 4}) ==
          doctest::Approx(8.0 * 2.0 * (0.2 + 0.1)).epsilon(1e-12));
}

TEST_CASE("adaptive rank selection is minimal for the bound") {
    const Index m = 14, r = 6;
    std::mt19937_64 gen(23);
    std::array<Matrix, 3> u{Matrix(m, r), Matrix(m, r), Matrix(m, r)};
    for (auto& f : u)
        for (Index i = 0; i < m; ++i)
            for (Index k = 0; k < r; ++k) f(i, k) = 2.0 * unit_double(gen) - 1.0;
    Vector w(r);
    w << 10.0, 5.0, 2.0, 1.0, 0.5, 0.1;
    const CpTensor cp = make_cp(w, {u[0], u[1], u[2]});
    const double xi_l1 = 20.0;

    const RankSelection huge = adaptive_rank_select(cp, 1e9, 1e-9, xi_l1);
    CHECK(huge.feasible);
    CHECK(huge.ranks == std::array<Index, 3>{1, 1, 1});

    const RankSelection blocked = adaptive_rank_select(cp, 1e-3, 1e-2, 10.0);
    CHECK(!blocked.feasible);

    const double eps_total = 1e-3;
    const double delta = 1e-9;
    const RankSelection sel = adaptive_rank_select(cp, eps_total, delta, xi_l1);
    REQUIRE(sel.feasible);
    CHECK(sel.bound <= eps_total);

    const double xi_l2 = cp.weights.norm();
    std::array<Vector, 3> sigma;
    for (int l = 0; l < 3; ++l)
        sigma[static_cast<std::size_t>(l)] =
            left_spectrum(side_matrix_scaled(cp, l + 1)).sigma;
    const auto bound_at = [&](const std::array<Index, 3>& ranks) {
        TruncationReport rep;
        rep.ranks = ranks;
        for (int l = 0; l < 3; ++l)
            rep.tail_rel[static_cast<std::size_t>(l)] =
                tail_rel_at(sigma[static_cast<std::size_t>(l)],
                            ranks[static_cast<std::size_t>(l)]);
        return chebtuck_error_bound(delta, xi_l1, xi_l2, rep, {m, m, m});
    };
    CHECK(bound_at(sel.ranks) == doctest::Approx(sel.bound).epsilon(1e-10));
    for (int l = 0; l < 3; ++l) {
        if (sel.ranks[static_cast<std::size_t>(l)] == 1) continue;
        std::array<Index, 3> dec = sel.ranks;
        dec[static_cast<std::size_t>(l)] -= 1;
        CHECK(bound_at(dec) > eps_total);
    }
}

TEST_CASE("serialization preserves values and drops provenance") {
    const ScalarField f = [](double x, double y, double z) { return std::exp(x + y + z); };
    const ChebTuckFunction g = build_from_function(f, {9, 9, 9}, 1e-6);
    REQUIRE(g.provenance.has_value());
    const auto dir = std::filesystem::temp_directory_path() / "chebtuck_test_chebtuck";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "fn.ctk").string();
    write_ctk(g, path);
    CHECK(peek_kind(path) == CtkKind::ChebTuck);
    const ChebTuckFunction r = read_ctk_chebtuck(path);
    CHECK(r.m == g.m);
    CHECK(!r.provenance.has_value());
    for (int l = 0; l < 3; ++l)
        CHECK((r.cct.factors[static_cast<std::size_t>(l)] -
               g.cct.factors[static_cast<std::size_t>(l)])
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    std::mt19937_64 gen(3);
    for (int p = 0; p < 5; ++p) {
        const double x = 2.0 * unit_double(gen) - 1.0;
        const double y = 2.0 * unit_double(gen) - 1.0;
        const double z = 2.0 * unit_double(gen) - 1.0;
        CHECK(evaluate(r, x, y, z) == evaluate(g, x, y, z));
    }
}
