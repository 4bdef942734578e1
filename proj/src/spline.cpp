#include "chebtuck/spline.hpp"

#include "chebtuck/chebyshev.hpp"

#include <cmath>
#include <numbers>

namespace chebtuck {

CubicSpline1D spline_fit(const Vector& values) {
    const Index n = values.size();
    require(n >= 4, "spline_fit: need at least four knots");
    for (Index i = 0; i < n; ++i)
        require(std::isfinite(values(i)), "spline_fit: non-finite data");

    CubicSpline1D s;
    s.n = n;
    s.h = 2.0 / static_cast<double>(n - 1);
    s.y = values;
    s.m2.resize(n);

    // Moment equations M_{i-1} + 4 M_i + M_{i+1} = d_i at interior knots; the
    // not-a-knot conditions M_0 - 2M_1 + M_2 = 0 (mirrored on the right) are
    // eliminated into the first and last rows, keeping the system tridiagonal.
    const Index k = n - 2;
    Vector diag(k), sup(k), sub(k), rhs(k);
    const double hh = s.h * s.h;
    for (Index i = 1; i <= k; ++i)
        rhs(i - 1) = 6.0 * (values(i - 1) - 2.0 * values(i) + values(i + 1)) / hh;
    for (Index i = 0; i < k; ++i) {
        diag(i) = 4.0;
        sup(i) = 1.0;
        sub(i) = 1.0;
    }
    diag(0) = 6.0;
    sup(0) = 0.0;
    sub(0) = 0.0;
    diag(k - 1) = 6.0;
    sup(k - 1) = 0.0;
    sub(k - 1) = 0.0;

    Vector cp(k), dp(k);
    cp(0) = sup(0) / diag(0);
    dp(0) = rhs(0) / diag(0);
    for (Index i = 1; i < k; ++i) {
        const double piv = diag(i) - sub(i) * cp(i - 1);
        cp(i) = sup(i) / piv;
        dp(i) = (rhs(i) - sub(i) * dp(i - 1)) / piv;
    }
    s.m2(k) = dp(k - 1);
    for (Index i = k - 2; i >= 0; --i) s.m2(i + 1) = dp(i) - cp(i) * s.m2(i + 2);
    s.m2(0) = 2.0 * s.m2(1) - s.m2(2);
    s.m2(n - 1) = 2.0 * s.m2(n - 2) - s.m2(n - 3);
    return s;
}

double spline_eval(const CubicSpline1D& s, double x, bool* extrapolated) {
    require(s.n >= 4, "spline_eval: unfitted spline");
    if (extrapolated != nullptr) *extrapolated = (x < -1.0 || x > 1.0);
    const Index n = s.n;
    const double u = (x + 1.0) / s.h;
    // Exact knot hits return the stored value, so interpolation at knots is exact.
    if (u >= 0.0 && u <= static_cast<double>(n - 1)) {
        const Index r = static_cast<Index>(std::llround(u));
        if (r >= 0 && r < n && x == s.knot(r)) return s.y(r);
    }
    Index i = static_cast<Index>(std::floor(u));
    if (i < 0) i = 0;
    if (i > n - 2) i = n - 2;
    const double tau = x - s.knot(i);
    const double b = (s.y(i + 1) - s.y(i)) / s.h - s.h * (2.0 * s.m2(i) + s.m2(i + 1)) / 6.0;
    const double c = s.m2(i) / 2.0;
    const double d = (s.m2(i + 1) - s.m2(i)) / (6.0 * s.h);
    return s.y(i) + tau * (b + tau * (c + tau * d));
}

Vector spline_eval_many(const CubicSpline1D& s, const Vector& xs) {
    Vector out(xs.size());
    for (Index i = 0; i < xs.size(); ++i) out(i) = spline_eval(s, xs(i));
    return out;
}

double third_derivative_variation(const CubicSpline1D& s) {
    require(s.n >= 4, "third_derivative_variation: unfitted spline");
    double v = 0.0;
    for (Index i = 1; i <= s.n - 2; ++i)
        v += std::abs(s.m2(i + 1) - 2.0 * s.m2(i) + s.m2(i - 1)) / s.h;
    return v;
}

double spline_cheb_error_bound(double v, Index m) {
    require(v >= 0.0, "spline_cheb_error_bound: variation must be nonnegative");
    require(m >= 4, "spline_cheb_error_bound: need m >= 4");
    const double d = static_cast<double>(m - 3);
    return 4.0 * v / (3.0 * std::numbers::pi * d * d * d);
}

double trivariate_spline_eval(const DenseTensor3& f, double x1, double x2, double x3) {
    const Index n1 = f.dims[0], n2 = f.dims[1], n3 = f.dims[2];
    require(n1 >= 4 && n2 >= 4 && n3 >= 4,
            "trivariate_spline_eval: need at least four knots per mode");
    Matrix g(n1, n2);
    Vector fiber(n3);
    for (Index j = 0; j < n2; ++j)
        for (Index i = 0; i < n1; ++i) {
            for (Index k = 0; k < n3; ++k) fiber(k) = f.at(i, j, k);
            g(i, j) = spline_eval(spline_fit(fiber), x3);
        }
    Vector row(n2), v1(n1);
    for (Index i = 0; i < n1; ++i) {
        row = g.row(i).transpose();
        v1(i) = spline_eval(spline_fit(row), x2);
    }
    return spline_eval(spline_fit(v1), x1);
}

DenseTensor3 trivariate_spline_at_cheb(const DenseTensor3& f, const std::array<Index, 3>& m) {
    for (int l = 0; l < 3; ++l) {
        require(f.dims[l] >= 4, "trivariate_spline_at_cheb: need at least four knots per mode");
        require(m[l] >= 2, "trivariate_spline_at_cheb: need at least two nodes per mode");
    }
    DenseTensor3 cur = f;
    for (int mode = 3; mode >= 1; --mode) {
        const Vector nodes = cheb_nodes(m[static_cast<std::size_t>(mode - 1)]);
        const Matrix u = unfold(cur, mode);
        Matrix lifted;
        kernels::lift_columns(u, InterpKind::Spline, nodes, lifted);
        std::array<Index, 3> nd = cur.dims;
        nd[static_cast<std::size_t>(mode - 1)] = m[static_cast<std::size_t>(mode - 1)];
        cur = fold(lifted, mode, nd);
    }
    return cur;
}

}  // namespace chebtuck
