#include "chebtuck/chebyshev.hpp"

#include "chebtuck/kernels.hpp"

#include <cmath>
#include <numbers>

namespace chebtuck {

Vector cheb_nodes(Index m) {
    require(m >= 2, "cheb_nodes: need at least two nodes");
    Vector s(m);
    const double denom = static_cast<double>(2 * (m - 1));
    for (Index j = 0; j < m; ++j)
        s(j) = std::sin(std::numbers::pi * static_cast<double>(m - 1 - 2 * j) / denom);
    return s;
}

Matrix dct_matrix(Index m) {
    require(m >= 2, "dct_matrix: need at least two nodes");
    Matrix w(m, m);
    const double scale = 2.0 / static_cast<double>(m - 1);
    const double step = std::numbers::pi / static_cast<double>(m - 1);
    for (Index k = 0; k < m; ++k)
        for (Index j = 0; j < m; ++j) {
            double v = scale * std::cos(static_cast<double>(k) * static_cast<double>(j) * step);
            if (k == 0 || k == m - 1) v *= 0.5;
            if (j == 0 || j == m - 1) v *= 0.5;
            w(k, j) = v;
        }
    return w;
}

ChebSeries1D coeffs_from_values(const Vector& values) {
    require(values.size() >= 2, "coeffs_from_values: need at least two values");
    Matrix q(values.size(), 1);
    q.col(0) = values;
    Matrix out;
    kernels::dct_columns(q, out);
    return {out.col(0)};
}

double cheb_eval(const ChebSeries1D& s, double x, bool* extrapolated) {
    const Index m = s.degree_count();
    require(m >= 1, "cheb_eval: empty series");
    if (extrapolated != nullptr) *extrapolated = std::abs(x) > 1.0;
    double b1 = 0.0, b2 = 0.0;
    const double x2 = 2.0 * x;
    for (Index k = m - 1; k >= 1; --k) {
        const double t = x2 * b1 - b2 + s.coeffs(k);
        b2 = b1;
        b1 = t;
    }
    return x * b1 - b2 + s.coeffs(0);
}

Vector cheb_basis_row(Index m, double x) {
    require(m >= 1, "cheb_basis_row: need at least one entry");
    Vector r(m);
    r(0) = 1.0;
    if (m == 1) return r;
    r(1) = x;
    const double x2 = 2.0 * x;
    for (Index k = 2; k < m; ++k) r(k) = x2 * r(k - 1) - r(k - 2);
    return r;
}

Matrix cheb_vandermonde(const Vector& points, Index m) {
    require(m >= 1, "cheb_vandermonde: need at least one column");
    const Index n = points.size();
    Matrix b(n, m);
    b.col(0).setOnes();
    if (m == 1) return b;
    b.col(1) = points;
    for (Index k = 2; k < m; ++k)
        b.col(k) = 2.0 * points.cwiseProduct(b.col(k - 1)) - b.col(k - 2);
    return b;
}

DenseTensor3 cct_from_values(const DenseTensor3& t) {
    for (int l = 0; l < 3; ++l)
        require(t.dims[l] >= 2, "cct_from_values: every mode needs at least two nodes");
    DenseTensor3 c = t;
    for (int mode = 1; mode <= 3; ++mode) {
        Matrix u = unfold(c, mode);
        Matrix v;
        kernels::dct_columns(u, v);
        c = fold(v, mode, c.dims);
    }
    return c;
}

double cct_eval(const DenseTensor3& c, double x1, double x2, double x3) {
    const Index m1 = c.dims[0], m2 = c.dims[1], m3 = c.dims[2];
    const Vector r1 = cheb_basis_row(m1, x1);
    const Vector r2 = cheb_basis_row(m2, x2);
    const Vector r3 = cheb_basis_row(m3, x3);
    double total = 0.0;
    for (Index k = 0; k < m3; ++k) {
        double s2 = 0.0;
        for (Index j = 0; j < m2; ++j) {
            double s1 = 0.0;
            const double* col = c.values.data() + (k * m2 + j) * m1;
            for (Index i = 0; i < m1; ++i) s1 += r1(i) * col[i];
            s2 += r2(j) * s1;
        }
        total += r3(k) * s2;
    }
    return total;
}

}  // namespace chebtuck
