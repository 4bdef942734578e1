#pragma once

#include "chebtuck/dense_tensor.hpp"
#include "chebtuck/types.hpp"

namespace chebtuck {

// Coefficients for the basis T_0..T_{m-1} (degree-k Chebyshev polynomial of
// the first kind at slot k).
struct ChebSeries1D {
    Vector coeffs;
    [[nodiscard]] Index degree_count() const { return coeffs.size(); }
};

// Chebyshev nodes of the second kind, descending: s_1 = 1, s_m = -1, exactly
// symmetric about 0 (computed via the sine form, not cos, so s and -s pair up
// bitwise).
[[nodiscard]] Vector cheb_nodes(Index m);

// The inverse DCT matrix mapping node values to coefficients: entries
// (2/(m-1)) cos(k j pi/(m-1)) with boundary rows and columns halved (corner
// entries quartered).
[[nodiscard]] Matrix dct_matrix(Index m);

// Fast DCT-I analysis of values sampled at cheb_nodes(m), identical to
// dct_matrix(m) * values up to roundoff.
[[nodiscard]] ChebSeries1D coeffs_from_values(const Vector& values);

// Clenshaw evaluation. |x| > 1 is permitted (extrapolation) and reported
// through the optional flag.
[[nodiscard]] double cheb_eval(const ChebSeries1D& s, double x, bool* extrapolated = nullptr);

// Row vector (T_0(x), ..., T_{m-1}(x)).
[[nodiscard]] Vector cheb_basis_row(Index m, double x);

// Rows are cheb_basis_row(m, points(i)).
[[nodiscard]] Matrix cheb_vandermonde(const Vector& points, Index m);

// Trivariate analysis: C = T x1 W x2 W x3 W computed by fast DCT-I passes
// along each mode. Input dims are the degree counts.
[[nodiscard]] DenseTensor3 cct_from_values(const DenseTensor3& t);

// Trivariate synthesis at one point: sum_abc C(a,b,c) T_a(x1) T_b(x2) T_c(x3).
[[nodiscard]] double cct_eval(const DenseTensor3& c, double x1, double x2, double x3);

}  // namespace chebtuck
