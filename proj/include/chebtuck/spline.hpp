#pragma once

#include "chebtuck/dense_tensor.hpp"
#include "chebtuck/kernels.hpp"
#include "chebtuck/types.hpp"

namespace chebtuck {

// Cubic spline on the uniform knots t_i = -1 + (i-1)h, h = 2/(n-1), with
// not-a-knot end conditions. Stored as knot values plus second derivatives
// (moments); per-interval coefficients are derived on the fly.
struct CubicSpline1D {
    Index n = 0;
    double h = 0.0;
    Vector y;   // knot values
    Vector m2;  // second derivatives at knots

    [[nodiscard]] double knot(Index i) const { return -1.0 + h * static_cast<double>(i); }
};

// Fits the not-a-knot spline through values on the uniform grid; O(n)
// tridiagonal solve. Requires n >= 4 and finite data.
[[nodiscard]] CubicSpline1D spline_fit(const Vector& values);

// O(1) interval lookup. Outside [-1,1] the end cubic is extended and the
// optional flag is set.
[[nodiscard]] double spline_eval(const CubicSpline1D& s, double x, bool* extrapolated = nullptr);

[[nodiscard]] Vector spline_eval_many(const CubicSpline1D& s, const Vector& xs);

// Total variation of the (piecewise-constant) third derivative: the sum of
// its jumps at interior knots. Zero exactly when the spline is one cubic.
[[nodiscard]] double third_derivative_variation(const CubicSpline1D& s);

// Interpolation bound: a degree-m Chebyshev interpolant of a
// cubic spline with third-derivative variation v deviates by at most
// 4 v / (3 pi (m-3)^3) in sup norm.
[[nodiscard]] double spline_cheb_error_bound(double v, Index m);

// Tensor-product evaluation of the trivariate spline interpolant of f:
// fit/evaluate along mode 3, then 2, then 1. Grids are uniform per mode.
[[nodiscard]] double trivariate_spline_eval(const DenseTensor3& f, double x1, double x2, double x3);

// Separable sweep sampling the trivariate interpolant at all Chebyshev node
// triples (m1, m2, m3) at once; equals pointwise trivariate_spline_eval on
// that grid but costs O(n^3 + n^2 m + n m^2 + m^3) total.
[[nodiscard]] DenseTensor3 trivariate_spline_at_cheb(const DenseTensor3& f,
                                                     const std::array<Index, 3>& m);

}  // namespace chebtuck
