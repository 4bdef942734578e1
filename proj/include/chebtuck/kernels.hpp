#pragma once

#include "chebtuck/dense_tensor.hpp"
#include "chebtuck/types.hpp"

#include <array>

namespace chebtuck {

enum class InterpKind { Spline, Linear, Nearest };

namespace kernels {

// Thread control. The default comes from CHEBTUCK_THREADS (capped by the OpenMP
// runtime) and is read once; set_thread_count overrides it at runtime.
[[nodiscard]] int thread_count();
void set_thread_count(int n);

// Every kernel below has a serial reference implementation and an OpenMP
// variant that must agree bitwise: parallel loops run only over independent
// outputs and every accumulation keeps the serial's summation order. The
// unqualified entry points dispatch on thread_count().

namespace serial {
void mode_multiply(const DenseTensor3& t, const Matrix& m, int mode, DenseTensor3& out);
// Row-space Gram of a wide matrix, G = S S^T, accumulated in long double.
void gram(const Matrix& s, Matrix& g);
// Gaussian cell averages: out(i, k) over cells centered at grid(i) with width
// h; erf_cells uses exact erf differences, otherwise the midpoint value.
void newton_columns(const Vector& grid, double h, const Vector& tq, bool erf_cells, Matrix& out);
// Interpolates each column of b (data on the uniform grid over [-1,1] with
// n = b.rows() knots) at the query points; spline columns are not-a-knot fits.
void lift_columns(const Matrix& b, InterpKind kind, const Vector& points, Matrix& out);
// DCT-I Chebyshev analysis of each column (values at descending Chebyshev
// nodes -> coefficients); FFTW-backed for m >= 8, dense matrix below.
void dct_columns(const Matrix& q, Matrix& out);
// core(a,b,c) = sum_k w(k) g1(a,k) g2(b,k) g3(c,k); every entry accumulates
// its k terms in ascending order with the grouping ((w*g3)*g2)*g1.
void core_accumulate(const Matrix& g1, const Matrix& g2, const Matrix& g3,
                     const Vector& w, DenseTensor3& core);
void cp_densify(const Vector& xi, const Matrix& u1, const Matrix& u2, const Matrix& u3,
                DenseTensor3& out);
}  // namespace serial

namespace omp {
void mode_multiply(const DenseTensor3& t, const Matrix& m, int mode, DenseTensor3& out);
void gram(const Matrix& s, Matrix& g);
void newton_columns(const Vector& grid, double h, const Vector& tq, bool erf_cells, Matrix& out);
void lift_columns(const Matrix& b, InterpKind kind, const Vector& points, Matrix& out);
void dct_columns(const Matrix& q, Matrix& out);
void core_accumulate(const Matrix& g1, const Matrix& g2, const Matrix& g3,
                     const Vector& w, DenseTensor3& core);
void cp_densify(const Vector& xi, const Matrix& u1, const Matrix& u2, const Matrix& u3,
                DenseTensor3& out);
}  // namespace omp

void mode_multiply(const DenseTensor3& t, const Matrix& m, int mode, DenseTensor3& out);
void gram(const Matrix& s, Matrix& g);
void newton_columns(const Vector& grid, double h, const Vector& tq, bool erf_cells, Matrix& out);
void lift_columns(const Matrix& b, InterpKind kind, const Vector& points, Matrix& out);
void dct_columns(const Matrix& q, Matrix& out);
void core_accumulate(const Matrix& g1, const Matrix& g2, const Matrix& g3,
                     const Vector& w, DenseTensor3& core);
void cp_densify(const Vector& xi, const Matrix& u1, const Matrix& u2, const Matrix& u3,
                DenseTensor3& out);

}  // namespace kernels
}  // namespace chebtuck
