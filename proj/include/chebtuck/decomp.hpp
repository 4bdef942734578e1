#pragma once

#include "chebtuck/cp_tensor.hpp"
#include "chebtuck/tucker_tensor.hpp"
#include "chebtuck/types.hpp"

#include <array>

namespace chebtuck {

// Truncation bookkeeping. Tail energies are relative: discarded energy of the
// mode-l spectrum divided by its total, so sqrt(tail_rel[l]) is the relative
// Frobenius loss of that mode's projection.
struct TruncationReport {
    std::array<Index, 3> ranks{0, 0, 0};
    std::array<double, 3> tail_rel{0.0, 0.0, 0.0};
    std::array<Vector, 3> singular_values;  // full spectra, descending
    double rel_error_est = 0.0;
    int iterations = 0;
};

struct TruncatedSvd {
    Matrix u;       // orthonormal columns
    Vector sigma;   // descending, kept part
    Matrix v;       // orthonormal columns
    double tail_energy = 0.0;  // absolute discarded energy
    Vector full_sigma;
};

// Rank chosen minimal with tail energy <= tol^2 ||M||_F^2 (strict preference
// for smaller rank on ties). Rank 1 is always kept for nonzero input.
[[nodiscard]] TruncatedSvd truncated_svd(const Matrix& m, double tol);

// Fixed target rank (clamped to min(rows, cols)).
[[nodiscard]] TruncatedSvd truncated_svd_rank(const Matrix& m, Index rank);

// Singular spectrum and left vectors only. Wide matrices (cols much greater
// than rows) go through a long-double Gram eigensolve; the rest use BDCSVD.
// The route is decided by shape alone, so results are deterministic.
struct Spectrum {
    Matrix u;
    Vector sigma;  // full, descending
};
[[nodiscard]] Spectrum left_spectrum(const Matrix& m);

struct TuckerResult {
    TuckerTensor tucker;
    TruncationReport report;
};

// Successive SVDs of the mode unfoldings, each truncated with the per-mode
// relative budget eps/sqrt(3); the core is T contracted with the factor
// transposes. Overall relative error <= eps.
[[nodiscard]] TuckerResult hosvd(const DenseTensor3& t, double eps);

// HOSVD initialization followed by ALS sweeps (each factor refreshed from the
// dominant left subspace of the contracted unfolding). Stops when the fit
// improves by less than 0.01 eps or after 50 sweeps; if the achieved error
// still exceeds eps, deficient mode ranks grow by 1 and the sweep restarts.
[[nodiscard]] TuckerResult tucker_als(const DenseTensor3& t, double eps);

// Reduced HOSVD of a CP input: per-mode truncated SVD of the weight-scaled
// side matrices U^(l) diag(xi) (relative budget eps/sqrt(3) per mode), core
// assembled as sum_k xi_k (V1^T u_k^1) o (V2^T u_k^2) o (V3^T u_k^3) in fixed
// k order, never materializing the dense tensor.
[[nodiscard]] TuckerResult rhosvd(const CpTensor& c, double eps);

// Truncation bound m^{d/2} ||xi|| sum_l sqrt(tail_rel[l]); an upper
// bound for the grid sup-norm error of dropping those subspaces.
[[nodiscard]] double rhosvd_error_bound(const TruncationReport& report, double xi_norm,
                                        Index m, int d);

}  // namespace chebtuck
