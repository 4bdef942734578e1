#pragma once

#include "chebtuck/cp_tensor.hpp"
#include "chebtuck/decomp.hpp"
#include "chebtuck/kernels.hpp"
#include "chebtuck/tucker_tensor.hpp"
#include "chebtuck/types.hpp"

#include <functional>
#include <optional>

namespace chebtuck {

enum class BuildSource { Function, Grid, Cp };

// Reporting-only record; never feeds back into numerics.
struct Provenance {
    BuildSource source = BuildSource::Function;
    double eps = 0.0;
    TruncationReport report;
    double delta = 0.0;     // measured lift-vs-Chebyshev sup error (CP builds)
    double xi_l1 = 0.0;     // l1 weight norm of the input CP
    double xi_cct_l2 = 0.0; // l2 weight norm of the assembled coefficient CP
};

// A trivariate function on [-1,1]^3 stored as degrees m and a Tucker-
// compressed Chebyshev coefficient tensor (factors of shape m_l x r_l).
struct ChebTuckFunction {
    std::array<Index, 3> m{0, 0, 0};
    TuckerTensor cct;
    std::optional<Provenance> provenance;

    [[nodiscard]] std::array<Index, 3> ranks() const { return cct.ranks(); }
};

using ScalarField = std::function<double(double, double, double)>;

// Functional construction: sample f at all m1*m2*m3 Chebyshev node triples
// (exactly that many calls), DCT to the coefficient tensor, compress with
// tucker_als at eps. eps = 0 keeps the full-rank coefficient tensor.
[[nodiscard]] ChebTuckFunction build_from_function(const ScalarField& f,
                                                   const std::array<Index, 3>& m, double eps);

// Algebraic construction from a dense grid tensor: the trivariate not-a-knot
// spline interpolant of F plays the role of f; its node samples come from one
// separable sweep rather than per-point evaluation.
[[nodiscard]] ChebTuckFunction build_from_grid(const DenseTensor3& f,
                                               const std::array<Index, 3>& m, double eps);

// Algebraic construction from a CP tensor: per canonical vector and mode,
// interpolate (spline by default), evaluate at Chebyshev nodes, 1D DCT; the
// coefficient tensor stays in CP form and is compressed by rhosvd. Nothing of
// size n^3 or m^3 is ever materialized. delta (the measured interpolation sup
// error over a 10x oversampled uniform probe grid, maximized over vectors and
// modes) lands in the provenance record.
[[nodiscard]] ChebTuckFunction build_from_cp(const CpTensor& c, const std::array<Index, 3>& m,
                                             double eps, InterpKind interp = InterpKind::Spline);

// Factor-function evaluation: rows T_{1:m_l}(x_l) V^(l), then the core
// contraction; O(sum m_l r_l + r1 r2 r3) per point.
[[nodiscard]] double evaluate(const ChebTuckFunction& g, double x1, double x2, double x3,
                              bool* extrapolated = nullptr);

// Discretizes the factor functions on per-mode point sets: same core, factors
// B^(l) V^(l) with B^(l)(i,k) = T_k(pts_l(i)). Merged factors are generally
// not orthonormal; pass reorthonormalize to restore the invariant via QR.
[[nodiscard]] TuckerTensor evaluate_grid_points(const ChebTuckFunction& g,
                                                const std::array<Vector, 3>& pts,
                                                bool reorthonormalize = false);

// Uniform n_l-point grids on [-1,1].
[[nodiscard]] TuckerTensor evaluate_grid(const ChebTuckFunction& g,
                                         const std::array<Index, 3>& n,
                                         bool reorthonormalize = false);

// Grid sup-norm bound for a CP-built function:
//   ||xi||_1 e delta d + m^{d/2} ||xi_cct|| sum_l sqrt(tail_rel[l])
// when delta*d < 1; the first term falls back to ||xi||_1 ((1+delta)^d - 1)
// otherwise. m is the largest degree count.
[[nodiscard]] double chebtuck_error_bound(double delta, double xi_l1, double xi_cct_l2,
                                          const TruncationReport& report,
                                          const std::array<Index, 3>& m, int d = 3);

struct RankSelection {
    bool feasible = false;
    std::array<Index, 3> ranks{0, 0, 0};
    double bound = 0.0;
};

// Smallest per-mode ranks of the (normalized) coefficient CP such that the
// bound above stays <= eps_total: greedy, always cutting the mode whose next
// discarded singular value is smallest. Infeasible when the delta floor alone
// exceeds the target.
[[nodiscard]] RankSelection adaptive_rank_select(const CpTensor& cct_cp, double eps_total,
                                                 double delta, double xi_l1);

}  // namespace chebtuck
