#pragma once

#include "chebtuck/cp_tensor.hpp"
#include "chebtuck/types.hpp"

#include <vector>

namespace chebtuck {

// Gaussian-sum surrogate of 1/rho: nodes t_k = s e^{k h_M} and weights
// w_k = s (2 h_M / sqrt(pi)) e^{k h_M}, k = -M..M, h_M = pi/sqrt(M+1),
// s = 1/sqrt(rho_min rho_max). Validated by a 1000-point log-spaced sweep.
struct SincQuadrature {
    Index m_half = 0;  // M
    double step = 0.0; // h_M
    Vector t;          // 2M+1 nodes, ascending, positive
    Vector w;          // positive weights
    double rho_min = 0.0, rho_max = 0.0;
    double max_rel_error = 0.0;  // measured on [rho_min, rho_max]
};

[[nodiscard]] SincQuadrature sinc_quadrature(Index m_half, double rho_min, double rho_max);

enum class CellIntegration { ExactErf, Midpoint };

// Collocation tensor of the Newton kernel over an axis grid: radially
// symmetric rank-R CP with identical side matrices. Cells are centered at the
// grid nodes (edges t_i -/+ h/2), which keeps every canonical vector exactly
// symmetric about the grid center. Terms are ordered by ascending t_k; terms
// contributing < 1e-16 of the leading w_k * sup^3 are pruned.
struct NewtonCp {
    Index n = 0;           // number of grid points
    double h = 0.0;        // grid spacing
    double center = 0.0;   // 1-based center index of the grid
    Vector grid;           // axis positions
    CpTensor cp;           // identical factors per mode
    Vector t_kept;         // quadrature nodes surviving the pruning
    Index quad_m_half = 0;
    CellIntegration integration = CellIntegration::ExactErf;
};

// The computational-box kernel: n >= 4 and even, grid t_i = -1 + (i-1)h with
// h = 2/(n-1), center (n+1)/2.
[[nodiscard]] NewtonCp newton_cp(Index n, const SincQuadrature& quad,
                                 CellIntegration integration = CellIntegration::ExactErf);

// The reference kernel on the twice-larger box: 2n points at (i-n)h, i=1..2n,
// same spacing, center index n (a grid node sits exactly at the origin).
[[nodiscard]] NewtonCp newton_reference_cp(Index n, const SincQuadrature& quad,
                                           CellIntegration integration = CellIntegration::ExactErf);

// Convenience: quadrature with the defaults rho_min = h(n), rho_max = sqrt(12).
[[nodiscard]] SincQuadrature default_quadrature(Index n, Index m_half);

// Default window radius in grid cells; grows like 4 sqrt(n) so the classifier
// threshold t* = sqrt(ln(1/tau_cut))/(sigma h) stays Chebyshev-resolvable.
[[nodiscard]] Index default_sigma(Index n);

// Term partition into short range (sup outside the sigma-cell window around
// the center <= tau_cut times the overall sup) and long range (the rest).
// Exact partition: short + long reassembles the parent termwise.
struct RsSplit {
    CpTensor short_part;
    CpTensor long_part;
    std::vector<Index> short_terms;  // 0-based indices into the parent CP
    std::vector<Index> long_terms;
    double gamma = 0.0;   // window radius in index units (= sigma)
    double tau_cut = 0.0;
};

[[nodiscard]] RsSplit range_separate(const NewtonCp& kernel, Index sigma_cells,
                                     double tau_cut = 1e-4);

}  // namespace chebtuck
