#pragma once

#include "chebtuck/chebtuck.hpp"
#include "chebtuck/cp_tensor.hpp"
#include "chebtuck/decomp.hpp"
#include "chebtuck/newton.hpp"
#include "chebtuck/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace chebtuck {

struct ParticleSystem {
    Matrix positions;  // N x 3, strictly inside (-1,1)^3
    Vector charges;    // N
    [[nodiscard]] Index count() const { return charges.size(); }
};

// Whitespace-separated "x y z charge" lines, '#' comments, UTF-8.
[[nodiscard]] ParticleSystem load_particles(const std::string& path);
void save_particles(const ParticleSystem& sys, const std::string& path);

// Pseudo-random cluster in [lo,hi]^3 with pairwise Euclidean separation
// >= min_separation and alternating +-1 charges; reproducible by seed.
// Throws after bounded retries if the packing is infeasible.
[[nodiscard]] ParticleSystem generate_cluster(Index n, std::uint64_t seed,
                                              double min_separation = 0.05,
                                              double lo = -0.8, double hi = 0.8);

// Unit charges on an L1 x L2 x L3 lattice centered in the box; requires
// margin >= spacing to the box walls. Vacancies are removed sites.
[[nodiscard]] ParticleSystem generate_lattice(const std::array<Index, 3>& dims, double spacing,
                                              const std::vector<Index>& vacancies = {});
[[nodiscard]] ParticleSystem generate_lattice(const std::array<Index, 3>& dims, double spacing,
                                              Index vacancy_count, std::uint64_t seed);

// Nearest n-grid node of coordinate x, 1-based: round((x+1)/h) + 1.
[[nodiscard]] Index snap_index(double x, Index n);

// Shift-and-window assembly of the long-range potential sum: for particle nu
// at snapped indices (j1,j2,j3) and each long reference vector p~_k (length
// 2n, centered at index n), the window p~_k(n-j_l+1 .. 2n-j_l) becomes a
// mode-l column; weights are z_nu * xi_k, particle-major order. The split
// must come from the 2n reference kernel.
[[nodiscard]] CpTensor assemble_long_range(const ParticleSystem& sys, const RsSplit& reference,
                                           Index n);

// C2T compression of the assembled long part (delegates to rhosvd).
[[nodiscard]] TuckerResult compress_long_range(const CpTensor& a, double eps);

// Short-range bookkeeping per the cumulated-tensor structure: one reference
// window of half-width gamma plus (center index, charge) pairs. Overlapping
// windows are summed and flagged.
struct ShortRangeField {
    Index n = 0;
    Index gamma = 0;
    Matrix window;          // (2 gamma + 1) x R_s, one axis factor
    Vector xi;              // short-part weights
    std::vector<std::array<Index, 3>> centers;  // 1-based snapped indices
    Vector charges;
    bool overlaps = false;
};

[[nodiscard]] ShortRangeField short_range_cumulated(const ParticleSystem& sys,
                                                    const RsSplit& reference, Index n);

// The full separated potential: assembled long part (rank N * R_l), its
// compressed Tucker form, and the cumulated short-range record.
struct RsPotential {
    Index n = 0;
    CpTensor long_cp;
    TuckerTensor long_tucker;
    TruncationReport long_report;
    ShortRangeField short_part;
};

[[nodiscard]] RsPotential build_rs_potential(const ParticleSystem& sys, const RsSplit& reference,
                                             Index n, double eps);

// Value at one grid point (1-based indices): the sum of window contributions
// of particles within gamma in every coordinate.
[[nodiscard]] double short_query(const ShortRangeField& f, Index i1, Index i2, Index i3);

// Adds the short-range field on the plane i3 (1-based) to out (n x n).
void short_add_to_slice(const ShortRangeField& f, Index i3, Matrix& out);

// One n x n plane of a CP tensor at mode-3 index i3 (1-based), materialized
// by a single row contraction: U1 diag(xi .* u3row) U2^T.
[[nodiscard]] Matrix slice_from_cp(const CpTensor& c, Index i3);

// The same plane of a ChebTuck function on the uniform n-grid at x3 = t_{i3}.
[[nodiscard]] Matrix slice_from_chebtuck(const ChebTuckFunction& g, Index n, Index i3);

// Plane of a grid-level Tucker tensor (factors n_l x r_l) at 1-based i3.
[[nodiscard]] Matrix slice_from_tucker(const TuckerTensor& t, Index i3);

// Relative l_inf discrepancy on the plane i3 = n/2: max |approx - ref| over
// the slice divided by max |ref|. The reference slice is materialized lazily,
// never the full tensor.
[[nodiscard]] double middle_slice_error(const ChebTuckFunction& approx, const CpTensor& ref,
                                        Index n);
[[nodiscard]] double middle_slice_error(const TuckerTensor& approx_grid, const CpTensor& ref,
                                        Index n);
[[nodiscard]] double middle_slice_error(const ChebTuckFunction& approx, const DenseTensor3& ref);
[[nodiscard]] double middle_slice_error(const TuckerTensor& approx_grid, const DenseTensor3& ref);

}  // namespace chebtuck
