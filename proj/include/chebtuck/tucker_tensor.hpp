#pragma once

#include "chebtuck/dense_tensor.hpp"
#include "chebtuck/types.hpp"

#include <array>

namespace chebtuck {

// Orthogonal Tucker format: core beta contracted with per-mode orthonormal
// factor matrices V^(l) of shape n_l x r_l.
struct TuckerTensor {
    DenseTensor3 core;
    std::array<Matrix, 3> factors;

    [[nodiscard]] std::array<Index, 3> ranks() const { return core.dims; }
    [[nodiscard]] std::array<Index, 3> dims() const {
        return {factors[0].rows(), factors[1].rows(), factors[2].rows()};
    }
};

// Two-level format: outer orthonormal factors A^(l) around an inner Tucker
// tensor (core eta, inner factors G^(l)) living on the outer rank space.
struct HybridTucker {
    std::array<Matrix, 3> outer_factors;  // n_l x r_l
    TuckerTensor inner;                   // ranks r0_l <= r_l
};

[[nodiscard]] DenseTensor3 tucker_to_dense(const TuckerTensor& t);

// ||T||_F = ||core||_F thanks to orthonormal factors.
[[nodiscard]] double frobenius_norm(const TuckerTensor& t);

// Merges the two levels into one Tucker tensor with factors A^(l) G^(l) and
// the inner core; products of orthonormal factors stay orthonormal.
[[nodiscard]] TuckerTensor hybrid_to_tucker(const HybridTucker& h);

// Max principal angle deviation: ||V^T V - I||_max; 0 for orthonormal V.
[[nodiscard]] double orthonormality_defect(const Matrix& v);

}  // namespace chebtuck
