#pragma once

#include "chebtuck/dense_tensor.hpp"
#include "chebtuck/types.hpp"

#include <array>

namespace chebtuck {

// Rank-R canonical format: weights plus three side matrices whose columns are
// unit 2-norm. The zero tensor is canonically R = 0 with empty factors.
struct CpTensor {
    Vector weights;                  // R entries, signed
    std::array<Matrix, 3> factors;   // n_l x R each, unit-norm columns

    [[nodiscard]] Index rank() const { return weights.size(); }
    [[nodiscard]] std::array<Index, 3> dims() const {
        return {factors[0].rows(), factors[1].rows(), factors[2].rows()};
    }
};

// Builds a CpTensor from possibly unnormalized columns; column norms are
// absorbed into the weights. Terms whose weight collapses to exactly zero
// (any zero column) are dropped; an all-zero input yields R = 0.
[[nodiscard]] CpTensor make_cp(const Vector& weights, const std::array<Matrix, 3>& raw_factors);

// Keeps the given subset of terms (0-based), preserving order.
[[nodiscard]] CpTensor cp_select_terms(const CpTensor& c, const std::vector<Index>& terms);

[[nodiscard]] DenseTensor3 cp_to_dense(const CpTensor& c);

// Gram formula, never materializes the tensor:
// ||C||^2 = sum_{k,l} xi_k xi_l prod_m <u_k^(m), u_l^(m)>.
[[nodiscard]] double frobenius_norm(const CpTensor& c);

// Side matrix scaled by the weights, S^(l) = U^(l) diag(xi); the object whose
// singular value tails drive RHOSVD truncation. ||S^(l)||_F = ||xi||_2.
[[nodiscard]] Matrix side_matrix_scaled(const CpTensor& c, int mode);

}  // namespace chebtuck
