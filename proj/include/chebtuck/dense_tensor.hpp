#pragma once

#include "chebtuck/types.hpp"

#include <array>
#include <vector>

namespace chebtuck {

// Third-order dense tensor. Storage is first-index-fastest:
// values[i1 + n1*(i2 + n2*i3)], the one linearization convention used
// throughout the library. The mode-1 unfolding is therefore a free
// column-major view of the buffer.
struct DenseTensor3 {
    std::array<Index, 3> dims{0, 0, 0};
    std::vector<double> values;

    DenseTensor3() = default;
    DenseTensor3(Index n1, Index n2, Index n3)
        : dims{n1, n2, n3}, values(static_cast<std::size_t>(n1 * n2 * n3), 0.0) {
        require(n1 > 0 && n2 > 0 && n3 > 0, "DenseTensor3: dims must be positive");
    }

    [[nodiscard]] Index size() const { return dims[0] * dims[1] * dims[2]; }
    [[nodiscard]] double& at(Index i1, Index i2, Index i3) {
        return values[static_cast<std::size_t>(i1 + dims[0] * (i2 + dims[1] * i3))];
    }
    [[nodiscard]] double at(Index i1, Index i2, Index i3) const {
        return values[static_cast<std::size_t>(i1 + dims[0] * (i2 + dims[1] * i3))];
    }
};

// Mode-l unfolding, n_l x (product of the other two dims). Column j
// enumerates the remaining indices in ascending lexicographic order with the
// lower-numbered mode varying fastest. mode is 1-based (1|2|3).
[[nodiscard]] Matrix unfold(const DenseTensor3& t, int mode);

// Inverse of unfold for the given mode and target dims.
[[nodiscard]] DenseTensor3 fold(const Matrix& m, int mode, const std::array<Index, 3>& dims);

// result(..., j, ...) = sum_i m(j, i) * t(..., i, ...) along the given mode.
[[nodiscard]] DenseTensor3 mode_multiply(const DenseTensor3& t, const Matrix& m, int mode);

[[nodiscard]] double frobenius_norm(const DenseTensor3& t);

[[nodiscard]] double max_abs(const DenseTensor3& t);

}  // namespace chebtuck
