#include "chebtuck/dense_tensor.hpp"

#include "chebtuck/kernels.hpp"

#include <cmath>

namespace chebtuck {

Matrix unfold(const DenseTensor3& t, int mode) {
    require(mode >= 1 && mode <= 3, "unfold: mode must be 1, 2 or 3");
    require(t.size() > 0, "unfold: empty tensor");
    const Index n1 = t.dims[0], n2 = t.dims[1], n3 = t.dims[2];
    if (mode == 1)
        return Eigen::Map<const Matrix>(t.values.data(), n1, n2 * n3);
    Matrix out;
    if (mode == 2) {
        out.resize(n2, n1 * n3);
        for (Index i3 = 0; i3 < n3; ++i3)
            for (Index i2 = 0; i2 < n2; ++i2)
                for (Index i1 = 0; i1 < n1; ++i1)
                    out(i2, i1 + n1 * i3) = t.at(i1, i2, i3);
    } else {
        out.resize(n3, n1 * n2);
        for (Index i3 = 0; i3 < n3; ++i3)
            for (Index i2 = 0; i2 < n2; ++i2)
                for (Index i1 = 0; i1 < n1; ++i1)
                    out(i3, i1 + n1 * i2) = t.at(i1, i2, i3);
    }
    return out;
}

DenseTensor3 fold(const Matrix& m, int mode, const std::array<Index, 3>& dims) {
    require(mode >= 1 && mode <= 3, "fold: mode must be 1, 2 or 3");
    const Index n1 = dims[0], n2 = dims[1], n3 = dims[2];
    DenseTensor3 t(n1, n2, n3);
    require(m.rows() == dims[mode - 1] && m.size() == t.size(),
            "fold: matrix shape does not match the target dims");
    if (mode == 1) {
        Eigen::Map<Matrix>(t.values.data(), n1, n2 * n3) = m;
    } else if (mode == 2) {
        for (Index i3 = 0; i3 < n3; ++i3)
            for (Index i2 = 0; i2 < n2; ++i2)
                for (Index i1 = 0; i1 < n1; ++i1)
                    t.at(i1, i2, i3) = m(i2, i1 + n1 * i3);
    } else {
        for (Index i3 = 0; i3 < n3; ++i3)
            for (Index i2 = 0; i2 < n2; ++i2)
                for (Index i1 = 0; i1 < n1; ++i1)
                    t.at(i1, i2, i3) = m(i3, i1 + n1 * i2);
    }
    return t;
}

DenseTensor3 mode_multiply(const DenseTensor3& t, const Matrix& m, int mode) {
    DenseTensor3 out;
    kernels::mode_multiply(t, m, mode, out);
    return out;
}

double frobenius_norm(const DenseTensor3& t) {
    long double acc = 0.0L;
    for (double v : t.values) acc += static_cast<long double>(v) * static_cast<long double>(v);
    return static_cast<double>(std::sqrt(acc));
}

double max_abs(const DenseTensor3& t) {
    double m = 0.0;
    for (double v : t.values) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace chebtuck

