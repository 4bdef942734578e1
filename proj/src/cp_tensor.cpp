#include "chebtuck/cp_tensor.hpp"

#include "chebtuck/kernels.hpp"

#include <cmath>
#include <vector>

namespace chebtuck {

CpTensor make_cp(const Vector& weights, const std::array<Matrix, 3>& raw_factors) {
    const Index r = weights.size();
    for (int l = 0; l < 3; ++l) {
        require(raw_factors[l].cols() == r, "make_cp: factor widths must match the weight count");
        require(raw_factors[l].rows() >= 1, "make_cp: factors need at least one row");
    }
    for (Index k = 0; k < r; ++k)
        require(std::isfinite(weights(k)), "make_cp: non-finite weight");

    std::vector<Index> kept;
    Vector scaled(r);
    for (Index k = 0; k < r; ++k) {
        double w = weights(k);
        for (int l = 0; l < 3; ++l) w *= raw_factors[l].col(k).norm();
        require(std::isfinite(w), "make_cp: non-finite column");
        scaled(k) = w;
        if (w != 0.0) kept.push_back(k);
    }

    CpTensor c;
    const Index rk = static_cast<Index>(kept.size());
    c.weights.resize(rk);
    for (int l = 0; l < 3; ++l) c.factors[l].resize(raw_factors[l].rows(), rk);
    for (Index j = 0; j < rk; ++j) {
        const Index k = kept[static_cast<std::size_t>(j)];
        c.weights(j) = scaled(k);
        for (int l = 0; l < 3; ++l)
            c.factors[l].col(j) = raw_factors[l].col(k) / raw_factors[l].col(k).norm();
    }
    return c;
}

CpTensor cp_select_terms(const CpTensor& c, const std::vector<Index>& terms) {
    CpTensor out;
    const Index rk = static_cast<Index>(terms.size());
    out.weights.resize(rk);
    for (int l = 0; l < 3; ++l) out.factors[l].resize(c.factors[l].rows(), rk);
    for (Index j = 0; j < rk; ++j) {
        const Index k = terms[static_cast<std::size_t>(j)];
        require(k >= 0 && k < c.rank(), "cp_select_terms: term index out of range");
        out.weights(j) = c.weights(k);
        for (int l = 0; l < 3; ++l) out.factors[l].col(j) = c.factors[l].col(k);
    }
    return out;
}

DenseTensor3 cp_to_dense(const CpTensor& c) {
    DenseTensor3 out;
    kernels::cp_densify(c.weights, c.factors[0], c.factors[1], c.factors[2], out);
    return out;
}

double frobenius_norm(const CpTensor& c) {
    const Index r = c.rank();
    long double acc = 0.0L;
    for (Index k = 0; k < r; ++k)
        for (Index l = 0; l < r; ++l) {
            double dots = 1.0;
            for (int m = 0; m < 3; ++m) dots *= c.factors[m].col(k).dot(c.factors[m].col(l));
            acc += static_cast<long double>(c.weights(k)) * static_cast<long double>(c.weights(l)) *
                   static_cast<long double>(dots);
        }
    if (acc < 0.0L) acc = 0.0L;
    return static_cast<double>(std::sqrt(acc));
}

Matrix side_matrix_scaled(const CpTensor& c, int mode) {
    require(mode >= 1 && mode <= 3, "side_matrix_scaled: mode must be 1, 2 or 3");
    Matrix s = c.factors[static_cast<std::size_t>(mode - 1)];
    for (Index k = 0; k < c.rank(); ++k) s.col(k) *= c.weights(k);
    return s;
}

}  // namespace chebtuck
