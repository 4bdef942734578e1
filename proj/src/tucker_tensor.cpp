#include "chebtuck/tucker_tensor.hpp"

#include "chebtuck/kernels.hpp"

namespace chebtuck {

DenseTensor3 tucker_to_dense(const TuckerTensor& t) {
    for (int l = 0; l < 3; ++l)
        require(t.factors[l].cols() == t.core.dims[l],
                "tucker_to_dense: factor widths must match the core");
    DenseTensor3 out = t.core;
    for (int mode = 1; mode <= 3; ++mode) out = mode_multiply(out, t.factors[mode - 1], mode);
    return out;
}

double frobenius_norm(const TuckerTensor& t) { return frobenius_norm(t.core); }

TuckerTensor hybrid_to_tucker(const HybridTucker& h) {
    TuckerTensor out;
    out.core = h.inner.core;
    for (int l = 0; l < 3; ++l) {
        require(h.outer_factors[l].cols() == h.inner.factors[l].rows(),
                "hybrid_to_tucker: outer and inner factor shapes do not chain");
        out.factors[l] = h.outer_factors[l] * h.inner.factors[l];
    }
    return out;
}

double orthonormality_defect(const Matrix& v) {
    require(v.rows() >= v.cols() && v.cols() >= 1, "orthonormality_defect: need a tall matrix");
    Matrix g = v.transpose() * v;
    g -= Matrix::Identity(v.cols(), v.cols());
    return g.cwiseAbs().maxCoeff();
}

}  // namespace chebtuck
