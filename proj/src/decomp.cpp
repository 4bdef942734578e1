#include "chebtuck/decomp.hpp"

#include "chebtuck/dense_tensor.hpp"
#include "chebtuck/kernels.hpp"

#include <cmath>
#include <limits>

namespace chebtuck {

namespace {

struct RankCut {
    Index rank = 0;
    double tail_abs = 0.0;
    double total = 0.0;
};

// Minimal rank whose discarded tail stays within budget_frac of the total
// energy: accumulate lambda_k backwards while the strict budget holds, never
// dropping below rank 1. Ties (tail == budget) keep cutting, preferring the
// smaller rank.
RankCut select_rank(const Vector& sigma, double budget_frac) {
    const Index r = sigma.size();
    double total = 0.0;
    for (Index k = 0; k < r; ++k) total += sigma(k) * sigma(k);
    const double budget = budget_frac * total;
    double tail = 0.0;
    Index rank = r;
    for (Index k = r - 1; k >= 1; --k) {
        const double lam = sigma(k) * sigma(k);
        if (tail + lam <= budget) {
            tail += lam;
            rank = k;
        } else {
            break;
        }
    }
    return {rank, tail, total};
}

std::array<Spectrum, 3> mode_spectra(const DenseTensor3& t) {
    std::array<Spectrum, 3> sp;
    for (int mode = 1; mode <= 3; ++mode)
        sp[static_cast<std::size_t>(mode - 1)] = left_spectrum(unfold(t, mode));
    return sp;
}

TuckerResult assemble_from_spectra(const DenseTensor3& t, const std::array<Spectrum, 3>& sp,
                                   double eps) {
    TuckerResult res;
    for (int l = 0; l < 3; ++l) {
        const RankCut cut = select_rank(sp[l].sigma, eps * eps / 3.0);
        res.tucker.factors[l] = sp[l].u.leftCols(cut.rank);
        res.report.ranks[l] = cut.rank;
        res.report.tail_rel[l] = cut.total > 0.0 ? cut.tail_abs / cut.total : 0.0;
        res.report.singular_values[l] = sp[l].sigma;
    }
    DenseTensor3 core = t;
    for (int mode = 1; mode <= 3; ++mode)
        core = mode_multiply(core, Matrix(res.tucker.factors[mode - 1].transpose()), mode);
    res.tucker.core = std::move(core);
    double sum = 0.0;
    for (double tr : res.report.tail_rel) sum += tr;
    res.report.rel_error_est = std::sqrt(sum);
    res.report.iterations = 0;
    return res;
}

// True relative residual, measured densely; immune to the cancellation that
// makes sqrt(||T||^2 - ||core||^2) bottom out near 1e-8 relative.
double dense_rel_residual(const DenseTensor3& t, const TuckerTensor& tk, double tnorm) {
    const DenseTensor3 rec = tucker_to_dense(tk);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        const double d = t.values[i] - rec.values[i];
        acc += static_cast<long double>(d) * static_cast<long double>(d);
    }
    return tnorm > 0.0 ? static_cast<double>(std::sqrt(acc)) / tnorm : 0.0;
}

}  // namespace

TruncatedSvd truncated_svd(const Matrix& m, double tol) {
    require(tol >= 0.0, "truncated_svd: tolerance must be nonnegative");
    require(m.rows() >= 1 && m.cols() >= 1, "truncated_svd: empty matrix");
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector sv = svd.singularValues();
    const RankCut cut = select_rank(sv, tol * tol);
    TruncatedSvd out;
    out.full_sigma = sv;
    out.u = svd.matrixU().leftCols(cut.rank);
    out.sigma = sv.head(cut.rank);
    out.v = svd.matrixV().leftCols(cut.rank);
    out.tail_energy = cut.tail_abs;
    return out;
}

TruncatedSvd truncated_svd_rank(const Matrix& m, Index rank) {
    require(rank >= 1, "truncated_svd_rank: rank must be positive");
    require(m.rows() >= 1 && m.cols() >= 1, "truncated_svd_rank: empty matrix");
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector sv = svd.singularValues();
    const Index r = std::min<Index>(rank, sv.size());
    double tail = 0.0;
    for (Index k = sv.size() - 1; k >= r; --k) tail += sv(k) * sv(k);
    TruncatedSvd out;
    out.full_sigma = sv;
    out.u = svd.matrixU().leftCols(r);
    out.sigma = sv.head(r);
    out.v = svd.matrixV().leftCols(r);
    out.tail_energy = tail;
    return out;
}

Spectrum left_spectrum(const Matrix& m) {
    require(m.rows() >= 1 && m.cols() >= 1, "left_spectrum: empty matrix");
    const Index rows = m.rows(), cols = m.cols();
    if (cols > 512 && cols > 2 * rows) {
        Matrix g;
        kernels::gram(m, g);
        Eigen::SelfAdjointEigenSolver<Matrix> es(g);
        require(es.info() == Eigen::Success, "left_spectrum: eigensolver failed");
        Spectrum sp;
        sp.sigma.resize(rows);
        sp.u.resize(rows, rows);
        for (Index i = 0; i < rows; ++i) {
            const Index src = rows - 1 - i;  // eigenvalues come ascending
            sp.sigma(i) = std::sqrt(std::max(es.eigenvalues()(src), 0.0));
            sp.u.col(i) = es.eigenvectors().col(src);
        }
        return sp;
    }
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    return {svd.matrixU(), svd.singularValues()};
}

TuckerResult hosvd(const DenseTensor3& t, double eps) {
    require(eps >= 0.0, "hosvd: eps must be nonnegative");
    return assemble_from_spectra(t, mode_spectra(t), eps);
}

TuckerResult tucker_als(const DenseTensor3& t, double eps) {
    require(eps >= 0.0, "tucker_als: eps must be nonnegative");
    const std::array<Spectrum, 3> init_sp = mode_spectra(t);
    TuckerResult res = assemble_from_spectra(t, init_sp, eps);
    const double tnorm = frobenius_norm(t);
    if (tnorm == 0.0) return res;

    std::array<Index, 3> ranks = res.report.ranks;
    std::array<Matrix, 3> factors = res.tucker.factors;
    std::array<Index, 3> cap{};
    for (int l = 0; l < 3; ++l) cap[l] = std::min<Index>(t.dims[l], init_sp[l].u.cols());
    std::array<Vector, 3> sweep_sigma = res.report.singular_values;
    std::array<double, 3> tail_rel = res.report.tail_rel;
    int iterations = 0;

    while (true) {
        double prev_err = std::numeric_limits<double>::infinity();
        double err = prev_err;
        TuckerTensor current;
        for (int sweep = 0; sweep < 50; ++sweep) {
            for (int mode = 1; mode <= 3; ++mode) {
                DenseTensor3 w = t;
                for (int other = 1; other <= 3; ++other) {
                    if (other == mode) continue;
                    w = mode_multiply(w, Matrix(factors[other - 1].transpose()), other);
                }
                const Spectrum sp = left_spectrum(unfold(w, mode));
                factors[mode - 1] = sp.u.leftCols(ranks[mode - 1]);
                sweep_sigma[mode - 1] = sp.sigma;
                double tot = 0.0, tail = 0.0;
                for (Index k = 0; k < sp.sigma.size(); ++k) {
                    const double lam = sp.sigma(k) * sp.sigma(k);
                    tot += lam;
                    if (k >= ranks[mode - 1]) tail += lam;
                }
                tail_rel[mode - 1] = tot > 0.0 ? tail / tot : 0.0;
            }
            current.factors = factors;
            DenseTensor3 core = t;
            for (int mode = 1; mode <= 3; ++mode)
                core = mode_multiply(core, Matrix(factors[mode - 1].transpose()), mode);
            current.core = std::move(core);
            ++iterations;
            err = dense_rel_residual(t, current, tnorm);
            if (prev_err - err < 0.01 * eps) break;
            prev_err = err;
        }
        res.tucker = std::move(current);
        res.report.ranks = ranks;
        res.report.singular_values = sweep_sigma;
        res.report.tail_rel = tail_rel;
        res.report.rel_error_est = err;
        res.report.iterations = iterations;
        if (err <= eps) return res;
        bool grew = false;
        for (int l = 0; l < 3; ++l)
            if (ranks[l] < cap[l]) {
                ++ranks[l];
                grew = true;
            }
        if (!grew) return res;  // already at full ranks
        for (int l = 0; l < 3; ++l) factors[l] = init_sp[l].u.leftCols(ranks[l]);
    }
}

TuckerResult rhosvd(const CpTensor& c, double eps) {
    require(eps >= 0.0, "rhosvd: eps must be nonnegative");
    require(c.rank() >= 1, "rhosvd: zero-rank input");
    TuckerResult res;
    for (int mode = 1; mode <= 3; ++mode) {
        const Spectrum sp = left_spectrum(side_matrix_scaled(c, mode));
        const RankCut cut = select_rank(sp.sigma, eps * eps / 3.0);
        res.tucker.factors[mode - 1] = sp.u.leftCols(cut.rank);
        res.report.ranks[mode - 1] = cut.rank;
        res.report.tail_rel[mode - 1] = cut.total > 0.0 ? cut.tail_abs / cut.total : 0.0;
        res.report.singular_values[mode - 1] = sp.sigma;
    }
    std::array<Matrix, 3> g;
    for (int l = 0; l < 3; ++l) g[l] = res.tucker.factors[l].transpose() * c.factors[l];
    DenseTensor3 core;
    kernels::core_accumulate(g[0], g[1], g[2], c.weights, core);
    res.tucker.core = std::move(core);
    double sum = 0.0;
    for (double tr : res.report.tail_rel) sum += std::sqrt(tr);
    res.report.rel_error_est = sum;
    res.report.iterations = 0;
    return res;
}

double rhosvd_error_bound(const TruncationReport& report, double xi_norm, Index m, int d) {
    require(xi_norm >= 0.0, "rhosvd_error_bound: weight norm must be nonnegative");
    require(m >= 1 && d >= 1, "rhosvd_error_bound: bad shape arguments");
    double sum = 0.0;
    for (double tr : report.tail_rel) sum += std::sqrt(std::max(tr, 0.0));
    return std::pow(static_cast<double>(m), 0.5 * static_cast<double>(d)) * xi_norm * sum;
}

}  // namespace chebtuck
