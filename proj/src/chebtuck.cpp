#include "chebtuck/chebtuck.hpp"

#include "chebtuck/chebyshev.hpp"
#include "chebtuck/spline.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace chebtuck {

namespace {

ChebTuckFunction compress_dense_cct(DenseTensor3 cct, const std::array<Index, 3>& m, double eps,
                                    BuildSource src) {
    ChebTuckFunction g;
    g.m = m;
    Provenance prov;
    prov.source = src;
    prov.eps = eps;
    if (eps == 0.0) {
        g.cct.core = std::move(cct);
        for (int l = 0; l < 3; ++l) g.cct.factors[l] = Matrix::Identity(m[l], m[l]);
        prov.report.ranks = m;
        g.provenance = prov;
        return g;
    }
    TuckerResult r = tucker_als(cct, eps);
    g.cct = std::move(r.tucker);
    prov.report = std::move(r.report);
    g.provenance = prov;
    return g;
}

void check_degrees(const std::array<Index, 3>& m, const char* who) {
    for (Index ml : m) require(ml >= 2, who);
}

Vector uniform_points(Index n) {
    Vector pts(n);
    const double h = 2.0 / static_cast<double>(n - 1);
    for (Index i = 0; i < n; ++i) pts(i) = -1.0 + h * static_cast<double>(i);
    return pts;
}

}  // namespace

ChebTuckFunction build_from_function(const ScalarField& f, const std::array<Index, 3>& m,
                                     double eps) {
    check_degrees(m, "build_from_function: need at least two nodes per mode");
    require(eps >= 0.0, "build_from_function: eps must be nonnegative");
    require(static_cast<bool>(f), "build_from_function: empty function");
    const Vector s1 = cheb_nodes(m[0]), s2 = cheb_nodes(m[1]), s3 = cheb_nodes(m[2]);
    DenseTensor3 vals(m[0], m[1], m[2]);
    for (Index k = 0; k < m[2]; ++k)
        for (Index j = 0; j < m[1]; ++j)
            for (Index i = 0; i < m[0]; ++i) {
                const double v = f(s1(i), s2(j), s3(k));
                require(std::isfinite(v), "build_from_function: non-finite sample");
                vals.at(i, j, k) = v;
            }
    return compress_dense_cct(cct_from_values(vals), m, eps, BuildSource::Function);
}

ChebTuckFunction build_from_grid(const DenseTensor3& f, const std::array<Index, 3>& m,
                                 double eps) {
    check_degrees(m, "build_from_grid: need at least two nodes per mode");
    require(eps >= 0.0, "build_from_grid: eps must be nonnegative");
    for (double v : f.values) require(std::isfinite(v), "build_from_grid: non-finite data");
    const DenseTensor3 samples = trivariate_spline_at_cheb(f, m);
    return compress_dense_cct(cct_from_values(samples), m, eps, BuildSource::Grid);
}

ChebTuckFunction build_from_cp(const CpTensor& c, const std::array<Index, 3>& m, double eps,
                               InterpKind interp) {
    check_degrees(m, "build_from_cp: need at least two nodes per mode");
    require(eps >= 0.0, "build_from_cp: eps must be nonnegative");
    require(c.rank() >= 1, "build_from_cp: zero-rank input");
    for (int l = 0; l < 3; ++l)
        require(c.factors[l].rows() >= 4, "build_from_cp: need at least four grid points per mode");

    const Index r = c.rank();
    std::array<Matrix, 3> coeffs;
    double delta = 0.0;

    for (int l = 0; l < 3; ++l) {
        const Index n = c.factors[l].rows();
        const Vector nodes = cheb_nodes(m[l]);
        Matrix lifted_nodes;
        kernels::lift_columns(c.factors[l], interp, nodes, lifted_nodes);
        kernels::dct_columns(lifted_nodes, coeffs[l]);

        // Interpolation defect per unit-norm canonical vector on a 10x
        // oversampled uniform grid, chunked so no probes x R block persists.
        const Index np = 10 * (n - 1) + 1;
        Vector probes(np);
        for (Index p = 0; p < np; ++p)
            probes(p) = -1.0 + 2.0 * (static_cast<double>(p) / static_cast<double>(np - 1));
        const Matrix basis = cheb_vandermonde(probes, m[l]);
        const Index chunk = 1024;
        for (Index c0 = 0; c0 < r; c0 += chunk) {
            const Index w = std::min<Index>(chunk, r - c0);
            const Matrix cols = c.factors[l].middleCols(c0, w);
            Matrix lifted;
            kernels::lift_columns(cols, interp, probes, lifted);
            const Matrix chebv = basis * coeffs[l].middleCols(c0, w);
            delta = std::max(delta, (chebv - lifted).cwiseAbs().maxCoeff());
        }
    }

    const CpTensor cct_cp = make_cp(c.weights, coeffs);
    require(cct_cp.rank() >= 1, "build_from_cp: coefficient tensor collapsed to zero");

    ChebTuckFunction g;
    g.m = m;
    Provenance prov;
    prov.source = BuildSource::Cp;
    prov.eps = eps;
    prov.delta = delta;
    prov.xi_l1 = c.weights.cwiseAbs().sum();
    prov.xi_cct_l2 = cct_cp.weights.norm();
    TuckerResult res = rhosvd(cct_cp, eps);
    g.cct = std::move(res.tucker);
    prov.report = std::move(res.report);
    g.provenance = prov;
    return g;
}

double evaluate(const ChebTuckFunction& g, double x1, double x2, double x3, bool* extrapolated) {
    require(g.m[0] >= 2 && g.m[1] >= 2 && g.m[2] >= 2, "evaluate: empty function");
    if (extrapolated != nullptr)
        *extrapolated = std::abs(x1) > 1.0 || std::abs(x2) > 1.0 || std::abs(x3) > 1.0;
    const Vector f1 = g.cct.factors[0].transpose() * cheb_basis_row(g.m[0], x1);
    const Vector f2 = g.cct.factors[1].transpose() * cheb_basis_row(g.m[1], x2);
    const Vector f3 = g.cct.factors[2].transpose() * cheb_basis_row(g.m[2], x3);
    const auto& core = g.cct.core;
    const Index r1 = core.dims[0], r2 = core.dims[1], r3 = core.dims[2];
    double total = 0.0;
    for (Index c = 0; c < r3; ++c) {
        double s2 = 0.0;
        for (Index b = 0; b < r2; ++b) {
            double s1 = 0.0;
            const double* col = core.values.data() + (c * r2 + b) * r1;
            for (Index a = 0; a < r1; ++a) s1 += col[a] * f1(a);
            s2 += f2(b) * s1;
        }
        total += f3(c) * s2;
    }
    return total;
}

TuckerTensor evaluate_grid_points(const ChebTuckFunction& g, const std::array<Vector, 3>& pts,
                                  bool reorthonormalize) {
    TuckerTensor out;
    out.core = g.cct.core;
    for (int l = 0; l < 3; ++l) {
        require(pts[l].size() >= 1, "evaluate_grid_points: empty point set");
        out.factors[l] = cheb_vandermonde(pts[l], g.m[l]) * g.cct.factors[l];
    }
    if (!reorthonormalize) return out;
    for (int l = 0; l < 3; ++l) {
        const Matrix w = out.factors[l];
        require(w.rows() >= w.cols(),
                "evaluate_grid_points: too few points to reorthonormalize");
        Eigen::HouseholderQR<Matrix> qr(w);
        const Index rk = w.cols();
        out.factors[l] = qr.householderQ() * Matrix::Identity(w.rows(), rk);
        const Matrix rr = Matrix(qr.matrixQR().topRows(rk).triangularView<Eigen::Upper>());
        out.core = mode_multiply(out.core, rr, l + 1);
    }
    return out;
}

TuckerTensor evaluate_grid(const ChebTuckFunction& g, const std::array<Index, 3>& n,
                           bool reorthonormalize) {
    std::array<Vector, 3> pts;
    for (int l = 0; l < 3; ++l) {
        require(n[l] >= 2, "evaluate_grid: need at least two points per mode");
        pts[l] = uniform_points(n[l]);
    }
    return evaluate_grid_points(g, pts, reorthonormalize);
}

double chebtuck_error_bound(double delta, double xi_l1, double xi_cct_l2,
                            const TruncationReport& report, const std::array<Index, 3>& m,
                            int d) {
    require(delta >= 0.0 && xi_l1 >= 0.0 && xi_cct_l2 >= 0.0,
            "chebtuck_error_bound: arguments must be nonnegative");
    require(d >= 1, "chebtuck_error_bound: bad dimension");
    const double dd = static_cast<double>(d);
    double interp;
    if (delta * dd < 1.0)
        interp = xi_l1 * std::numbers::e * delta * dd;
    else
        interp = xi_l1 * (std::pow(1.0 + delta, dd) - 1.0);
    double sum = 0.0;
    for (double tr : report.tail_rel) sum += std::sqrt(std::max(tr, 0.0));
    const Index mmax = std::max({m[0], m[1], m[2]});
    return interp + std::pow(static_cast<double>(mmax), 0.5 * dd) * xi_cct_l2 * sum;
}

RankSelection adaptive_rank_select(const CpTensor& cct_cp, double eps_total, double delta,
                                   double xi_l1) {
    require(eps_total > 0.0, "adaptive_rank_select: target must be positive");
    require(cct_cp.rank() >= 1, "adaptive_rank_select: zero-rank input");
    require(delta >= 0.0 && xi_l1 >= 0.0, "adaptive_rank_select: arguments must be nonnegative");

    std::array<Vector, 3> sigma;
    std::array<Index, 3> mdim{};
    for (int l = 0; l < 3; ++l) {
        sigma[l] = left_spectrum(side_matrix_scaled(cct_cp, l + 1)).sigma;
        mdim[l] = cct_cp.factors[l].rows();
    }
    const double xi_cct = cct_cp.weights.norm();

    const auto bound_at = [&](const std::array<Index, 3>& rk) {
        TruncationReport rep;
        rep.ranks = rk;
        for (int l = 0; l < 3; ++l) {
            double tot = 0.0, tail = 0.0;
            for (Index k = 0; k < sigma[l].size(); ++k) {
                const double lam = sigma[l](k) * sigma[l](k);
                tot += lam;
                if (k >= rk[l]) tail += lam;
            }
            rep.tail_rel[l] = tot > 0.0 ? tail / tot : 0.0;
        }
        return chebtuck_error_bound(delta, xi_l1, xi_cct, rep, mdim, 3);
    };

    RankSelection sel;
    std::array<Index, 3> ranks{sigma[0].size(), sigma[1].size(), sigma[2].size()};
    sel.bound = bound_at(ranks);
    sel.ranks = ranks;
    if (sel.bound > eps_total) {
        sel.feasible = false;  // the delta floor alone exceeds the target
        return sel;
    }
    while (true) {
        int best = -1;
        double best_sigma = std::numeric_limits<double>::infinity();
        for (int l = 0; l < 3; ++l) {
            if (ranks[l] <= 1) continue;
            const double next = sigma[l](ranks[l] - 1);
            if (next < best_sigma) {
                best_sigma = next;
                best = l;
            }
        }
        if (best < 0) break;
        std::array<Index, 3> trial = ranks;
        --trial[best];
        if (bound_at(trial) > eps_total) break;
        ranks = trial;
    }
    sel.feasible = true;
    sel.ranks = ranks;
    sel.bound = bound_at(ranks);
    return sel;
}

}  // namespace chebtuck
