#include "chebtuck/newton.hpp"

#include "chebtuck/kernels.hpp"

#include <cmath>
#include <numbers>

namespace chebtuck {

SincQuadrature sinc_quadrature(Index m_half, double rho_min, double rho_max) {
    require(m_half >= 4, "sinc_quadrature: need at least M = 4");
    require(rho_min > 0.0 && rho_max > rho_min, "sinc_quadrature: need 0 < rho_min < rho_max");
    SincQuadrature q;
    q.m_half = m_half;
    q.step = std::numbers::pi / std::sqrt(static_cast<double>(m_half + 1));
    q.rho_min = rho_min;
    q.rho_max = rho_max;
    const double s = 1.0 / std::sqrt(rho_min * rho_max);
    const Index count = 2 * m_half + 1;
    q.t.resize(count);
    q.w.resize(count);
    const double wf = s * (2.0 * q.step / std::sqrt(std::numbers::pi));
    for (Index i = 0; i < count; ++i) {
        const double e = std::exp(static_cast<double>(i - m_half) * q.step);
        q.t(i) = s * e;
        q.w(i) = wf * e;
    }
    // Accuracy sweep: 1000 log-spaced radii across the validity interval.
    double worst = 0.0;
    const double ratio = rho_max / rho_min;
    for (int j = 0; j < 1000; ++j) {
        const double rho = rho_min * std::pow(ratio, static_cast<double>(j) / 999.0);
        double acc = 0.0;
        for (Index i = 0; i < count; ++i) acc += q.w(i) * std::exp(-(q.t(i) * q.t(i)) * rho * rho);
        worst = std::max(worst, std::abs(acc - 1.0 / rho) * rho);
    }
    q.max_rel_error = worst;
    return q;
}

namespace {

NewtonCp build_kernel(Vector grid, Matrix p, double h, double center, const SincQuadrature& quad,
                      CellIntegration integration) {
    const Index count = quad.t.size();
    Vector contrib(count);
    double lead = 0.0;
    for (Index k = 0; k < count; ++k) {
        const double sup = p.col(k).cwiseAbs().maxCoeff();
        contrib(k) = quad.w(k) * sup * sup * sup;
        lead = std::max(lead, contrib(k));
    }
    std::vector<Index> kept;
    for (Index k = 0; k < count; ++k)
        if (contrib(k) >= 1e-16 * lead) kept.push_back(k);
    require(!kept.empty(), "newton kernel: every quadrature term pruned");

    const Index rk = static_cast<Index>(kept.size());
    Matrix praw(grid.size(), rk);
    Vector wk(rk), tk(rk);
    for (Index j = 0; j < rk; ++j) {
        praw.col(j) = p.col(kept[static_cast<std::size_t>(j)]);
        wk(j) = quad.w(kept[static_cast<std::size_t>(j)]);
        tk(j) = quad.t(kept[static_cast<std::size_t>(j)]);
    }

    NewtonCp out;
    out.n = grid.size();
    out.h = h;
    out.center = center;
    out.grid = std::move(grid);
    out.cp = make_cp(wk, {praw, praw, praw});
    require(out.cp.rank() == rk, "newton kernel: unexpected zero column");
    out.t_kept = std::move(tk);
    out.quad_m_half = quad.m_half;
    out.integration = integration;
    return out;
}

}  // namespace

NewtonCp newton_cp(Index n, const SincQuadrature& quad, CellIntegration integration) {
    require(n >= 4 && n % 2 == 0, "newton_cp: n must be even and at least 4");
    const double h = 2.0 / static_cast<double>(n - 1);
    Vector grid(n);
    for (Index i = 0; i < n; ++i) grid(i) = -1.0 + h * static_cast<double>(i);
    // The grid positions are only symmetric up to rounding, which narrow
    // Gaussians would amplify; evaluating one half and mirroring keeps every
    // canonical vector exactly symmetric about the center.
    const Index half = n / 2;
    Matrix phalf;
    kernels::newton_columns(grid.head(half), h, quad.t,
                            integration == CellIntegration::ExactErf, phalf);
    Matrix p(n, phalf.cols());
    p.topRows(half) = phalf;
    p.bottomRows(half) = phalf.colwise().reverse();
    return build_kernel(std::move(grid), std::move(p), h, static_cast<double>(n + 1) / 2.0, quad,
                        integration);
}

NewtonCp newton_reference_cp(Index n, const SincQuadrature& quad, CellIntegration integration) {
    require(n >= 4 && n % 2 == 0, "newton_reference_cp: n must be even and at least 4");
    const double h = 2.0 / static_cast<double>(n - 1);
    Vector grid(2 * n);
    // Integer multiples of h, so the grid is exactly antisymmetric about the
    // origin node at 1-based index n.
    for (Index i = 0; i < 2 * n; ++i) grid(i) = h * static_cast<double>(i + 1 - n);
    Matrix p;
    kernels::newton_columns(grid, h, quad.t, integration == CellIntegration::ExactErf, p);
    return build_kernel(std::move(grid), std::move(p), h, static_cast<double>(n), quad,
                        integration);
}

SincQuadrature default_quadrature(Index n, Index m_half) {
    require(n >= 4, "default_quadrature: n too small");
    return sinc_quadrature(m_half, 2.0 / static_cast<double>(n - 1), std::sqrt(12.0));
}

Index default_sigma(Index n) {
    require(n >= 2, "default_sigma: n too small");
    return std::max<Index>(8, static_cast<Index>(std::llround(4.0 * std::sqrt(static_cast<double>(n)))));
}

RsSplit range_separate(const NewtonCp& kernel, Index sigma_cells, double tau_cut) {
    const Index n = kernel.grid.size();
    require(kernel.cp.rank() >= 1, "range_separate: empty kernel");
    require(sigma_cells >= 1 && sigma_cells < n / 2,
            "range_separate: sigma must lie inside the half-grid");
    require(tau_cut >= 0.0, "range_separate: tau_cut must be nonnegative");

    RsSplit out;
    out.gamma = static_cast<double>(sigma_cells);
    out.tau_cut = tau_cut;
    const double c = kernel.center;
    const Matrix& u = kernel.cp.factors[0];
    for (Index k = 0; k < kernel.cp.rank(); ++k) {
        double sup_all = 0.0, sup_out = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double a = std::abs(u(i, k));
            sup_all = std::max(sup_all, a);
            if (std::abs(static_cast<double>(i + 1) - c) >= static_cast<double>(sigma_cells))
                sup_out = std::max(sup_out, a);
        }
        if (sup_out <= tau_cut * sup_all)
            out.short_terms.push_back(k);
        else
            out.long_terms.push_back(k);
    }
    out.short_part = cp_select_terms(kernel.cp, out.short_terms);
    out.long_part = cp_select_terms(kernel.cp, out.long_terms);
    return out;
}

}  // namespace chebtuck
