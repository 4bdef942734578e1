#include "chebtuck/multiparticle.hpp"

#include "chebtuck/chebyshev.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebtuck {

namespace {

// 53 uniform bits -> [0,1); distribution classes are implementation-defined,
// raw bits are not.
double unit_double(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

Vector uniform_grid(Index n) {
    Vector pts(n);
    const double h = 2.0 / static_cast<double>(n - 1);
    for (Index i = 0; i < n; ++i) pts(i) = -1.0 + h * static_cast<double>(i);
    return pts;
}

double slice_rel_linf(const Matrix& app, const Matrix& ref) {
    require(app.rows() == ref.rows() && app.cols() == ref.cols(),
            "middle_slice_error: shape mismatch");
    const double refmax = ref.cwiseAbs().maxCoeff();
    require(refmax > 0.0, "middle_slice_error: zero reference slice");
    return (app - ref).cwiseAbs().maxCoeff() / refmax;
}

// Core contracted with the mode-3 coefficient row, an r1 x r2 matrix.
Matrix core_row3(const DenseTensor3& core, const Vector& f3) {
    const Index r1 = core.dims[0], r2 = core.dims[1], r3 = core.dims[2];
    require(f3.size() == r3, "core_row3: row length mismatch");
    Matrix m = Matrix::Zero(r1, r2);
    for (Index c = 0; c < r3; ++c) {
        const Eigen::Map<const Matrix> slab(core.values.data() + c * r1 * r2, r1, r2);
        m.noalias() += f3(c) * slab;
    }
    return m;
}

// Plane of a grid-level Tucker tensor (factors n_l x r_l) at 1-based i3.
Matrix tucker_grid_slice(const TuckerTensor& t, Index i3) {
    require(i3 >= 1 && i3 <= t.factors[2].rows(), "tucker_grid_slice: plane index out of range");
    const Vector f3 = t.factors[2].row(i3 - 1).transpose();
    return t.factors[0] * core_row3(t.core, f3) * t.factors[1].transpose();
}

// ChebTuck plane on possibly unequal uniform grids.
Matrix chebtuck_grid_slice(const ChebTuckFunction& g, Index n1, Index n2, double x3) {
    const Matrix w1 = cheb_vandermonde(uniform_grid(n1), g.m[0]) * g.cct.factors[0];
    const Matrix w2 = cheb_vandermonde(uniform_grid(n2), g.m[1]) * g.cct.factors[1];
    const Vector f3 = g.cct.factors[2].transpose() * cheb_basis_row(g.m[2], x3);
    return w1 * core_row3(g.cct.core, f3) * w2.transpose();
}

}  // namespace

ParticleSystem load_particles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_particles: cannot open " + path);
    std::vector<std::array<double, 4>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ss >> tok) toks.push_back(tok);
        if (toks.empty()) continue;
        if (toks.size() != 4)
            throw std::runtime_error("load_particles: line " + std::to_string(lineno) +
                                     ": expected 'x y z charge'");
        std::array<double, 4> row{};
        for (int i = 0; i < 4; ++i) {
            char* end = nullptr;
            row[static_cast<std::size_t>(i)] = std::strtod(toks[static_cast<std::size_t>(i)].c_str(), &end);
            if (end == nullptr || *end != '\0' || !std::isfinite(row[static_cast<std::size_t>(i)]))
                throw std::runtime_error("load_particles: line " + std::to_string(lineno) +
                                         ": bad number '" + toks[static_cast<std::size_t>(i)] + "'");
        }
        for (int i = 0; i < 3; ++i)
            if (!(row[static_cast<std::size_t>(i)] > -1.0 && row[static_cast<std::size_t>(i)] < 1.0))
                throw std::runtime_error("load_particles: line " + std::to_string(lineno) +
                                         ": coordinate outside (-1,1)");
        rows.push_back(row);
    }
    if (rows.empty()) throw std::runtime_error("load_particles: no particles in " + path);
    ParticleSystem sys;
    const Index n = static_cast<Index>(rows.size());
    sys.positions.resize(n, 3);
    sys.charges.resize(n);
    for (Index i = 0; i < n; ++i) {
        for (int l = 0; l < 3; ++l)
            sys.positions(i, l) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
        sys.charges(i) = rows[static_cast<std::size_t>(i)][3];
    }
    return sys;
}

void save_particles(const ParticleSystem& sys, const std::string& path) {
    require(sys.positions.rows() == sys.count() && sys.positions.cols() == 3,
            "save_particles: inconsistent system");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_particles: cannot open " + path);
    char buf[160];
    for (Index i = 0; i < sys.count(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g\n", sys.positions(i, 0),
                      sys.positions(i, 1), sys.positions(i, 2), sys.charges(i));
        out << buf;
    }
    if (!out) throw std::runtime_error("save_particles: write failed for " + path);
}

ParticleSystem generate_cluster(Index n, std::uint64_t seed, double min_separation, double lo,
                                double hi) {
    require(n >= 1, "generate_cluster: need at least one particle");
    require(min_separation >= 0.0, "generate_cluster: negative separation");
    require(lo < hi, "generate_cluster: empty box");
    require(lo > -1.0 && hi < 1.0, "generate_cluster: box must lie strictly inside (-1,1)");
    std::mt19937_64 gen(seed);
    ParticleSystem sys;
    sys.positions.resize(n, 3);
    sys.charges.resize(n);
    const double span = hi - lo;
    for (Index i = 0; i < n; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
            double p[3];
            for (double& c : p) c = lo + span * unit_double(gen);
            placed = true;
            for (Index j = 0; j < i && placed; ++j) {
                const double dx = p[0] - sys.positions(j, 0);
                const double dy = p[1] - sys.positions(j, 1);
                const double dz = p[2] - sys.positions(j, 2);
                if (std::sqrt(dx * dx + dy * dy + dz * dz) < min_separation) placed = false;
            }
            if (placed)
                for (int l = 0; l < 3; ++l) sys.positions(i, l) = p[l];
        }
        if (!placed)
            throw std::runtime_error("generate_cluster: packing failed, separation too large");
        sys.charges(i) = (i % 2 == 0) ? 1.0 : -1.0;
    }
    return sys;
}

ParticleSystem generate_lattice(const std::array<Index, 3>& dims, double spacing,
                                const std::vector<Index>& vacancies) {
    for (Index d : dims) require(d >= 1, "generate_lattice: dims must be positive");
    require(spacing > 0.0, "generate_lattice: spacing must be positive");
    for (int l = 0; l < 3; ++l) {
        const double extent = static_cast<double>(dims[static_cast<std::size_t>(l)] - 1) * spacing;
        require(extent / 2.0 + spacing <= 1.0,
                "generate_lattice: lattice does not fit the box with a one-spacing margin");
    }
    const Index total = dims[0] * dims[1] * dims[2];
    std::vector<bool> removed(static_cast<std::size_t>(total), false);
    for (Index s : vacancies) {
        require(s >= 0 && s < total, "generate_lattice: vacancy index out of range");
        removed[static_cast<std::size_t>(s)] = true;
    }
    Index kept = 0;
    for (bool r : removed) kept += r ? 0 : 1;
    require(kept >= 1, "generate_lattice: all sites removed");

    ParticleSystem sys;
    sys.positions.resize(kept, 3);
    sys.charges.resize(kept);
    Index row = 0;
    for (Index i3 = 0; i3 < dims[2]; ++i3)
        for (Index i2 = 0; i2 < dims[1]; ++i2)
            for (Index i1 = 0; i1 < dims[0]; ++i1) {
                const Index site = i1 + dims[0] * (i2 + dims[1] * i3);
                if (removed[static_cast<std::size_t>(site)]) continue;
                const Index idx[3] = {i1, i2, i3};
                for (int l = 0; l < 3; ++l)
                    sys.positions(row, l) =
                        (static_cast<double>(idx[l]) -
                         static_cast<double>(dims[static_cast<std::size_t>(l)] - 1) / 2.0) *
                        spacing;
                sys.charges(row) = 1.0;
                ++row;
            }
    return sys;
}

ParticleSystem generate_lattice(const std::array<Index, 3>& dims, double spacing,
                                Index vacancy_count, std::uint64_t seed) {
    const Index total = dims[0] * dims[1] * dims[2];
    require(vacancy_count >= 0 && vacancy_count < total,
            "generate_lattice: vacancy count out of range");
    std::mt19937_64 gen(seed);
    std::vector<Index> sites(static_cast<std::size_t>(total));
    for (Index i = 0; i < total; ++i) sites[static_cast<std::size_t>(i)] = i;
    for (Index i = 0; i < vacancy_count; ++i) {
        const Index j = i + static_cast<Index>(gen() % static_cast<std::uint64_t>(total - i));
        std::swap(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]);
    }
    const std::vector<Index> vac(sites.begin(), sites.begin() + vacancy_count);
    return generate_lattice(dims, spacing, vac);
}

Index snap_index(double x, Index n) {
    require(n >= 2, "snap_index: need at least two grid points");
    const double h = 2.0 / static_cast<double>(n - 1);
    return static_cast<Index>(std::llround((x + 1.0) / h)) + 1;
}

CpTensor assemble_long_range(const ParticleSystem& sys, const RsSplit& reference, Index n) {
    require(sys.count() >= 1, "assemble_long_range: empty particle system");
    require(n >= 4 && n % 2 == 0, "assemble_long_range: n must be even and at least 4");
    const CpTensor& lp = reference.long_part;
    require(lp.rank() >= 1, "assemble_long_range: reference has no long-range terms");
    for (int l = 0; l < 3; ++l)
        require(lp.factors[l].rows() == 2 * n,
                "assemble_long_range: reference must live on the 2n grid");

    const Index rl = lp.rank();
    const Index count = sys.count();
    CpTensor out;
    out.weights.resize(count * rl);
    for (int l = 0; l < 3; ++l) out.factors[l].resize(n, count * rl);

    for (Index v = 0; v < count; ++v) {
        std::array<Index, 3> j{};
        for (int l = 0; l < 3; ++l) {
            const double x = sys.positions(v, l);
            require(x > -1.0 && x < 1.0, "assemble_long_range: particle outside the box");
            j[static_cast<std::size_t>(l)] = snap_index(x, n);
        }
        const double z = sys.charges(v);
        for (Index k = 0; k < rl; ++k) {
            const Index col = v * rl + k;
            double w = z * lp.weights(k);
            for (int l = 0; l < 3; ++l) {
                auto dst = out.factors[l].col(col);
                dst = lp.factors[l].col(k).segment(n - j[static_cast<std::size_t>(l)], n);
                const double nrm = dst.norm();
                require(nrm > 0.0, "assemble_long_range: zero window");
                dst /= nrm;
                w *= nrm;
            }
            out.weights(col) = w;
        }
    }
    return out;
}

TuckerResult compress_long_range(const CpTensor& a, double eps) { return rhosvd(a, eps); }

RsPotential build_rs_potential(const ParticleSystem& sys, const RsSplit& reference, Index n,
                               double eps) {
    RsPotential p;
    p.n = n;
    p.long_cp = assemble_long_range(sys, reference, n);
    TuckerResult c2t = compress_long_range(p.long_cp, eps);
    p.long_tucker = std::move(c2t.tucker);
    p.long_report = std::move(c2t.report);
    p.short_part = short_range_cumulated(sys, reference, n);
    return p;
}

ShortRangeField short_range_cumulated(const ParticleSystem& sys, const RsSplit& reference,
                                      Index n) {
    require(sys.count() >= 1, "short_range_cumulated: empty particle system");
    require(n >= 4 && n % 2 == 0, "short_range_cumulated: n must be even and at least 4");
    const CpTensor& sp = reference.short_part;
    require(sp.factors[0].rows() == 2 * n,
            "short_range_cumulated: reference must live on the 2n grid");
    const Index gamma = static_cast<Index>(reference.gamma);
    require(gamma >= 1 && gamma < n, "short_range_cumulated: window radius out of range");

    ShortRangeField f;
    f.n = n;
    f.gamma = gamma;
    f.window = sp.factors[0].middleRows(n - 1 - gamma, 2 * gamma + 1);
    f.xi = sp.weights;
    f.charges = sys.charges;
    f.centers.resize(static_cast<std::size_t>(sys.count()));
    for (Index v = 0; v < sys.count(); ++v)
        for (int l = 0; l < 3; ++l) {
            const double x = sys.positions(v, l);
            require(x > -1.0 && x < 1.0, "short_range_cumulated: particle outside the box");
            f.centers[static_cast<std::size_t>(v)][static_cast<std::size_t>(l)] = snap_index(x, n);
        }
    for (std::size_t a = 0; a < f.centers.size() && !f.overlaps; ++a)
        for (std::size_t b = a + 1; b < f.centers.size(); ++b) {
            bool close = true;
            for (int l = 0; l < 3; ++l)
                if (std::abs(f.centers[a][static_cast<std::size_t>(l)] -
                             f.centers[b][static_cast<std::size_t>(l)]) > 2 * gamma) {
                    close = false;
                    break;
                }
            if (close) {
                f.overlaps = true;
                break;
            }
        }
    return f;
}

double short_query(const ShortRangeField& f, Index i1, Index i2, Index i3) {
    require(i1 >= 1 && i1 <= f.n && i2 >= 1 && i2 <= f.n && i3 >= 1 && i3 <= f.n,
            "short_query: index out of range");
    const Index g = f.gamma;
    const std::array<Index, 3> q{i1, i2, i3};
    double acc = 0.0;
    for (std::size_t v = 0; v < f.centers.size(); ++v) {
        const auto& c = f.centers[v];
        bool in = true;
        std::array<Index, 3> off{};
        for (std::size_t l = 0; l < 3; ++l) {
            const Index d = q[l] - c[l];
            if (d < -g || d > g) {
                in = false;
                break;
            }
            off[l] = g + d;
        }
        if (!in) continue;
        double s = 0.0;
        for (Index k = 0; k < f.xi.size(); ++k)
            s += f.xi(k) * f.window(off[0], k) * f.window(off[1], k) * f.window(off[2], k);
        acc += f.charges(static_cast<Index>(v)) * s;
    }
    return acc;
}

void short_add_to_slice(const ShortRangeField& f, Index i3, Matrix& out) {
    require(i3 >= 1 && i3 <= f.n, "short_add_to_slice: plane index out of range");
    require(out.rows() == f.n && out.cols() == f.n, "short_add_to_slice: output must be n x n");
    const Index g = f.gamma;
    for (std::size_t v = 0; v < f.centers.size(); ++v) {
        const auto& c = f.centers[v];
        const Index d3 = i3 - c[2];
        if (d3 < -g || d3 > g) continue;
        Vector v3(f.xi.size());
        for (Index k = 0; k < f.xi.size(); ++k)
            v3(k) = f.charges(static_cast<Index>(v)) * f.xi(k) * f.window(g + d3, k);
        const Index lo1 = std::max<Index>(1, c[0] - g), hi1 = std::min<Index>(f.n, c[0] + g);
        const Index lo2 = std::max<Index>(1, c[1] - g), hi2 = std::min<Index>(f.n, c[1] + g);
        if (lo1 > hi1 || lo2 > hi2) continue;
        const Matrix w1 = f.window.middleRows(lo1 - (c[0] - g), hi1 - lo1 + 1);
        const Matrix w2 = f.window.middleRows(lo2 - (c[1] - g), hi2 - lo2 + 1);
        out.block(lo1 - 1, lo2 - 1, hi1 - lo1 + 1, hi2 - lo2 + 1).noalias() +=
            w1 * v3.asDiagonal() * w2.transpose();
    }
}

Matrix slice_from_cp(const CpTensor& c, Index i3) {
    const Index n1 = c.factors[0].rows(), n2 = c.factors[1].rows(), n3 = c.factors[2].rows();
    require(i3 >= 1 && i3 <= n3, "slice_from_cp: plane index out of range");
    Matrix out = Matrix::Zero(n1, n2);
    const Index chunk = 4096;
    for (Index c0 = 0; c0 < c.rank(); c0 += chunk) {
        const Index w = std::min<Index>(chunk, c.rank() - c0);
        Matrix scaled = c.factors[0].middleCols(c0, w);
        for (Index k = 0; k < w; ++k)
            scaled.col(k) *= c.weights(c0 + k) * c.factors[2](i3 - 1, c0 + k);
        out.noalias() += scaled * c.factors[1].middleCols(c0, w).transpose();
    }
    return out;
}

Matrix slice_from_tucker(const TuckerTensor& t, Index i3) { return tucker_grid_slice(t, i3); }

Matrix slice_from_chebtuck(const ChebTuckFunction& g, Index n, Index i3) {
    require(n >= 2, "slice_from_chebtuck: need at least two grid points");
    require(i3 >= 1 && i3 <= n, "slice_from_chebtuck: plane index out of range");
    const double h = 2.0 / static_cast<double>(n - 1);
    const double x3 = -1.0 + h * static_cast<double>(i3 - 1);
    return chebtuck_grid_slice(g, n, n, x3);
}

double middle_slice_error(const ChebTuckFunction& approx, const CpTensor& ref, Index n) {
    require(n >= 2 && n % 2 == 0, "middle_slice_error: n must be even");
    for (int l = 0; l < 3; ++l)
        require(ref.factors[l].rows() == n, "middle_slice_error: reference dims must equal n");
    const Index i3 = n / 2;
    return slice_rel_linf(slice_from_chebtuck(approx, n, i3), slice_from_cp(ref, i3));
}

double middle_slice_error(const TuckerTensor& approx_grid, const CpTensor& ref, Index n) {
    require(n >= 2 && n % 2 == 0, "middle_slice_error: n must be even");
    for (int l = 0; l < 3; ++l) {
        require(ref.factors[l].rows() == n, "middle_slice_error: reference dims must equal n");
        require(approx_grid.factors[l].rows() == n,
                "middle_slice_error: approximation dims must equal n");
    }
    const Index i3 = n / 2;
    return slice_rel_linf(tucker_grid_slice(approx_grid, i3), slice_from_cp(ref, i3));
}

double middle_slice_error(const ChebTuckFunction& approx, const DenseTensor3& ref) {
    const Index n1 = ref.dims[0], n2 = ref.dims[1], n3 = ref.dims[2];
    require(n3 >= 2 && n3 % 2 == 0, "middle_slice_error: mode-3 dim must be even");
    require(n1 >= 2 && n2 >= 2, "middle_slice_error: reference too small");
    const Index i3 = n3 / 2;
    const double h3 = 2.0 / static_cast<double>(n3 - 1);
    const double x3 = -1.0 + h3 * static_cast<double>(i3 - 1);
    Matrix rs(n1, n2);
    for (Index j = 0; j < n2; ++j)
        for (Index i = 0; i < n1; ++i) rs(i, j) = ref.at(i, j, i3 - 1);
    return slice_rel_linf(chebtuck_grid_slice(approx, n1, n2, x3), rs);
}

double middle_slice_error(const TuckerTensor& approx_grid, const DenseTensor3& ref) {
    const Index n1 = ref.dims[0], n2 = ref.dims[1], n3 = ref.dims[2];
    require(n3 >= 2 && n3 % 2 == 0, "middle_slice_error: mode-3 dim must be even");
    require(approx_grid.factors[0].rows() == n1 && approx_grid.factors[1].rows() == n2 &&
                approx_grid.factors[2].rows() == n3,
            "middle_slice_error: approximation dims must match the reference");
    const Index i3 = n3 / 2;
    Matrix rs(n1, n2);
    for (Index j = 0; j < n2; ++j)
        for (Index i = 0; i < n1; ++i) rs(i, j) = ref.at(i, j, i3 - 1);
    return slice_rel_linf(tucker_grid_slice(approx_grid, i3), rs);
}

}  // namespace chebtuck
