#include "chebtuck/kernels.hpp"

#include "chebtuck/chebyshev.hpp"
#include "chebtuck/spline.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace chebtuck::kernels {

namespace {

int env_thread_default() {
    int cap = omp_get_max_threads();
    if (cap < 1) cap = 1;
    const char* s = std::getenv("CHEBTUCK_THREADS");
    if (s == nullptr) return cap;
    char* end = nullptr;
    const long parsed = std::strtol(s, &end, 10);
    if (end == s || parsed < 1) return cap;
    return static_cast<int>(std::min<long>(parsed, cap));
}

int& thread_override() {
    static int v = 0;  // 0 means "use the environment default"
    return v;
}

void check_mode_args(const DenseTensor3& t, const Matrix& m, int mode, const DenseTensor3& out) {
    require(mode >= 1 && mode <= 3, "mode_multiply: mode must be 1, 2 or 3");
    require(m.cols() == t.dims[mode - 1], "mode_multiply: factor width must match the contracted mode");
    require(m.rows() >= 1, "mode_multiply: empty factor");
    require(&out != &t, "mode_multiply: output must not alias the input");
}

std::array<Index, 3> mode_out_dims(const DenseTensor3& t, const Matrix& m, int mode) {
    std::array<Index, 3> d = t.dims;
    d[mode - 1] = m.rows();
    return d;
}

// Contiguous mode-1 fiber update shared by both variants: for one (i2,i3) pair,
// out fiber += sum_i m(:,i) * t fiber(i), i ascending.
inline void mode1_fiber(const double* tin, const Matrix& m, Index n1, Index p, double* o) {
    for (Index i = 0; i < n1; ++i) {
        const double c = tin[i];
        const double* mc = m.data() + i * p;
        for (Index a = 0; a < p; ++a) o[a] += mc[a] * c;
    }
}

// Mode-2 update of one i3 slab: out(:,b,k) += sum_j m(b,j) t(:,j,k), j ascending.
inline void mode2_slab(const double* tsl, const Matrix& m, Index n1, Index n2, Index p, double* osl) {
    for (Index b = 0; b < p; ++b) {
        double* ocol = osl + b * n1;
        for (Index j = 0; j < n2; ++j) {
            const double c = m(b, j);
            const double* tcol = tsl + j * n1;
            for (Index i = 0; i < n1; ++i) ocol[i] += c * tcol[i];
        }
    }
}

// Mode-3 update of one output slab: out(:,:,c) += sum_k m(c,k) t(:,:,k), k ascending.
inline void mode3_slab(const DenseTensor3& t, const Matrix& m, Index c, Index slab, double* osl) {
    for (Index k = 0; k < t.dims[2]; ++k) {
        const double w = m(c, k);
        const double* tsl = t.values.data() + k * slab;
        for (Index i = 0; i < slab; ++i) osl[i] += w * tsl[i];
    }
}

// Row-major copy of a column-major matrix so Gram rows are contiguous.
std::vector<double> row_major_copy(const Matrix& s) {
    const Index r = s.rows(), n = s.cols();
    std::vector<double> rm(static_cast<std::size_t>(r) * static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
        const double* col = s.data() + k * r;
        for (Index i = 0; i < r; ++i) rm[static_cast<std::size_t>(i) * n + k] = col[i];
    }
    return rm;
}

inline void gram_row(const std::vector<double>& rm, Index n, Index i, Matrix& g) {
    const double* a = rm.data() + static_cast<std::size_t>(i) * n;
    for (Index j = 0; j <= i; ++j) {
        const double* b = rm.data() + static_cast<std::size_t>(j) * n;
        long double acc = 0.0L;
        for (Index k = 0; k < n; ++k)
            acc += static_cast<long double>(a[k]) * static_cast<long double>(b[k]);
        const double v = static_cast<double>(acc);
        g(i, j) = v;
        g(j, i) = v;
    }
}

void check_newton_args(const Vector& grid, double h, const Vector& tq, bool erf_cells) {
    require(grid.size() >= 1 && tq.size() >= 1, "newton_columns: empty input");
    require(h > 0.0, "newton_columns: cell width must be positive");
    if (erf_cells) require(tq.minCoeff() > 0.0, "newton_columns: quadrature nodes must be positive");
}

inline void newton_column(const Vector& grid, double h, double t, bool erf_cells, double* col) {
    const Index n = grid.size();
    if (erf_cells) {
        const double scale = std::sqrt(std::numbers::pi) / (2.0 * t * h);
        const double half = 0.5 * h;
        for (Index i = 0; i < n; ++i) {
            const double x = grid(i);
            col[i] = scale * (std::erf(t * (x + half)) - std::erf(t * (x - half)));
        }
    } else {
        const double t2 = t * t;
        for (Index i = 0; i < n; ++i) {
            const double x = grid(i);
            col[i] = std::exp(-t2 * (x * x));
        }
    }
}

inline void lift_column(const double* col, Index n, double h, InterpKind kind,
                        const Vector& points, double* o) {
    const Index np = points.size();
    switch (kind) {
        case InterpKind::Spline: {
            const CubicSpline1D s = spline_fit(Eigen::Map<const Vector>(col, n));
            for (Index p = 0; p < np; ++p) o[p] = spline_eval(s, points(p));
            break;
        }
        case InterpKind::Linear: {
            for (Index p = 0; p < np; ++p) {
                const double u = (points(p) + 1.0) / h;
                if (u <= 0.0) {
                    o[p] = col[0];
                } else if (u >= static_cast<double>(n - 1)) {
                    o[p] = col[n - 1];
                } else {
                    const Index i = static_cast<Index>(u);
                    const double tau = u - static_cast<double>(i);
                    o[p] = col[i] + tau * (col[i + 1] - col[i]);
                }
            }
            break;
        }
        case InterpKind::Nearest: {
            for (Index p = 0; p < np; ++p) {
                Index i = static_cast<Index>(std::llround((points(p) + 1.0) / h));
                i = std::clamp<Index>(i, 0, n - 1);
                o[p] = col[i];
            }
            break;
        }
    }
}

std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

// Plans are cached per length for the life of the process; FFTW_UNALIGNED lets
// one plan serve arbitrary buffers via the new-array execute call, which is
// thread safe as long as planning itself is serialised.
fftw_plan dct1_plan_for(Index m) {
    static std::map<Index, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    std::vector<double> tin(m), tout(m);
    fftw_plan p = fftw_plan_r2r_1d(static_cast<int>(m), tin.data(), tout.data(),
                                   FFTW_REDFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(p != nullptr, "dct_columns: plan creation failed");
    cache.emplace(m, p);
    return p;
}

inline void dct1_apply(fftw_plan plan, Index m, const double* col, double* dst,
                       double* in_buf, double* out_buf) {
    std::memcpy(in_buf, col, sizeof(double) * static_cast<std::size_t>(m));
    fftw_execute_r2r(plan, in_buf, out_buf);
    const double inv = 1.0 / static_cast<double>(m - 1);
    dst[0] = 0.5 * inv * out_buf[0];
    for (Index k = 1; k < m - 1; ++k) dst[k] = inv * out_buf[k];
    dst[m - 1] = 0.5 * inv * out_buf[m - 1];
}

inline void dct_dense_column(const Matrix& w, const double* col, Index m, double* dst) {
    for (Index k = 0; k < m; ++k) {
        double acc = 0.0;
        const double* wrow = w.data() + k;  // row k, stride m
        for (Index j = 0; j < m; ++j) acc += wrow[j * m] * col[j];
        dst[k] = acc;
    }
}

void check_core_args(const Matrix& g1, const Matrix& g2, const Matrix& g3, const Vector& w) {
    const Index r = w.size();
    require(g1.cols() == r && g2.cols() == r && g3.cols() == r,
            "core_accumulate: factor widths must match the weight count");
    require(g1.rows() >= 1 && g2.rows() >= 1 && g3.rows() >= 1, "core_accumulate: empty factor");
}

}  // namespace

int thread_count() {
    static const int env = env_thread_default();
    const int o = thread_override();
    return o > 0 ? o : env;
}

void set_thread_count(int n) {
    require(n >= 1, "set_thread_count: need at least one thread");
    thread_override() = n;
}

namespace serial {

void mode_multiply(const DenseTensor3& t, const Matrix& m, int mode, DenseTensor3& out) {
    check_mode_args(t, m, mode, out);
    const auto d = mode_out_dims(t, m, mode);
    out = DenseTensor3(d[0], d[1], d[2]);
    const Index n1 = t.dims[0], n2 = t.dims[1], n3 = t.dims[2];
    const Index p = m.rows();
    if (mode == 1) {
        const Index fibers = n2 * n3;
        for (Index jk = 0; jk < fibers; ++jk)
            mode1_fiber(t.values.data() + jk * n1, m, n1, p, out.values.data() + jk * p);
    } else if (mode == 2) {
        for (Index k = 0; k < n3; ++k)
            mode2_slab(t.values.data() + k * n1 * n2, m, n1, n2, p,
                       out.values.data() + k * n1 * p);
    } else {
        const Index slab = n1 * n2;
        for (Index c = 0; c < p; ++c)
            mode3_slab(t, m, c, slab, out.values.data() + c * slab);
    }
}

void gram(const Matrix& s, Matrix& g) {
    require(s.rows() >= 1 && s.cols() >= 1, "gram: empty matrix");
    const std::vector<double> rm = row_major_copy(s);
    g.resize(s.rows(), s.rows());
    for (Index i = 0; i < s.rows(); ++i) gram_row(rm, s.cols(), i, g);
}

void newton_columns(const Vector& grid, double h, const Vector& tq, bool erf_cells, Matrix& out) {
    check_newton_args(grid, h, tq, erf_cells);
    out.resize(grid.size(), tq.size());
    for (Index k = 0; k < tq.size(); ++k)
        newton_column(grid, h, tq(k), erf_cells, out.data() + k * grid.size());
}

void lift_columns(const Matrix& b, InterpKind kind, const Vector& points, Matrix& out) {
    const Index n = b.rows();
    require(n >= 2, "lift_columns: need at least two knots");
    require(points.size() >= 1, "lift_columns: empty query");
    out.resize(points.size(), b.cols());
    const double h = 2.0 / static_cast<double>(n - 1);
    for (Index c = 0; c < b.cols(); ++c)
        lift_column(b.data() + c * n, n, h, kind, points, out.data() + c * points.size());
}

void dct_columns(const Matrix& q, Matrix& out) {
    const Index m = q.rows(), cols = q.cols();
    require(m >= 2, "dct_columns: need at least two rows");
    out.resize(m, cols);
    if (m < 8) {
        const Matrix w = dct_matrix(m);
        for (Index c = 0; c < cols; ++c)
            dct_dense_column(w, q.data() + c * m, m, out.data() + c * m);
        return;
    }
    fftw_plan plan = dct1_plan_for(m);
    std::vector<double> in_buf(m), out_buf(m);
    for (Index c = 0; c < cols; ++c)
        dct1_apply(plan, m, q.data() + c * m, out.data() + c * m, in_buf.data(), out_buf.data());
}

void core_accumulate(const Matrix& g1, const Matrix& g2, const Matrix& g3,
                     const Vector& w, DenseTensor3& core) {
    check_core_args(g1, g2, g3, w);
    const Index r1 = g1.rows(), r2 = g2.rows(), r3 = g3.rows();
    core = DenseTensor3(r1, r2, r3);
    for (Index k = 0; k < w.size(); ++k) {
        const double* u1 = g1.data() + k * r1;
        const double* u2 = g2.data() + k * r2;
        const double* u3 = g3.data() + k * r3;
        const double wk = w(k);
        for (Index c = 0; c < r3; ++c) {
            const double wc = wk * u3[c];
            double* slab = core.values.data() + c * r1 * r2;
            for (Index b = 0; b < r2; ++b) {
                const double wb = wc * u2[b];
                double* o = slab + b * r1;
                for (Index a = 0; a < r1; ++a) o[a] += wb * u1[a];
            }
        }
    }
}

void cp_densify(const Vector& xi, const Matrix& u1, const Matrix& u2, const Matrix& u3,
                DenseTensor3& out) {
    core_accumulate(u1, u2, u3, xi, out);
}

}  // namespace serial

namespace omp {

void mode_multiply(const DenseTensor3& t, const Matrix& m, int mode, DenseTensor3& out) {
    check_mode_args(t, m, mode, out);
    const auto d = mode_out_dims(t, m, mode);
    out = DenseTensor3(d[0], d[1], d[2]);
    const Index n1 = t.dims[0], n2 = t.dims[1], n3 = t.dims[2];
    const Index p = m.rows();
    const int nt = thread_count();
    if (mode == 1) {
        const Index fibers = n2 * n3;
#pragma omp parallel for num_threads(nt) schedule(static)
        for (Index jk = 0; jk < fibers; ++jk)
            mode1_fiber(t.values.data() + jk * n1, m, n1, p, out.values.data() + jk * p);
    } else if (mode == 2) {
#pragma omp parallel for num_threads(nt) schedule(static)
        for (Index k = 0; k < n3; ++k)
            mode2_slab(t.values.data() + k * n1 * n2, m, n1, n2, p,
                       out.values.data() + k * n1 * p);
    } else {
        const Index slab = n1 * n2;
#pragma omp parallel for num_threads(nt) schedule(static)
        for (Index c = 0; c < p; ++c)
            mode3_slab(t, m, c, slab, out.values.data() + c * slab);
    }
}

void gram(const Matrix& s, Matrix& g) {
    require(s.rows() >= 1 && s.cols() >= 1, "gram: empty matrix");
    const std::vector<double> rm = row_major_copy(s);
    g.resize(s.rows(), s.rows());
    const Index r = s.rows(), n = s.cols();
#pragma omp parallel for num_threads(thread_count()) schedule(static)
    for (Index i = 0; i < r; ++i) gram_row(rm, n, i, g);
}

void newton_columns(const Vector& grid, double h, const Vector& tq, bool erf_cells, Matrix& out) {
    check_newton_args(grid, h, tq, erf_cells);
    out.resize(grid.size(), tq.size());
    const Index cols = tq.size(), n = grid.size();
#pragma omp parallel for num_threads(thread_count()) schedule(static)
    for (Index k = 0; k < cols; ++k)
        newton_column(grid, h, tq(k), erf_cells, out.data() + k * n);
}

void lift_columns(const Matrix& b, InterpKind kind, const Vector& points, Matrix& out) {
    const Index n = b.rows();
    require(n >= 2, "lift_columns: need at least two knots");
    require(points.size() >= 1, "lift_columns: empty query");
    out.resize(points.size(), b.cols());
    const double h = 2.0 / static_cast<double>(n - 1);
    const Index cols = b.cols(), np = points.size();
#pragma omp parallel for num_threads(thread_count()) schedule(static)
    for (Index c = 0; c < cols; ++c)
        lift_column(b.data() + c * n, n, h, kind, points, out.data() + c * np);
}

void dct_columns(const Matrix& q, Matrix& out) {
    const Index m = q.rows(), cols = q.cols();
    require(m >= 2, "dct_columns: need at least two rows");
    out.resize(m, cols);
    if (m < 8) {
        const Matrix w = dct_matrix(m);
#pragma omp parallel for num_threads(thread_count()) schedule(static)
        for (Index c = 0; c < cols; ++c)
            dct_dense_column(w, q.data() + c * m, m, out.data() + c * m);
        return;
    }
    fftw_plan plan = dct1_plan_for(m);
#pragma omp parallel num_threads(thread_count())
    {
        std::vector<double> in_buf(m), out_buf(m);
#pragma omp for schedule(static)
        for (Index c = 0; c < cols; ++c)
            dct1_apply(plan, m, q.data() + c * m, out.data() + c * m,
                       in_buf.data(), out_buf.data());
    }
}

void core_accumulate(const Matrix& g1, const Matrix& g2, const Matrix& g3,
                     const Vector& w, DenseTensor3& core) {
    check_core_args(g1, g2, g3, w);
    const Index r1 = g1.rows(), r2 = g2.rows(), r3 = g3.rows();
    core = DenseTensor3(r1, r2, r3);
    const Index terms = w.size();
#pragma omp parallel for num_threads(thread_count()) schedule(static)
    for (Index c = 0; c < r3; ++c) {
        double* slab = core.values.data() + c * r1 * r2;
        for (Index k = 0; k < terms; ++k) {
            const double wc = w(k) * g3(c, k);
            const double* u1 = g1.data() + k * r1;
            const double* u2 = g2.data() + k * r2;
            for (Index b = 0; b < r2; ++b) {
                const double wb = wc * u2[b];
                double* o = slab + b * r1;
                for (Index a = 0; a < r1; ++a) o[a] += wb * u1[a];
            }
        }
    }
}

void cp_densify(const Vector& xi, const Matrix& u1, const Matrix& u2, const Matrix& u3,
                DenseTensor3& out) {
    core_accumulate(u1, u2, u3, xi, out);
}

}  // namespace omp

void mode_multiply(const DenseTensor3& t, const Matrix& m, int mode, DenseTensor3& out) {
    if (thread_count() > 1) omp::mode_multiply(t, m, mode, out);
    else serial::mode_multiply(t, m, mode, out);
}

void gram(const Matrix& s, Matrix& g) {
    if (thread_count() > 1) omp::gram(s, g);
    else serial::gram(s, g);
}

void newton_columns(const Vector& grid, double h, const Vector& tq, bool erf_cells, Matrix& out) {
    if (thread_count() > 1) omp::newton_columns(grid, h, tq, erf_cells, out);
    else serial::newton_columns(grid, h, tq, erf_cells, out);
}

void lift_columns(const Matrix& b, InterpKind kind, const Vector& points, Matrix& out) {
    if (thread_count() > 1) omp::lift_columns(b, kind, points, out);
    else serial::lift_columns(b, kind, points, out);
}

void dct_columns(const Matrix& q, Matrix& out) {
    if (thread_count() > 1) omp::dct_columns(q, out);
    else serial::dct_columns(q, out);
}

void core_accumulate(const Matrix& g1, const Matrix& g2, const Matrix& g3,
                     const Vector& w, DenseTensor3& core) {
    if (thread_count() > 1) omp::core_accumulate(g1, g2, g3, w, core);
    else serial::core_accumulate(g1, g2, g3, w, core);
}

void cp_densify(const Vector& xi, const Matrix& u1, const Matrix& u2, const Matrix& u3,
                DenseTensor3& out) {
    if (thread_count() > 1) omp::cp_densify(xi, u1, u2, u3, out);
    else serial::cp_densify(xi, u1, u2, u3, out);
}

}  // namespace chebtuck::kernels
