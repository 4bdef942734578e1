// Command-line experiment harness: kernel construction, middle-slice error
// tables, multi-particle potentials, runtime scaling sweeps, and CTK1 format
// build/evaluate utilities. All CSV doubles use %.17g; timing columns carry a
// time_ prefix so golden-file comparisons can strip them.
#include "CLI11.hpp"

#include "chebtuck/chebtuck.hpp"
#include "chebtuck/multiparticle.hpp"
#include "chebtuck/newton.hpp"
#include "chebtuck/serialize.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace chebtuck;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file " + out_path);
    out << text;
    if (!out) throw std::runtime_error("failed writing " + out_path);
    std::cout << "wrote " << out_path << "\n";
}

void write_field_csv(const Matrix& field, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    for (Index i = 0; i < field.rows(); ++i) {
        for (Index j = 0; j < field.cols(); ++j) {
            if (j) out << ',';
            out << fmt(field(i, j));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path);
}

InterpKind parse_interp(const std::string& s) {
    if (s == "spline") return InterpKind::Spline;
    if (s == "linear") return InterpKind::Linear;
    if (s == "nearest") return InterpKind::Nearest;
    throw std::invalid_argument("unknown interpolation kind " + s);
}

std::string kernel_cache_name(Index n, Index quad_m, CellIntegration integration,
                              bool reference) {
    std::string name = reference ? "newton_ref_n" : "newton_n";
    name += std::to_string(n) + "_M" + std::to_string(quad_m);
    name += integration == CellIntegration::ExactErf ? "_erf" : "_midpoint";
    return name + ".ctk";
}

NewtonCp load_or_build_kernel(const std::string& cache_dir, Index n, Index quad_m,
                              CellIntegration integration, bool reference, bool* cache_hit) {
    std::string path;
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        path = (std::filesystem::path(cache_dir) /
                kernel_cache_name(n, quad_m, integration, reference))
                   .string();
        if (std::filesystem::exists(path)) {
            NewtonCp k = read_ctk_newton(path);
            if (k.n == (reference ? 2 * n : n) && k.quad_m_half == quad_m &&
                k.integration == integration) {
                if (cache_hit) *cache_hit = true;
                return k;
            }
        }
    }
    if (cache_hit) *cache_hit = false;
    const SincQuadrature quad = default_quadrature(n, quad_m);
    NewtonCp k = reference ? newton_reference_cp(n, quad, integration)
                           : newton_cp(n, quad, integration);
    if (!path.empty()) write_ctk(k, path);
    return k;
}

struct KernelOpts {
    Index n = 0;
    Index quad_m = 64;
    std::string integration = "erf";
    std::string cache_dir;
    double tol = 0.0;
};

int cmd_kernel(const KernelOpts& o) {
    const CellIntegration integ =
        o.integration == "midpoint" ? CellIntegration::Midpoint : CellIntegration::ExactErf;
    bool hit = false;
    const NewtonCp k = load_or_build_kernel(o.cache_dir, o.n, o.quad_m, integ, false, &hit);
    const SincQuadrature quad = default_quadrature(o.n, o.quad_m);
    std::cout << "n=" << o.n << " M=" << o.quad_m << " R=" << k.cp.rank()
              << " max_rel_error=" << fmt(quad.max_rel_error)
              << " cache=" << (o.cache_dir.empty() ? "off" : (hit ? "hit" : "miss")) << "\n";
    if (o.tol > 0.0 && quad.max_rel_error > o.tol) {
        std::cerr << "quadrature error " << fmt(quad.max_rel_error) << " exceeds tolerance "
                  << fmt(o.tol) << "\n";
        return 1;
    }
    return 0;
}

struct TableOpts {
    std::vector<Index> ns;
    std::vector<Index> ms;
    double eps = 1e-7;
    Index quad_m = 64;
    Index sigma = 0;
    double tau_cut = 1e-4;
    bool no_rs = false;
    std::string out;
    std::string cache_dir;
};

int cmd_table_newton(const TableOpts& o) {
    std::string csv = o.no_rs ? "n,m,err,rank,time_build_s\n"
                              : "n,m,err,rank,tucker_rank,time_build_s\n";
    for (const Index n : o.ns) {
        const NewtonCp kern =
            load_or_build_kernel(o.cache_dir, n, o.quad_m, CellIntegration::ExactErf, false,
                                 nullptr);
        CpTensor target;
        if (o.no_rs) {
            target = kern.cp;
        } else {
            const Index sigma = o.sigma > 0 ? o.sigma : std::min(default_sigma(n), n / 2 - 1);
            target = range_separate(kern, sigma, o.tau_cut).long_part;
        }
        for (const Index m : o.ms) {
            const double t0 = now_s();
            const ChebTuckFunction g = build_from_cp(target, {m, m, m}, o.eps);
            const double dt = now_s() - t0;
            const double err = middle_slice_error(g, target, n);
            const std::array<Index, 3> gr = g.ranks();
            const Index rank = *std::max_element(gr.begin(), gr.end());
            csv += std::to_string(n) + "," + std::to_string(m) + "," + fmt(err) + ",";
            if (o.no_rs)
                csv += std::to_string(rank);
            else
                csv += std::to_string(target.rank()) + "," + std::to_string(rank);
            csv += "," + fmt(dt) + "\n";
        }
    }
    emit(csv, o.out);
    return 0;
}

struct PotentialOpts {
    std::string particles;
    Index cluster = 0;
    std::string lattice;
    double spacing = 0.05;
    Index vacancies = 0;
    double min_sep = 0.05;
    std::uint64_t seed = 42;
    Index n = 0;
    Index m = 0;
    double eps = 1e-6;
    Index quad_m = 64;
    Index sigma = 0;
    double tau_cut = 1e-4;
    std::string interp = "spline";
    std::string out;
    std::string slices;
    std::string cache_dir;
};

ParticleSystem make_system(const PotentialOpts& o) {
    const int sources = (!o.particles.empty() ? 1 : 0) + (o.cluster > 0 ? 1 : 0) +
                        (!o.lattice.empty() ? 1 : 0);
    if (sources != 1)
        throw std::invalid_argument(
            "exactly one of --particles, --cluster, --lattice must be given");
    if (!o.particles.empty()) return load_particles(o.particles);
    if (o.cluster > 0) return generate_cluster(o.cluster, o.seed, o.min_sep);
    long long l1 = 0, l2 = 0, l3 = 0;
    if (std::sscanf(o.lattice.c_str(), "%lldx%lldx%lld", &l1, &l2, &l3) != 3)
        throw std::invalid_argument("lattice shape must look like 24x24x4");
    if (o.vacancies > 0)
        return generate_lattice({l1, l2, l3}, o.spacing, o.vacancies, o.seed);
    return generate_lattice({l1, l2, l3}, o.spacing);
}

int cmd_potential(const PotentialOpts& o) {
    const double t_start = now_s();
    const ParticleSystem sys = make_system(o);
    const NewtonCp ref = load_or_build_kernel(o.cache_dir, o.n, o.quad_m,
                                              CellIntegration::ExactErf, true, nullptr);
    const Index sigma = o.sigma > 0 ? o.sigma : std::min(default_sigma(o.n), o.n - 1);
    const RsSplit rs = range_separate(ref, sigma, o.tau_cut);

    const double t_build0 = now_s();
    const RsPotential p = build_rs_potential(sys, rs, o.n, o.eps);
    const ChebTuckFunction g =
        build_from_cp(p.long_cp, {o.m, o.m, o.m}, o.eps, parse_interp(o.interp));
    const double t_build = now_s() - t_build0;

    const double err = middle_slice_error(g, p.long_cp, o.n);
    const double t_total = now_s() - t_start;

    std::string csv = "n,m,eps,N,R_l,R_s,gamma,r1,r2,r3,err,time_build_s,time_total_s\n";
    csv += std::to_string(o.n) + "," + std::to_string(o.m) + "," + fmt(o.eps) + "," +
           std::to_string(sys.count()) + "," + std::to_string(p.long_cp.rank()) + "," +
           std::to_string(p.short_part.xi.size()) + "," + std::to_string(p.short_part.gamma) +
           "," + std::to_string(g.ranks()[0]) + "," + std::to_string(g.ranks()[1]) + "," +
           std::to_string(g.ranks()[2]) + "," + fmt(err) + "," + fmt(t_build) + "," +
           fmt(t_total) + "\n";
    emit(csv, o.out);

    if (!o.slices.empty()) {
        const Index mid = o.n / 2;
        const Matrix ref_slice = slice_from_cp(p.long_cp, mid);
        const Matrix approx = slice_from_chebtuck(g, o.n, mid);
        const Matrix c2t = slice_from_tucker(p.long_tucker, mid);
        write_field_csv(approx, o.slices + "_approx.csv");
        write_field_csv((c2t - ref_slice).cwiseAbs(), o.slices + "_c2t_err.csv");
        write_field_csv((approx - ref_slice).cwiseAbs(), o.slices + "_total_err.csv");
        std::cout << "wrote " << o.slices << "_{approx,c2t_err,total_err}.csv\n";
    }
    return 0;
}

struct ScalingOpts {
    std::string algorithm = "cp";
    std::vector<Index> ns;
    Index m = 129;
    double eps = 1e-7;
    Index quad_m = 64;
    Index sigma = 0;
    double tau_cut = 1e-4;
    std::string out;
    std::string cache_dir;
};

// Median wall time with adaptive repetition (at least 200 ms of samples).
template <typename F>
double median_time(F&& work) {
    std::vector<double> samples;
    double total = 0.0;
    while (total < 0.2 && samples.size() < 50) {
        const double t0 = now_s();
        work();
        const double dt = now_s() - t0;
        samples.push_back(dt);
        total += dt;
    }
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

int cmd_scaling(const ScalingOpts& o) {
    const bool run_cp = o.algorithm == "cp" || o.algorithm == "both";
    const bool run_grid = o.algorithm == "grid" || o.algorithm == "both";
    if (!run_cp && !run_grid)
        throw std::invalid_argument("--algorithm must be cp, grid, or both");
    std::string csv = "algorithm,n,m,R,rank,time_build_s\n";
    std::vector<std::pair<double, double>> cp_points;
    for (const Index n : o.ns) {
        const NewtonCp kern = load_or_build_kernel(o.cache_dir, n, o.quad_m,
                                                   CellIntegration::ExactErf, false, nullptr);
        const Index sigma = o.sigma > 0 ? o.sigma : std::min(default_sigma(n), n / 2 - 1);
        const CpTensor target = range_separate(kern, sigma, o.tau_cut).long_part;
        if (run_cp) {
            ChebTuckFunction g;
            const double t = median_time(
                [&] { g = build_from_cp(target, {o.m, o.m, o.m}, o.eps); });
            const std::array<Index, 3> gr = g.ranks();
            const Index rank = *std::max_element(gr.begin(), gr.end());
            csv += "cp," + std::to_string(n) + "," + std::to_string(o.m) + "," +
                   std::to_string(target.rank()) + "," + std::to_string(rank) + "," + fmt(t) +
                   "\n";
            cp_points.emplace_back(std::log(static_cast<double>(n)), std::log(t));
        }
        if (run_grid) {
            const DenseTensor3 dense = cp_to_dense(target);
            const double t0 = now_s();
            const ChebTuckFunction g = build_from_grid(dense, {o.m, o.m, o.m}, o.eps);
            const double t = now_s() - t0;
            const std::array<Index, 3> gr = g.ranks();
            const Index rank = *std::max_element(gr.begin(), gr.end());
            csv += "grid," + std::to_string(n) + "," + std::to_string(o.m) + "," +
                   std::to_string(target.rank()) + "," + std::to_string(rank) + "," + fmt(t) +
                   "\n";
        }
    }
    emit(csv, o.out);
    if (cp_points.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [x, y] : cp_points) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double k = static_cast<double>(cp_points.size());
        const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        std::cout << "slope_cp=" << fmt(slope) << "\n";
    }
    return 0;
}

struct BuildOpts {
    std::string in;
    std::string out;
    Index m = 0;
    double eps = 1e-6;
    std::string interp = "spline";
};

int cmd_build(const BuildOpts& o) {
    const std::array<Index, 3> m{o.m, o.m, o.m};
    ChebTuckFunction g;
    switch (peek_kind(o.in)) {
        case CtkKind::Dense:
            g = build_from_grid(read_ctk_dense(o.in), m, o.eps);
            break;
        case CtkKind::Cp:
            g = build_from_cp(read_ctk_cp(o.in), m, o.eps, parse_interp(o.interp));
            break;
        case CtkKind::Tucker:
            g = build_from_grid(tucker_to_dense(read_ctk_tucker(o.in)), m, o.eps);
            break;
        case CtkKind::Newton:
            g = build_from_cp(read_ctk_newton(o.in).cp, m, o.eps, parse_interp(o.interp));
            break;
        case CtkKind::ChebTuck:
            throw std::invalid_argument("input is already in the target format");
    }
    write_ctk(g, o.out);
    std::cout << "ranks=(" << g.ranks()[0] << "," << g.ranks()[1] << "," << g.ranks()[2]
              << ") m=" << o.m << " wrote " << o.out << "\n";
    return 0;
}

struct EvalOpts {
    std::string in;
    std::string at;
};

int cmd_eval(const EvalOpts& o) {
    const ChebTuckFunction g = read_ctk_chebtuck(o.in);
    double x = 0, y = 0, z = 0;
    if (std::sscanf(o.at.c_str(), "%lf,%lf,%lf", &x, &y, &z) != 3)
        throw std::invalid_argument("--at expects x,y,z");
    bool extrapolated = false;
    const double v = evaluate(g, x, y, z, &extrapolated);
    if (extrapolated) std::cerr << "warning: point lies outside [-1,1]^3\n";
    std::cout << fmt(v) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-level Chebyshev-Tucker toolkit for trivariate functions"};
    app.require_subcommand(1);

    KernelOpts ko;
    auto* k = app.add_subcommand("kernel", "Build (and cache) a Gaussian-sum kernel");
    k->add_option("--n", ko.n, "grid size (even)")->required();
    k->add_option("--quad-m", ko.quad_m, "quadrature half-size M");
    k->add_option("--integration", ko.integration, "cell rule: erf|midpoint")
        ->check(CLI::IsMember({"erf", "midpoint"}));
    k->add_option("--kernel-cache", ko.cache_dir, "cache directory");
    k->add_option("--tol", ko.tol, "fail if the quadrature sweep error exceeds this");

    TableOpts to;
    auto* t = app.add_subcommand("table-newton",
                                 "Middle-slice error table of the kernel approximation");
    t->add_option("--n", to.ns, "grid sizes")->required()->delimiter(',');
    t->add_option("--m", to.ms, "Chebyshev degree counts")->required()->delimiter(',');
    t->add_option("--eps", to.eps, "compression tolerance");
    t->add_option("--quad-m", to.quad_m, "quadrature half-size M");
    t->add_option("--sigma", to.sigma, "separation radius in cells (0 = auto)");
    t->add_option("--tau-cut", to.tau_cut, "short-range classification threshold");
    t->add_flag("--no-rs", to.no_rs, "approximate the full kernel without range separation");
    t->add_option("--out", to.out, "CSV output path (default stdout)");
    t->add_option("--kernel-cache", to.cache_dir, "kernel cache directory");

    PotentialOpts po;
    auto* p = app.add_subcommand("potential", "Multi-particle electrostatic potential");
    p->add_option("--particles", po.particles, "particle file (x y z charge per line)");
    p->add_option("--cluster", po.cluster, "generate a pseudo-random cluster of this size");
    p->add_option("--lattice", po.lattice, "lattice dims, e.g. 24x24x4");
    p->add_option("--spacing", po.spacing, "lattice spacing");
    p->add_option("--vacancies", po.vacancies, "random vacancies removed from the lattice");
    p->add_option("--min-sep", po.min_sep, "minimum cluster separation");
    p->add_option("--seed", po.seed, "generator seed");
    p->add_option("--n", po.n, "grid size (even)")->required();
    p->add_option("--m", po.m, "Chebyshev degree count")->required();
    p->add_option("--eps", po.eps, "compression tolerance");
    p->add_option("--quad-m", po.quad_m, "quadrature half-size M");
    p->add_option("--sigma", po.sigma, "separation radius in cells (0 = auto)");
    p->add_option("--tau-cut", po.tau_cut, "short-range classification threshold");
    p->add_option("--interp", po.interp, "lift: spline|linear|nearest")
        ->check(CLI::IsMember({"spline", "linear", "nearest"}));
    p->add_option("--out", po.out, "CSV output path (default stdout)");
    p->add_option("--slices", po.slices, "prefix for middle-slice field dumps");
    p->add_option("--kernel-cache", po.cache_dir, "kernel cache directory");

    ScalingOpts so;
    auto* s = app.add_subcommand("scaling", "Runtime scaling across grid sizes");
    s->add_option("--algorithm", so.algorithm, "cp|grid|both")
        ->check(CLI::IsMember({"cp", "grid", "both"}));
    s->add_option("--n", so.ns, "grid sizes")->required()->delimiter(',');
    s->add_option("--m", so.m, "Chebyshev degree count");
    s->add_option("--eps", so.eps, "compression tolerance");
    s->add_option("--quad-m", so.quad_m, "quadrature half-size M");
    s->add_option("--sigma", so.sigma, "separation radius in cells (0 = auto)");
    s->add_option("--tau-cut", so.tau_cut, "short-range classification threshold");
    s->add_option("--out", so.out, "CSV output path (default stdout)");
    s->add_option("--kernel-cache", so.cache_dir, "kernel cache directory");

    BuildOpts bo;
    auto* b = app.add_subcommand("build", "Compress a CTK1 tensor file into the format");
    b->add_option("--in", bo.in, "input .ctk (dense, cp, tucker, or kernel)")->required();
    b->add_option("--out", bo.out, "output .ctk")->required();
    b->add_option("--m", bo.m, "Chebyshev degree count")->required();
    b->add_option("--eps", bo.eps, "compression tolerance");
    b->add_option("--interp", bo.interp, "lift: spline|linear|nearest")
        ->check(CLI::IsMember({"spline", "linear", "nearest"}));

    EvalOpts eo;
    auto* e = app.add_subcommand("eval", "Evaluate a compressed function at a point");
    e->add_option("--in", eo.in, "input .ctk (compressed function)")->required();
    e->add_option("--at", eo.at, "evaluation point x,y,z")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (k->parsed()) return cmd_kernel(ko);
        if (t->parsed()) return cmd_table_newton(to);
        if (p->parsed()) return cmd_potential(po);
        if (s->parsed()) return cmd_scaling(so);
        if (b->parsed()) return cmd_build(bo);
        if (e->parsed()) return cmd_eval(eo);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
