#include "chebtuck/serialize.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>

// The format writes raw in-memory integers and doubles, so it is defined for
// little-endian IEEE-754 hosts only.
static_assert(std::endian::native == std::endian::little,
              "ctk serialization assumes a little-endian host");
static_assert(std::numeric_limits<double>::is_iec559, "ctk serialization assumes IEEE doubles");

namespace chebtuck {

namespace {

constexpr char kMagic[4] = {'C', 'T', 'K', '1'};

class Writer {
  public:
    explicit Writer(const std::string& path)
        : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw std::runtime_error("write_ctk: cannot open " + path);
    }

    void bytes(const void* p, std::size_t count) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(count));
        if (!out_) throw std::runtime_error("write_ctk: write failed for " + path_);
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    void doubles(const double* p, std::size_t count) { bytes(p, 8 * count); }
    void header(CtkKind kind) {
        bytes(kMagic, 4);
        u8(static_cast<std::uint8_t>(kind));
    }
    void finish() {
        out_.flush();
        if (!out_) throw std::runtime_error("write_ctk: write failed for " + path_);
    }

  private:
    std::ofstream out_;
    std::string path_;
};

class Reader {
  public:
    explicit Reader(const std::string& path)
        : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw std::runtime_error("read_ctk: cannot open " + path);
    }

    void bytes(void* p, std::size_t count) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(count));
        if (!in_ || in_.gcount() != static_cast<std::streamsize>(count))
            throw std::runtime_error("read_ctk: truncated file " + path_);
    }
    [[nodiscard]] std::uint8_t u8() {
        std::uint8_t v = 0;
        bytes(&v, 1);
        return v;
    }
    [[nodiscard]] std::uint64_t u64() {
        std::uint64_t v = 0;
        bytes(&v, 8);
        return v;
    }
    [[nodiscard]] double f64() {
        double v = 0.0;
        bytes(&v, 8);
        return v;
    }
    void doubles(double* p, std::size_t count) { bytes(p, 8 * count); }

    [[nodiscard]] CtkKind header() {
        char magic[4] = {};
        bytes(magic, 4);
        if (magic[0] != 'C' || magic[1] != 'T' || magic[2] != 'K' || magic[3] != '1')
            throw std::runtime_error("read_ctk: bad magic in " + path_);
        const std::uint8_t kind = u8();
        if (kind > static_cast<std::uint8_t>(CtkKind::Newton))
            throw std::runtime_error("read_ctk: unknown kind tag in " + path_);
        return static_cast<CtkKind>(kind);
    }
    void expect(CtkKind want) {
        if (header() != want)
            throw std::runtime_error("read_ctk: wrong payload kind in " + path_);
    }
    void finish() {
        in_.peek();
        if (!in_.eof())
            throw std::runtime_error("read_ctk: trailing bytes in " + path_);
    }
    [[nodiscard]] const std::string& path() const { return path_; }

  private:
    std::ifstream in_;
    std::string path_;
};

// Extents are sanity-capped so a corrupted header cannot request an absurd
// allocation before the truncation check fires.
[[nodiscard]] Index checked_extent(std::uint64_t v, const char* what, const std::string& path) {
    if (v > (std::uint64_t{1} << 33))
        throw std::runtime_error(std::string("read_ctk: implausible ") + what + " in " + path);
    return static_cast<Index>(v);
}

void write_dense_body(Writer& w, const DenseTensor3& t) {
    for (Index d : t.dims) w.u64(static_cast<std::uint64_t>(d));
    w.doubles(t.values.data(), t.values.size());
}

[[nodiscard]] DenseTensor3 read_dense_body(Reader& r) {
    std::array<Index, 3> dims{};
    std::uint64_t count = 1;
    for (auto& d : dims) {
        d = checked_extent(r.u64(), "dense extent", r.path());
        if (d < 1) throw std::runtime_error("read_ctk: empty dense extent in " + r.path());
        count *= static_cast<std::uint64_t>(d);
        if (count > (std::uint64_t{1} << 33))
            throw std::runtime_error("read_ctk: implausible dense size in " + r.path());
    }
    DenseTensor3 t(dims[0], dims[1], dims[2]);
    r.doubles(t.values.data(), static_cast<std::size_t>(count));
    return t;
}

void write_cp_body(Writer& w, const CpTensor& t) {
    w.u64(static_cast<std::uint64_t>(t.rank()));
    for (const auto& f : t.factors) w.u64(static_cast<std::uint64_t>(f.rows()));
    w.doubles(t.weights.data(), static_cast<std::size_t>(t.weights.size()));
    for (const auto& f : t.factors)
        w.doubles(f.data(), static_cast<std::size_t>(f.size()));
}

[[nodiscard]] CpTensor read_cp_body(Reader& r) {
    const Index rank = checked_extent(r.u64(), "cp rank", r.path());
    std::array<Index, 3> dims{};
    for (auto& d : dims) {
        d = checked_extent(r.u64(), "cp extent", r.path());
        if (d < 1) throw std::runtime_error("read_ctk: empty cp extent in " + r.path());
    }
    CpTensor t;
    t.weights.resize(rank);
    r.doubles(t.weights.data(), static_cast<std::size_t>(rank));
    for (int l = 0; l < 3; ++l) {
        t.factors[static_cast<std::size_t>(l)].resize(dims[static_cast<std::size_t>(l)], rank);
        r.doubles(t.factors[static_cast<std::size_t>(l)].data(),
                  static_cast<std::size_t>(t.factors[static_cast<std::size_t>(l)].size()));
    }
    return t;
}

void write_tucker_body(Writer& w, const TuckerTensor& t) {
    for (Index rk : t.ranks()) w.u64(static_cast<std::uint64_t>(rk));
    for (const auto& f : t.factors) w.u64(static_cast<std::uint64_t>(f.rows()));
    w.doubles(t.core.values.data(), t.core.values.size());
    for (const auto& f : t.factors)
        w.doubles(f.data(), static_cast<std::size_t>(f.size()));
}

[[nodiscard]] TuckerTensor read_tucker_body(Reader& r) {
    std::array<Index, 3> ranks{}, dims{};
    for (auto& rk : ranks) {
        rk = checked_extent(r.u64(), "tucker rank", r.path());
        if (rk < 1) throw std::runtime_error("read_ctk: empty tucker rank in " + r.path());
    }
    for (auto& d : dims) {
        d = checked_extent(r.u64(), "tucker extent", r.path());
        if (d < 1) throw std::runtime_error("read_ctk: empty tucker extent in " + r.path());
    }
    TuckerTensor t;
    t.core = DenseTensor3(ranks[0], ranks[1], ranks[2]);
    r.doubles(t.core.values.data(), t.core.values.size());
    for (int l = 0; l < 3; ++l) {
        t.factors[static_cast<std::size_t>(l)].resize(dims[static_cast<std::size_t>(l)],
                                                      ranks[static_cast<std::size_t>(l)]);
        r.doubles(t.factors[static_cast<std::size_t>(l)].data(),
                  static_cast<std::size_t>(t.factors[static_cast<std::size_t>(l)].size()));
    }
    return t;
}

}  // namespace

CtkKind peek_kind(const std::string& path) {
    Reader r(path);
    return r.header();
}

void write_ctk(const DenseTensor3& t, const std::string& path) {
    Writer w(path);
    w.header(CtkKind::Dense);
    write_dense_body(w, t);
    w.finish();
}

void write_ctk(const CpTensor& t, const std::string& path) {
    Writer w(path);
    w.header(CtkKind::Cp);
    write_cp_body(w, t);
    w.finish();
}

void write_ctk(const TuckerTensor& t, const std::string& path) {
    Writer w(path);
    w.header(CtkKind::Tucker);
    write_tucker_body(w, t);
    w.finish();
}

// Provenance (build source, truncation report, interpolation error) is a
// build-time diagnostic and is not serialized; a reloaded function evaluates
// identically but reports no provenance.
void write_ctk(const ChebTuckFunction& g, const std::string& path) {
    Writer w(path);
    w.header(CtkKind::ChebTuck);
    for (Index m : g.m) w.u64(static_cast<std::uint64_t>(m));
    write_tucker_body(w, g.cct);
    w.finish();
}

void write_ctk(const NewtonCp& k, const std::string& path) {
    Writer w(path);
    w.header(CtkKind::Newton);
    w.u64(static_cast<std::uint64_t>(k.n));
    w.f64(k.h);
    w.f64(k.center);
    w.u64(static_cast<std::uint64_t>(k.quad_m_half));
    w.u8(k.integration == CellIntegration::ExactErf ? 0 : 1);
    w.u64(static_cast<std::uint64_t>(k.grid.size()));
    w.doubles(k.grid.data(), static_cast<std::size_t>(k.grid.size()));
    w.u64(static_cast<std::uint64_t>(k.t_kept.size()));
    w.doubles(k.t_kept.data(), static_cast<std::size_t>(k.t_kept.size()));
    write_cp_body(w, k.cp);
    w.finish();
}

DenseTensor3 read_ctk_dense(const std::string& path) {
    Reader r(path);
    r.expect(CtkKind::Dense);
    DenseTensor3 t = read_dense_body(r);
    r.finish();
    return t;
}

CpTensor read_ctk_cp(const std::string& path) {
    Reader r(path);
    r.expect(CtkKind::Cp);
    CpTensor t = read_cp_body(r);
    r.finish();
    return t;
}

TuckerTensor read_ctk_tucker(const std::string& path) {
    Reader r(path);
    r.expect(CtkKind::Tucker);
    TuckerTensor t = read_tucker_body(r);
    r.finish();
    return t;
}

ChebTuckFunction read_ctk_chebtuck(const std::string& path) {
    Reader r(path);
    r.expect(CtkKind::ChebTuck);
    ChebTuckFunction g;
    for (auto& m : g.m) {
        m = checked_extent(r.u64(), "degree", r.path());
        if (m < 2) throw std::runtime_error("read_ctk: degree below 2 in " + r.path());
    }
    g.cct = read_tucker_body(r);
    for (int l = 0; l < 3; ++l)
        if (g.cct.factors[static_cast<std::size_t>(l)].rows() != g.m[static_cast<std::size_t>(l)])
            throw std::runtime_error("read_ctk: degree/factor mismatch in " + r.path());
    r.finish();
    return g;
}

NewtonCp read_ctk_newton(const std::string& path) {
    Reader r(path);
    r.expect(CtkKind::Newton);
    NewtonCp k;
    k.n = checked_extent(r.u64(), "kernel size", r.path());
    k.h = r.f64();
    k.center = r.f64();
    k.quad_m_half = checked_extent(r.u64(), "quadrature size", r.path());
    const std::uint8_t integ = r.u8();
    if (integ > 1) throw std::runtime_error("read_ctk: unknown integration tag in " + path);
    k.integration = integ == 0 ? CellIntegration::ExactErf : CellIntegration::Midpoint;
    const Index grid_len = checked_extent(r.u64(), "grid length", r.path());
    k.grid.resize(grid_len);
    r.doubles(k.grid.data(), static_cast<std::size_t>(grid_len));
    const Index kept = checked_extent(r.u64(), "kept-node count", r.path());
    k.t_kept.resize(kept);
    r.doubles(k.t_kept.data(), static_cast<std::size_t>(kept));
    k.cp = read_cp_body(r);
    if (k.cp.factors[0].rows() != k.grid.size())
        throw std::runtime_error("read_ctk: kernel grid/factor mismatch in " + path);
    if (k.cp.rank() != kept)
        throw std::runtime_error("read_ctk: kernel rank/node mismatch in " + path);
    r.finish();
    return k;
}

}  // namespace chebtuck
