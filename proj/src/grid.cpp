#include "glow/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace glow {

namespace {

// Number of cells covered by [a,b] at spacing h; rejects non-divisible extents.
int span_cells(double a, double b, double h, const char* what) {
    if (h <= 0) throw ConfigError(std::string("grid spacing must be positive for ") + what);
    double raw = (b - a) / h;
    long n = std::lround(raw);
    double scale = std::max(1.0, std::abs(raw));
    if (n < 1 || std::abs(raw - double(n)) > 1e-9 * scale)
        throw ConfigError(std::string("extent of ") + what + " is not an integer multiple of the spacing");
    return int(n);
}

int locate(double coord, double origin, double h, const char* what) {
    double raw = (coord - origin) / h;
    long n = std::lround(raw);
    if (std::abs(raw - double(n)) > 1e-9 * std::max(1.0, std::abs(raw)))
        throw ConfigError(std::string(what) + " boundary does not lie on a grid node");
    return int(n);
}

}  // namespace

Grid3 make_grid(const GridSpec& s) {
    if (!(s.gx1 > s.gx0 && s.gy1 > s.gy0 && s.gz1 > s.gz0))
        throw ConfigError("outer prism has a zero or negative axis extent");
    if (!(s.ox1 > s.ox0 && s.oy1 > s.oy0 && s.oz1 > s.oz0))
        throw ConfigError("inner sub-prism has a zero or negative axis extent");
    const double tol = 1e-12;
    if (s.ox0 < s.gx0 - tol || s.ox1 > s.gx1 + tol || s.oy0 < s.gy0 - tol ||
        s.oy1 > s.gy1 + tol || s.oz0 < s.gz0 - tol || s.oz1 > s.gz1 + tol)
        throw ConfigError("inner sub-prism must be contained in the outer prism");

    Grid3 g;
    g.ox = s.gx0; g.oy = s.gy0; g.oz = s.gz0;
    g.hx = s.hx; g.hy = s.hy; g.hz = s.hz;
    g.nx = span_cells(s.gx0, s.gx1, s.hx, "x") + 1;
    g.ny = span_cells(s.gy0, s.gy1, s.hy, "y") + 1;
    g.nz = span_cells(s.gz0, s.gz1, s.hz, "z") + 1;
    if (g.nx < 3 || g.ny < 3 || g.nz < 3)
        throw ConfigError("grid needs at least 3 nodes per axis");

    g.i0 = locate(s.ox0, s.gx0, s.hx, "inner x0");
    g.i1 = locate(s.ox1, s.gx0, s.hx, "inner x1");
    g.j0 = locate(s.oy0, s.gy0, s.hy, "inner y0");
    g.j1 = locate(s.oy1, s.gy0, s.hy, "inner y1");
    g.k0 = locate(s.oz0, s.gz0, s.hz, "inner z0");
    g.k1 = locate(s.oz1, s.gz0, s.hz, "inner z1");
    if (g.i1 - g.i0 < 2 || g.j1 - g.j0 < 2 || g.k1 - g.k0 < 2)
        throw ConfigError("inner sub-prism needs at least 3 nodes per axis");
    return g;
}

// ---------------------------------------------------------------------------
// binary IO
// ---------------------------------------------------------------------------

namespace {

void put_u32(std::FILE* f, uint32_t x) { std::fwrite(&x, 4, 1, f); }
void put_f64(std::FILE* f, double x) { std::fwrite(&x, 8, 1, f); }

struct Reader {
    std::FILE* f;
    std::string path;
    uint32_t u32() {
        uint32_t x;
        if (std::fread(&x, 4, 1, f) != 1) throw RuntimeError("truncated header in " + path);
        return x;
    }
    double f64() {
        double x;
        if (std::fread(&x, 8, 1, f) != 1) throw RuntimeError("truncated header in " + path);
        return x;
    }
    void magic(const char* m) {
        char buf[4];
        if (std::fread(buf, 1, 4, f) != 4 || std::memcmp(buf, m, 4) != 0)
            throw RuntimeError("bad magic in " + path + " (expected " + m + ")");
    }
    void payload(double* dst, std::size_t n) {
        if (std::fread(dst, 8, n, f) != n) throw RuntimeError("truncated payload in " + path);
    }
};

struct FileCloser {
    std::FILE* f;
    ~FileCloser() { if (f) std::fclose(f); }
};

std::FILE* open_or_throw(const std::string& path, const char* mode) {
    std::FILE* f = std::fopen(path.c_str(), mode);
    if (!f) throw RuntimeError("cannot open " + path);
    return f;
}

std::string sidecar_path(const std::string& path) {
    auto dot = path.find_last_of('.');
    auto slash = path.find_last_of('/');
    std::string base = (dot == std::string::npos || (slash != std::string::npos && dot < slash))
                           ? path : path.substr(0, dot);
    return base + ".json";
}

}  // namespace

void write_field(const std::string& path, const Grid3& g, const ScalarField& f,
                 const std::string& description) {
    if (f.size() != g.nn()) throw RuntimeError("field size does not match grid for " + path);
    std::FILE* fp = open_or_throw(path, "wb");
    FileCloser fc{fp};
    std::fwrite("GLWR", 1, 4, fp);
    put_u32(fp, 1);
    put_u32(fp, uint32_t(g.nx)); put_u32(fp, uint32_t(g.ny)); put_u32(fp, uint32_t(g.nz));
    put_f64(fp, g.ox); put_f64(fp, g.oy); put_f64(fp, g.oz);
    put_f64(fp, g.hx); put_f64(fp, g.hy); put_f64(fp, g.hz);
    const char zeros[8] = {0};
    std::fwrite(zeros, 1, 8, fp);
    if (std::fwrite(f.v.data(), 8, f.v.size(), fp) != f.v.size())
        throw RuntimeError("short write on " + path);

    nlohmann::json meta;
    meta["format"] = "GLWR";
    meta["version"] = 1;
    meta["counts"] = {g.nx, g.ny, g.nz};
    meta["origin"] = {g.ox, g.oy, g.oz};
    meta["spacing"] = {g.hx, g.hy, g.hz};
    meta["omega_box"] = {g.i0, g.i1, g.j0, g.j1, g.k0, g.k1};
    meta["gamma_plane_k"] = g.k1;
    if (!description.empty()) meta["description"] = description;
    std::ofstream side(sidecar_path(path));
    side << meta.dump(2) << "\n";
}

ScalarField read_field(const std::string& path, const Grid3& expect) {
    std::FILE* fp = open_or_throw(path, "rb");
    FileCloser fc{fp};
    Reader r{fp, path};
    r.magic("GLWR");
    if (r.u32() != 1) throw RuntimeError("unsupported field format version in " + path);
    uint32_t nx = r.u32(), ny = r.u32(), nz = r.u32();
    if (int(nx) != expect.nx || int(ny) != expect.ny || int(nz) != expect.nz)
        throw RuntimeError("field header mismatch: " + path + " does not match the grid");
    for (int c = 0; c < 6; ++c) r.f64();
    char reserved[8];
    if (std::fread(reserved, 1, 8, fp) != 8) throw RuntimeError("truncated header in " + path);
    ScalarField f(expect);
    r.payload(f.v.data(), f.v.size());
    for (double x : f.v)
        if (!std::isfinite(x)) throw RuntimeError("non-finite value in field file " + path);
    return f;
}

void write_trace(const std::string& path, const TraceSet& tr) {
    std::FILE* fp = open_or_throw(path, "wb");
    FileCloser fc{fp};
    std::fwrite("GLWT", 1, 4, fp);
    put_u32(fp, 1);
    put_u32(fp, uint32_t(tr.axis));
    put_f64(fp, tr.coord);
    put_u32(fp, uint32_t(tr.nx)); put_u32(fp, uint32_t(tr.ny));
    put_f64(fp, tr.hx); put_f64(fp, tr.hy);
    put_f64(fp, tr.ox); put_f64(fp, tr.oy);
    put_f64(fp, tr.tau);
    put_u32(fp, uint32_t(tr.nsteps));
    // position-major payload: all samples of position (i,j) contiguous
    std::vector<double> buf(tr.nsamp());
    for (int j = 0; j < tr.ny; ++j)
        for (int i = 0; i < tr.nx; ++i) {
            for (int m = 0; m < tr.nsamp(); ++m) buf[m] = tr.at(m, i, j);
            if (std::fwrite(buf.data(), 8, buf.size(), fp) != buf.size())
                throw RuntimeError("short write on " + path);
        }
}

TraceSet read_trace(const std::string& path) {
    std::FILE* fp = open_or_throw(path, "rb");
    FileCloser fc{fp};
    Reader r{fp, path};
    r.magic("GLWT");
    if (r.u32() != 1) throw RuntimeError("unsupported trace format version in " + path);
    TraceSet tr;
    tr.axis = int(r.u32());
    tr.coord = r.f64();
    tr.nx = int(r.u32()); tr.ny = int(r.u32());
    tr.hx = r.f64(); tr.hy = r.f64();
    tr.ox = r.f64(); tr.oy = r.f64();
    tr.tau = r.f64();
    tr.nsteps = int(r.u32());
    if (tr.nx <= 0 || tr.ny <= 0 || tr.tau <= 0 || tr.nsteps < 0)
        throw RuntimeError("invalid trace header in " + path);
    tr.v.assign(std::size_t(tr.nsamp()) * tr.nx * tr.ny, 0.0);
    std::vector<double> buf(tr.nsamp());
    for (int j = 0; j < tr.ny; ++j)
        for (int i = 0; i < tr.nx; ++i) {
            r.payload(buf.data(), buf.size());
            for (int m = 0; m < tr.nsamp(); ++m) tr.at(m, i, j) = buf[m];
        }
    for (double x : tr.v)
        if (!std::isfinite(x)) throw RuntimeError("non-finite value in trace file " + path);
    return tr;
}

void write_ladder_planes(const std::string& path, const LadderPlanes& lp) {
    std::FILE* fp = open_or_throw(path, "wb");
    FileCloser fc{fp};
    std::fwrite("GLWS", 1, 4, fp);
    put_u32(fp, 1);
    put_f64(fp, lp.smax); put_f64(fp, lp.step);
    put_u32(fp, uint32_t(lp.count));
    put_u32(fp, uint32_t(lp.axis));
    put_f64(fp, lp.coord);
    put_u32(fp, uint32_t(lp.nx)); put_u32(fp, uint32_t(lp.ny));
    put_f64(fp, lp.hx); put_f64(fp, lp.hy);
    put_f64(fp, lp.ox); put_f64(fp, lp.oy);
    if (std::fwrite(lp.v.data(), 8, lp.v.size(), fp) != lp.v.size())
        throw RuntimeError("short write on " + path);
}

LadderPlanes read_ladder_planes(const std::string& path) {
    std::FILE* fp = open_or_throw(path, "rb");
    FileCloser fc{fp};
    Reader r{fp, path};
    r.magic("GLWS");
    if (r.u32() != 1) throw RuntimeError("unsupported ladder format version in " + path);
    LadderPlanes lp;
    lp.smax = r.f64(); lp.step = r.f64();
    lp.count = int(r.u32());
    lp.axis = int(r.u32());
    lp.coord = r.f64();
    lp.nx = int(r.u32()); lp.ny = int(r.u32());
    lp.hx = r.f64(); lp.hy = r.f64();
    lp.ox = r.f64(); lp.oy = r.f64();
    if (lp.count <= 0 || lp.nx <= 0 || lp.ny <= 0 || lp.step <= 0)
        throw RuntimeError("invalid ladder header in " + path);
    lp.v.assign(std::size_t(lp.count) * lp.nx * lp.ny, 0.0);
    r.payload(lp.v.data(), lp.v.size());
    for (double x : lp.v)
        if (!std::isfinite(x)) throw RuntimeError("non-finite value in ladder file " + path);
    return lp;
}

}  // namespace glow
