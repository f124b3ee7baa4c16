#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace glow {

// Thrown for invalid configuration / violated preconditions (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown for failures at run time: solver breakdown, instability, bad files (CLI exit code 1).
struct RuntimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Region : uint8_t { OMEGA = 0, BUFFER = 1 };

// Geometry request: extents of the outer prism G, the inner sub-prism Omega,
// and per-axis spacing. z_gamma is the top z-face of Omega.
struct GridSpec {
    double gx0 = 0, gx1 = 0, gy0 = 0, gy1 = 0, gz0 = 0, gz1 = 0;
    double ox0 = 0, ox1 = 0, oy0 = 0, oy1 = 0, oz0 = 0, oz1 = 0;
    double hx = 0, hy = 0, hz = 0;
};

// Uniform rectilinear grid over G with an embedded node box for Omega.
// Node (i,j,k) sits at (ox + i*hx, oy + j*hy, oz + k*hz); x is the fastest
// index in every linearized array.
struct Grid3 {
    int nx = 0, ny = 0, nz = 0;
    double ox = 0, oy = 0, oz = 0;
    double hx = 0, hy = 0, hz = 0;
    int i0 = 0, i1 = 0, j0 = 0, j1 = 0, k0 = 0, k1 = 0;  // Omega node box, inclusive

    std::size_t nn() const { return std::size_t(nx) * ny * nz; }
    std::size_t idx(int i, int j, int k) const {
        return std::size_t(i) + std::size_t(nx) * (std::size_t(j) + std::size_t(ny) * k);
    }
    double x(int i) const { return ox + hx * i; }
    double y(int j) const { return oy + hy * j; }
    double z(int k) const { return oz + hz * k; }
    // z of the illuminated front face (largest z).
    double zf() const { return oz + hz * (nz - 1); }

    bool in_omega(int i, int j, int k) const {
        return i >= i0 && i <= i1 && j >= j0 && j <= j1 && k >= k0 && k <= k1;
    }
    bool on_omega_boundary(int i, int j, int k) const {
        return in_omega(i, j, k) &&
               (i == i0 || i == i1 || j == j0 || j == j1 || k == k0 || k == k1);
    }
    bool on_gamma(int i, int j, int k) const { return k == k1 && in_omega(i, j, k); }
    Region region(int i, int j, int k) const {
        return in_omega(i, j, k) ? Region::OMEGA : Region::BUFFER;
    }
    std::size_t omega_count() const {
        return std::size_t(i1 - i0 + 1) * (j1 - j0 + 1) * (k1 - k0 + 1);
    }
};

// Validates extents/divisibility and produces the node-indexed geometry.
Grid3 make_grid(const GridSpec& spec);

// One real value per grid node, x-fastest layout.
struct ScalarField {
    int nx = 0, ny = 0, nz = 0;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid3& g, double fill = 0.0)
        : nx(g.nx), ny(g.ny), nz(g.nz), v(g.nn(), fill) {}
    ScalarField(int nx_, int ny_, int nz_, double fill = 0.0)
        : nx(nx_), ny(ny_), nz(nz_), v(std::size_t(nx_) * ny_ * nz_, fill) {}

    std::size_t idx(int i, int j, int k) const {
        return std::size_t(i) + std::size_t(nx) * (std::size_t(j) + std::size_t(ny) * k);
    }
    double& at(int i, int j, int k) { return v[idx(i, j, k)]; }
    double at(int i, int j, int k) const { return v[idx(i, j, k)]; }
    std::size_t size() const { return v.size(); }
    bool same_shape(const ScalarField& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz;
    }
};

// Time-resolved records u(x_i, y_j, t_m) on a constant-z plane.
// In memory the layout is time-major (one full plane per step, starting at t=0);
// the on-disk payload is position-major.
struct TraceSet {
    int axis = 2;           // plane normal (0=x,1=y,2=z); the solver records z-planes
    double coord = 0;       // plane coordinate
    int nx = 0, ny = 0;     // lattice counts
    double hx = 0, hy = 0;  // lattice spacing
    double ox = 0, oy = 0;  // lattice origin
    double tau = 0;         // time step
    int nsteps = 0;         // number of steps; samples per position = nsteps + 1
    std::vector<double> v;  // (nsteps+1) * nx * ny, time-major, x-fastest per plane

    int nsamp() const { return nsteps + 1; }
    std::size_t idx(int m, int i, int j) const {
        return (std::size_t(m) * ny + j) * nx + i;
    }
    double& at(int m, int i, int j) { return v[idx(m, i, j)]; }
    double at(int m, int i, int j) const { return v[idx(m, i, j)]; }
    double t(int m) const { return tau * m; }
};

// Pseudo-frequency plane data: one (nx x ny) plane per ladder value s_n.
struct LadderPlanes {
    double smax = 0, step = 0;  // s_n = smax - n*step
    int count = 0;              // number of planes (N+1)
    int axis = 2;
    double coord = 0;
    int nx = 0, ny = 0;
    double hx = 0, hy = 0;
    double ox = 0, oy = 0;
    std::vector<double> v;  // count * nx * ny, plane-major, x-fastest

    double s(int n) const { return smax - step * n; }
    std::size_t idx(int n, int i, int j) const {
        return (std::size_t(n) * ny + j) * nx + i;
    }
    double& at(int n, int i, int j) { return v[idx(n, i, j)]; }
    double at(int n, int i, int j) const { return v[idx(n, i, j)]; }
    const double* plane(int n) const { return v.data() + std::size_t(n) * nx * ny; }
    double* plane(int n) { return v.data() + std::size_t(n) * nx * ny; }
};

// Binary persistence. All headers are little-endian; payloads are f64 LE.
// Field files ("GLWR") carry grid shape/origin/spacing and the x-fastest payload
// plus a JSON sidecar with the same basename. Trace files ("GLWT") and ladder
// plane files ("GLWS") carry their lattice description.
void write_field(const std::string& path, const Grid3& g, const ScalarField& f,
                 const std::string& description = "");
ScalarField read_field(const std::string& path, const Grid3& expect);

void write_trace(const std::string& path, const TraceSet& tr);
TraceSet read_trace(const std::string& path);

void write_ladder_planes(const std::string& path, const LadderPlanes& lp);
LadderPlanes read_ladder_planes(const std::string& path);

}  // namespace glow
