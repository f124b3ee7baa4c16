#include <cmath>
#include <random>

#include "doctest.h"
#include "glow/fem.hpp"
#include "glow/forward.hpp"

using namespace glow;

namespace {

Grid3 cube_grid(double h) {
    GridSpec s;
    s.gx0 = s.gy0 = s.gz0 = 0.0;
    s.gx1 = s.gy1 = s.gz1 = 0.4;
    s.ox0 = s.oy0 = s.oz0 = 0.08;
    s.ox1 = s.oy1 = s.oz1 = 0.32;
    s.hx = s.hy = s.hz = h;
    return make_grid(s);
}

Grid3 tiny_grid() {
    GridSpec s;
    s.gx0 = s.gy0 = -0.2;
    s.gx1 = s.gy1 = 0.2;
    s.gz0 = -0.2;
    s.gz1 = 0.16;
    s.ox0 = s.oy0 = -0.08;
    s.ox1 = s.oy1 = 0.08;
    s.oz0 = -0.08;
    s.oz1 = 0.04;
    s.hx = s.hy = s.hz = 0.04;
    return make_grid(s);
}

ScalarField fill(const Grid3& g, double (*f)(double, double, double)) {
    ScalarField out(g);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) out.at(i, j, k) = f(g.x(i), g.y(j), g.z(k));
    return out;
}

double linear_fn(double x, double y, double z) { return 1.0 + 2.0 * x - 3.0 * y + 0.5 * z; }
double harmonic_fn(double x, double y, double z) {
    return std::exp(x) * std::cos(y) + std::exp(z) * std::sin(x);
}

// manufactured convection-diffusion solution and its data for constant drift
constexpr double kA1 = 198.33171787566815;
constexpr double kCx = 0.3, kCy = -0.2, kCz = 0.1;
double q_true(double x, double y, double z) {
    return 0.012 * std::sin(3.0 * x) * std::cos(2.0 * y) + 0.11 * z + 0.02 * z * z;
}
double q_rhs(double x, double y, double z) {
    const double lap = -13.0 * 0.012 * std::sin(3.0 * x) * std::cos(2.0 * y) + 0.04;
    const double gx = 0.036 * std::cos(3.0 * x) * std::cos(2.0 * y);
    const double gy = -0.024 * std::sin(3.0 * x) * std::sin(2.0 * y);
    const double gz = 0.11 + 0.04 * z;
    return lap + kA1 * (kCx * gx + kCy * gy + kCz * gz);
}

double interior_max_err(const Grid3& g, const FemBox& b, const ScalarField& got,
                        const ScalarField& want) {
    double err = 0.0;
    for (int k = b.k0 + 1; k < b.k1; ++k)
        for (int j = b.j0 + 1; j < b.j1; ++j)
            for (int i = b.i0 + 1; i < b.i1; ++i)
                err = std::max(err, std::abs(got.at(i, j, k) - want.at(i, j, k)));
    (void)g;
    return err;
}

double dirichlet_err(double h) {
    const Grid3 g = cube_grid(h);
    const FemSystem fem(g);
    const ScalarField exact = fill(g, harmonic_fn);
    const ScalarField got = fem.solve_dirichlet_laplace(exact);
    return interior_max_err(g, fem.box(), got, exact);
}

double convection_err(double h) {
    const Grid3 g = cube_grid(h);
    const FemSystem fem(g);
    const ScalarField exact = fill(g, q_true);
    const ScalarField rhs = fill(g, q_rhs);
    const ScalarField cx(g, kCx), cy(g, kCy), cz(g, kCz);
    const ScalarField got = fem.solve_q_equation(cx, cy, cz, kA1, 0.0, exact, &rhs);
    return interior_max_err(g, fem.box(), got, exact);
}

}  // namespace

TEST_CASE("assembly prerequisites are enforced") {
    GridSpec s;
    s.gx0 = s.gy0 = s.gz0 = 0.0;
    s.gx1 = s.gy1 = 0.4;
    s.gz1 = 0.2;
    s.ox0 = s.oy0 = s.oz0 = 0.08;
    s.ox1 = s.oy1 = 0.32;
    s.oz1 = 0.12;
    s.hx = s.hy = 0.04;
    s.hz = 0.02;  // non-cubic cells
    const Grid3 g = make_grid(s);
    CHECK_THROWS_AS(FemSystem{g}, ConfigError);

    const Grid3 c = cube_grid(0.04);
    CHECK_THROWS_AS(FemSystem(c, FemBox{2, 3, 2, 8, 2, 8}), ConfigError);  // two nodes in x
    CHECK_THROWS_AS(FemSystem(c, FemBox{-1, 8, 2, 8, 2, 8}), ConfigError);
    CHECK_THROWS_AS(FemSystem(c, FemBox{2, 8, 2, 8, 2, 11}), ConfigError);  // beyond nz-1
    CHECK_NOTHROW(enlarged_box(c, 1));
    CHECK_THROWS_AS(enlarged_box(c, 3), ConfigError);  // Omega sits 2 cells from the hull
}

TEST_CASE("harmonic extension reproduces linear fields") {
    const Grid3 g = cube_grid(0.04);
    const FemSystem fem(g);
    const ScalarField exact = fill(g, linear_fn);
    const ScalarField got = fem.solve_dirichlet_laplace(exact);
    CHECK(interior_max_err(g, fem.box(), got, exact) < 1e-8);
    // nodes outside the box pass through untouched
    CHECK(got.at(0, 0, 0) == exact.at(0, 0, 0));
    ScalarField bad = exact;
    bad.at(g.i0, g.j0, g.k0) = std::nan("");
    CHECK_THROWS_AS(fem.solve_dirichlet_laplace(bad), ConfigError);
}

TEST_CASE("harmonic extension obeys the boundary-value bounds") {
    const Grid3 g = cube_grid(0.04);
    const FemSystem fem(g);
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ScalarField bval(g);
    for (double& x : bval.v) x = uni(rng);
    const FemBox& b = fem.box();
    double lo = 1e300, hi = -1e300;
    for (int k = b.k0; k <= b.k1; ++k)
        for (int j = b.j0; j <= b.j1; ++j)
            for (int i = b.i0; i <= b.i1; ++i) {
                if (i != b.i0 && i != b.i1 && j != b.j0 && j != b.j1 && k != b.k0 && k != b.k1)
                    continue;
                lo = std::min(lo, bval.at(i, j, k));
                hi = std::max(hi, bval.at(i, j, k));
            }
    const ScalarField got = fem.solve_dirichlet_laplace(bval);
    for (int k = b.k0 + 1; k < b.k1; ++k)
        for (int j = b.j0 + 1; j < b.j1; ++j)
            for (int i = b.i0 + 1; i < b.i1; ++i) {
                REQUIRE(got.at(i, j, k) > lo - 1e-9);
                REQUIRE(got.at(i, j, k) < hi + 1e-9);
            }

    // single-spike data: extension stays inside [0, 1]
    ScalarField spike(g, 0.0);
    spike.at(b.i0 + 2, b.j0 + 2, b.k1) = 1.0;
    const ScalarField gs = fem.solve_dirichlet_laplace(spike);
    for (int k = b.k0 + 1; k < b.k1; ++k)
        for (int j = b.j0 + 1; j < b.j1; ++j)
            for (int i = b.i0 + 1; i < b.i1; ++i) {
                REQUIRE(gs.at(i, j, k) > -1e-9);
                REQUIRE(gs.at(i, j, k) < 1.0 + 1e-9);
            }
}

TEST_CASE("harmonic solve converges at second order") {
    const double e1 = dirichlet_err(0.04);
    const double e2 = dirichlet_err(0.02);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 < 1e-4);
    CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("convection-diffusion solve converges at second order") {
    const double e1 = convection_err(0.04);
    const double e2 = convection_err(0.02);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 < 1e-3);
    CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("permittivity recovery is exact-ish on homogeneous plane-wave data") {
    const Grid3 g = tiny_grid();
    const FemSystem fem(g, enlarged_box(g, 1));
    const SourcePulse pulse;
    const double s = 10.0;
    ScalarField w(g);
    for (int k = 0; k < g.nz; ++k) {
        const double wz = analytic_plane_wave_w(g.z(k), s, pulse, g.zf());
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) w.at(i, j, k) = wz;
    }
    const ScalarField eps = fem.recover_epsilon(w, s);
    for (int k = g.k0; k <= g.k1; ++k)
        for (int j = g.j0; j <= g.j1; ++j)
            for (int i = g.i0; i <= g.i1; ++i) {
                REQUIRE(eps.at(i, j, k) >= 1.0);
                REQUIRE(eps.at(i, j, k) < 1.05);
            }
    CHECK(eps.at(0, 0, 0) == 1.0);  // outside the box

    // the recovery only sees logarithmic differences, so scale cancels
    ScalarField w2 = w;
    for (double& x : w2.v) x *= 2.7;
    const ScalarField eps2 = fem.recover_epsilon(w2, s);
    for (std::size_t p = 0; p < eps.v.size(); ++p)
        REQUIRE(eps2.v[p] == doctest::Approx(eps.v[p]).epsilon(1e-10));
}

TEST_CASE("permittivity recovery rejects bad inputs") {
    const Grid3 g = tiny_grid();
    const FemSystem fem(g, enlarged_box(g, 1));
    ScalarField w(g, 1.0);
    CHECK_THROWS_AS(fem.recover_epsilon(w, -1.0), ConfigError);
    w.at(2, 2, 2) = 0.0;
    CHECK_THROWS_AS(fem.recover_epsilon(w, 10.0), RuntimeError);
    w.at(2, 2, 2) = -0.5;
    CHECK_THROWS_AS(fem.recover_epsilon(w, 10.0), RuntimeError);

    // a box flush against the hull leaves no room for the one-sided stencils
    const FemSystem flush(g, FemBox{1, g.nx - 2, 1, g.ny - 2, 1, g.nz - 2});
    ScalarField ones(g, 1.0);
    CHECK_THROWS_AS(flush.recover_epsilon(ones, 10.0), ConfigError);
}
