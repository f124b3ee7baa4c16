#include <cmath>

#include "doctest.h"
#include "glow/config.hpp"
#include "glow/phantom.hpp"

using namespace glow;

namespace {
Shape block(double eps, double hw, double z0, double z1) {
    Shape s;
    s.kind = Shape::Kind::Box;
    s.cx = s.cy = 0.0;
    s.cz = 0.5 * (z0 + z1);
    s.ax = s.ay = hw;
    s.az = 0.5 * (z1 - z0);
    s.eps = eps;
    return s;
}
}  // namespace

TEST_CASE("block rasterization: inside, outside, clipped to the observable region") {
    const Grid3 g = make_grid(preset_grid("mini"));
    PhantomSpec spec;
    spec.shapes.push_back(block(4.45, 0.06, -0.06, 0.0));
    const ScalarField eps = rasterize(spec, g);

    CHECK(eps.at(13, 13, 6) == doctest::Approx(4.45));  // center of the block
    // footprint edges: x in [-0.06, 0.06] -> i in [10, 16] inclusive
    CHECK(eps.at(10, 13, 6) == doctest::Approx(4.45));
    CHECK(eps.at(16, 13, 6) == doctest::Approx(4.45));
    CHECK(eps.at(9, 13, 6) == doctest::Approx(1.0));
    CHECK(eps.at(17, 13, 6) == doctest::Approx(1.0));
    // z span [-0.06, 0] -> k in [5, 8]
    CHECK(eps.at(13, 13, 5) == doctest::Approx(4.45));
    CHECK(eps.at(13, 13, 8) == doctest::Approx(4.45));
    CHECK(eps.at(13, 13, 4) == doctest::Approx(1.0));
    CHECK(eps.at(13, 13, 9) == doctest::Approx(1.0));
    // outside Omega everything is background, whatever the shape says
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j) {
            REQUIRE(eps.at(0, j, k) == 1.0);
            REQUIRE(eps.at(2, j, k) == 1.0);
        }
}

TEST_CASE("oversized shape is clipped, max_eps still reports the shape value") {
    const Grid3 g = make_grid(preset_grid("mini"));
    PhantomSpec spec;
    spec.shapes.push_back(block(15.0, 0.25, -0.06, 0.0));  // wider than Omega
    const ScalarField eps = rasterize(spec, g);
    CHECK(eps.at(g.i0, 13, 6) == doctest::Approx(15.0));
    CHECK(eps.at(g.i0 - 1, 13, 6) == doctest::Approx(1.0));
    CHECK(spec.max_eps() == doctest::Approx(15.0));
    PhantomSpec empty;
    CHECK(empty.max_eps() == doctest::Approx(1.0));
}

TEST_CASE("sphere and cylinder membership") {
    Shape s;
    s.kind = Shape::Kind::Sphere;
    s.cx = s.cy = 0.0;
    s.cz = -0.05;
    s.ax = s.ay = s.az = 0.03;
    s.eps = 3.0;
    CHECK(s.contains(0.0, 0.0, -0.05));
    CHECK(s.contains(0.029, 0.0, -0.05));
    CHECK(!s.contains(0.031, 0.0, -0.05));
    CHECK(!s.contains(0.025, 0.025, -0.05));

    Shape c;
    c.kind = Shape::Kind::Cylinder;
    c.cx = c.cy = 0.0;
    c.cz = -0.05;
    c.ax = c.ay = 0.03;  // radius
    c.az = 0.02;         // half height
    c.eps = 3.0;
    CHECK(c.contains(0.029, 0.0, -0.05));
    CHECK(c.contains(0.02, 0.02, -0.04));
    CHECK(!c.contains(0.025, 0.025, -0.05));  // outside the radius
    CHECK(!c.contains(0.0, 0.0, -0.075));     // outside the height
}

TEST_CASE("overlapping shapes resolve to the larger permittivity") {
    const Grid3 g = make_grid(preset_grid("mini"));
    PhantomSpec spec;
    spec.shapes.push_back(block(2.0, 0.08, -0.08, 0.0));
    spec.shapes.push_back(block(5.0, 0.04, -0.06, -0.02));
    const ScalarField eps = rasterize(spec, g);
    CHECK(eps.at(13, 13, 6) == doctest::Approx(5.0));  // in both
    CHECK(eps.at(9, 13, 6) == doctest::Approx(2.0));   // outer only (x face)
    CHECK(eps.at(13, 13, 4) == doctest::Approx(2.0));  // outer only (below inner)
    CHECK(eps.at(13, 13, 9) == doctest::Approx(1.0));  // above both
}

TEST_CASE("nested phantom validates containment") {
    const Shape outer = block(2.0, 0.08, -0.08, 0.0);
    const Shape inner = block(5.0, 0.03, -0.06, -0.02);
    const PhantomSpec ok = heterogeneous_phantom(outer, inner);
    CHECK(ok.shapes.size() == 2);
    const Shape escape = block(5.0, 0.12, -0.06, -0.02);
    CHECK_THROWS_AS(heterogeneous_phantom(outer, escape), ConfigError);
}

TEST_CASE("phantom JSON round trip") {
    PhantomSpec spec;
    spec.shapes.push_back(block(4.45, 0.06, -0.06, 0.0));
    Shape sp;
    sp.kind = Shape::Kind::Sphere;
    sp.cx = 0.01;
    sp.cy = -0.02;
    sp.cz = -0.05;
    sp.ax = sp.ay = sp.az = 0.025;
    sp.eps = 3.5;
    spec.shapes.push_back(sp);
    const PhantomSpec back = phantom_from_json(phantom_to_json(spec));
    REQUIRE(back.shapes.size() == spec.shapes.size());
    for (std::size_t i = 0; i < spec.shapes.size(); ++i) {
        CHECK(back.shapes[i].kind == spec.shapes[i].kind);
        CHECK(back.shapes[i].cx == doctest::Approx(spec.shapes[i].cx).epsilon(1e-15));
        CHECK(back.shapes[i].az == doctest::Approx(spec.shapes[i].az).epsilon(1e-15));
        CHECK(back.shapes[i].eps == doctest::Approx(spec.shapes[i].eps).epsilon(1e-15));
    }
    CHECK_THROWS_AS(phantom_from_json("{not json"), ConfigError);
    CHECK_THROWS_AS(phantom_from_json(R"({"shapes":[{"type":"torus"}]})"), ConfigError);
}
