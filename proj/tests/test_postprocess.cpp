#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "glow/phantom.hpp"
#include "glow/postprocess.hpp"

using namespace glow;

namespace {

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

std::vector<double> ladder_svals(const Ladder& lad) {
    std::vector<double> s(lad.count);
    for (int n = 0; n < lad.count; ++n) s[n] = lad.s(n);
    return s;
}

LadderPlanes planes_at_gamma(const Grid3& g, const Ladder& lad,
                             const std::vector<ScalarField>& W) {
    LadderPlanes lp;
    lp.smax = lad.smax;
    lp.step = lad.step;
    lp.count = lad.count;
    lp.nx = g.nx;
    lp.ny = g.ny;
    lp.hx = g.hx;
    lp.hy = g.hy;
    lp.ox = g.ox;
    lp.oy = g.oy;
    lp.coord = g.z(g.k1);
    lp.v.resize(std::size_t(lp.count) * g.nx * g.ny);
    for (int n = 0; n < lad.count; ++n)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) lp.at(n, i, j) = W[n].at(i, j, g.k1);
    return lp;
}

}  // namespace

TEST_CASE("threshold pass: homogeneous input is reported empty") {
    const Grid3 g = tiny_grid();
    const ScalarField ones(g, 1.0);
    const ThresholdResult r = threshold_and_box(g, ones);
    CHECK(r.empty);
    CHECK(r.field.v == ones.v);
    ScalarField wrong(g.nx - 1, g.ny, g.nz, 1.0);
    CHECK_THROWS_AS(threshold_and_box(g, wrong), ConfigError);
}

TEST_CASE("threshold pass keeps the dominant blob and erases weak clutter") {
    const Grid3 g = tiny_grid();
    ScalarField eps(g, 1.0);
    eps.at(g.i0 + 2, g.j0 + 2, g.k0 + 1) = 4.0;
    eps.at(g.i0 + 3, g.j0 + 2, g.k0 + 1) = 4.0;
    eps.at(g.i1 - 1, g.j1 - 1, g.k1 - 1) = 1.5;  // below half the maximum
    const ThresholdResult r = threshold_and_box(g, eps);
    CHECK(!r.empty);
    CHECK(r.field.at(g.i0 + 2, g.j0 + 2, g.k0 + 1) == doctest::Approx(4.0));
    CHECK(r.field.at(g.i0 + 3, g.j0 + 2, g.k0 + 1) == doctest::Approx(4.0));
    CHECK(r.field.at(g.i1 - 1, g.j1 - 1, g.k1 - 1) == doctest::Approx(1.0));
    long above = 0;
    for (double x : r.field.v)
        if (x > 1.0) ++above;
    CHECK(above == 2);

    // applying the pass to its own output changes nothing
    const ThresholdResult r2 = threshold_and_box(g, r.field);
    CHECK(!r2.empty);
    CHECK(r2.field.v == r.field.v);
}

TEST_CASE("threshold pass with a weak maximum still anchors the cut at 1") {
    const Grid3 g = tiny_grid();
    ScalarField eps(g, 1.0);
    eps.at(g.i0 + 1, g.j0 + 1, g.k0 + 1) = 1.8;  // cut = 0.9 < background
    const ThresholdResult r = threshold_and_box(g, eps);
    CHECK(!r.empty);
    CHECK(r.field.at(g.i0 + 1, g.j0 + 1, g.k0 + 1) == doctest::Approx(1.8));
    long above = 0;
    for (double x : r.field.v)
        if (x > 1.0) ++above;
    CHECK(above == 1);
}

TEST_CASE("shape refinement on a dielectric block localizes the target") {
    const Grid3 g = tiny_grid();
    DriverConfig cfg;
    cfg.ladder = make_ladder(8.0, 10.0, 0.05);
    cfg.plan.tau = 0.003;
    cfg.plan.T = 1.0;
    const std::vector<double> svals = ladder_svals(cfg.ladder);

    PhantomSpec spec;
    Shape b;
    b.kind = Shape::Kind::Box;
    b.cz = -0.02;
    b.ax = b.ay = 0.04;
    b.az = 0.02;
    b.eps = 4.0;
    spec.shapes.push_back(b);
    const ScalarField eps_true = rasterize(spec, g);
    const ScalarField ones(g, 1.0);
    const ForwardResult fw0 = solve_forward(g, ones, cfg.pulse, cfg.plan, svals);
    const ForwardResult fwd = solve_forward(g, eps_true, cfg.pulse, cfg.plan, svals);
    const LadderPlanes Wdata = planes_at_gamma(g, cfg.ladder, fwd.W);

    const InversionResult res = run_ladder(g, Wdata, fw0.W, cfg);
    const SelectionResult sel = classify_and_select(g, res.D0, res.Dm, res.snaps);
    const StageTwoResult st = stage_two(g, Wdata, fw0.W, cfg, res.mns, sel);

    REQUIRE(!st.empty);
    CHECK(st.support_count >= 1);
    // the block straddles the lattice center (node 5,5)
    CHECK(std::abs(st.centroid_i - 5.0) <= 1.0);
    CHECK(std::abs(st.centroid_j - 5.0) <= 1.0);
    CHECK(st.ix0 >= g.i0);
    CHECK(st.ix1 <= g.i1);
    CHECK(st.jy0 >= g.j0);
    CHECK(st.jy1 <= g.j1);
    CHECK(st.kz0 >= g.k0);
    CHECK(st.kz1 <= g.k1);
    CHECK(st.max_eps > 1.0);
    for (double x : st.image.v) REQUIRE((x == 1.0 || x >= 0.9 * st.max_eps));

    // bad stage-one summaries are rejected up front
    std::vector<int> short_mns(cfg.ladder.intervals() - 1, 1);
    CHECK_THROWS_AS(stage_two(g, Wdata, fw0.W, cfg, short_mns, sel), ConfigError);
    SelectionResult bogus = sel;
    bogus.retried = false;
    bogus.pick = 0;
    CHECK_THROWS_AS(stage_two(g, Wdata, fw0.W, cfg, res.mns, bogus), ConfigError);
}

TEST_CASE("shape refinement with nothing selected reports an empty image") {
    const Grid3 g = tiny_grid();
    DriverConfig cfg;
    cfg.ladder = make_ladder(8.0, 10.0, 0.05);
    cfg.plan.tau = 0.003;
    cfg.plan.T = 1.0;
    const std::vector<double> svals = ladder_svals(cfg.ladder);
    const ScalarField ones(g, 1.0);
    const ForwardResult fw0 = solve_forward(g, ones, cfg.pulse, cfg.plan, svals);
    const LadderPlanes Wdata = planes_at_gamma(g, cfg.ladder, fw0.W);

    SelectionResult sel;
    sel.pick = 1;  // first interval: no preceding intervals to replay
    sel.retried = false;
    const std::vector<int> mns(cfg.ladder.intervals(), 1);
    const StageTwoResult st = stage_two(g, Wdata, fw0.W, cfg, mns, sel);
    CHECK(st.empty);
    CHECK(st.support_count == 0);
    CHECK(st.max_eps == doctest::Approx(1.0));
    CHECK(st.ix0 == -1);
    for (double x : st.image.v) REQUIRE(x == 1.0);
}

TEST_CASE("volume export writes a well-formed legacy dataset") {
    namespace fs = std::filesystem;
    const Grid3 g = tiny_grid();
    ScalarField f(g, 1.0);
    f.at(2, 3, 4) = 7.25;
    const fs::path dir = fs::temp_directory_path() / "glow_test_postprocess";
    fs::create_directories(dir);
    const std::string path = (dir / "image.vtk").string();
    write_vtk(path, g, f, "epsilon");

    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 10 + g.nn());
    CHECK(lines[0] == "# vtk DataFile Version 3.0");
    CHECK(lines[1] == "epsilon");
    CHECK(lines[2] == "ASCII");
    CHECK(lines[3] == "DATASET STRUCTURED_POINTS");
    CHECK(lines[4] == "DIMENSIONS 11 11 10");
    CHECK(lines[5] == "ORIGIN -0.2 -0.2 -0.2");
    CHECK(lines[6] == "SPACING 0.04 0.04 0.04");
    CHECK(lines[7] == "POINT_DATA 1210");
    CHECK(lines[8] == "SCALARS epsilon double 1");
    CHECK(lines[9] == "LOOKUP_TABLE default");
    CHECK(lines[10 + f.idx(2, 3, 4)] == "7.25");
    CHECK(lines[10] == "1");

    ScalarField wrong(g.nx - 1, g.ny, g.nz, 1.0);
    CHECK_THROWS_AS(write_vtk(path, g, wrong, "epsilon"), ConfigError);
    CHECK_THROWS_AS(write_vtk("/nonexistent_dir_glow/image.vtk", g, f, "epsilon"),
                    RuntimeError);
    fs::remove_all(dir);
}
