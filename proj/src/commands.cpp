#include "glow/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "glow/postprocess.hpp"
#include "json.hpp"

namespace glow {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string joinp(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::string need(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("missing input file " + path);
    return path;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw RuntimeError("cannot open " + path + " for writing");
    os << text;
    if (!os) throw RuntimeError("failed writing " + path);
}

json read_json_file(const std::string& path) {
    std::ifstream is(need(path));
    try {
        return json::parse(is);
    } catch (const std::exception& e) {
        throw RuntimeError(path + ": " + e.what());
    }
}

std::vector<double> ladder_svals(const Ladder& lad) {
    std::vector<double> s(lad.count);
    for (int n = 0; n < lad.count; ++n) s[n] = lad.s(n);
    return s;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    const auto dt = std::chrono::steady_clock::now() - t0;
    return std::chrono::duration<double>(dt).count();
}

// Transform stack on the data-plane lattice (top z-face of Omega, full lattice).
LadderPlanes gamma_stack(const Grid3& g, const std::vector<ScalarField>& W, const Ladder& lad) {
    LadderPlanes lp;
    lp.smax = lad.smax;
    lp.step = lad.step;
    lp.count = lad.count;
    lp.axis = 2;
    lp.coord = g.z(g.k1);
    lp.nx = g.nx;
    lp.ny = g.ny;
    lp.hx = g.hx;
    lp.hy = g.hy;
    lp.ox = g.ox;
    lp.oy = g.oy;
    lp.v.resize(std::size_t(lp.count) * g.nx * g.ny);
    for (int n = 0; n < lp.count; ++n)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) lp.at(n, i, j) = W[std::size_t(n)].at(i, j, g.k1);
    return lp;
}

void check_ladder_match(const LadderPlanes& lp, const Ladder& lad, const std::string& what) {
    if (lp.count != lad.count || std::abs(lp.smax - lad.smax) > 1e-9 ||
        std::abs(lp.step - lad.step) > 1e-9)
        throw ConfigError(what + ": pseudo-frequency ladder does not match the configuration");
}

// Accepts the grid lattice exactly, or a 2:1 refinement of it (every other
// sample is taken); anything else is rejected.
LadderPlanes conform_planes(const LadderPlanes& d, const Grid3& g, const std::string& what) {
    const double tol = 1e-9;
    const bool same_origin = std::abs(d.ox - g.ox) <= tol && std::abs(d.oy - g.oy) <= tol;
    if (d.nx == g.nx && d.ny == g.ny && std::abs(d.hx - g.hx) <= tol &&
        std::abs(d.hy - g.hy) <= tol && same_origin)
        return d;
    const bool twice = (d.nx - 1) == 2 * (g.nx - 1) && (d.ny - 1) == 2 * (g.ny - 1) &&
                       std::abs(2.0 * d.hx - g.hx) <= tol && std::abs(2.0 * d.hy - g.hy) <= tol &&
                       same_origin;
    if (!twice)
        throw ConfigError(what + ": data lattice matches neither the grid nor a 2:1 refinement");
    LadderPlanes out;
    out.smax = d.smax;
    out.step = d.step;
    out.count = d.count;
    out.axis = d.axis;
    out.coord = d.coord;
    out.nx = g.nx;
    out.ny = g.ny;
    out.hx = g.hx;
    out.hy = g.hy;
    out.ox = g.ox;
    out.oy = g.oy;
    out.v.resize(std::size_t(d.count) * g.nx * g.ny);
    for (int n = 0; n < d.count; ++n)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) out.at(n, i, j) = d.at(n, 2 * i, 2 * j);
    return out;
}

void check_data_plane(const LadderPlanes& d, const Grid3& g, const std::string& what) {
    if (std::abs(d.coord - g.z(g.k1)) > 1e-9)
        throw ConfigError(what + ": data plane is not the top face of the observable region");
}

double max_abs(const TraceSet& tr) {
    double m = 0.0;
    for (double x : tr.v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
    const Grid3 g = cfg.make_grid3();
    const int krec = cfg.record_index(g);
    const ScalarField eps = rasterize(cfg.phantom, g);
    const std::vector<double> svals = ladder_svals(cfg.ladder);
    fs::create_directories(cfg.output_dir);

    {
        ForwardResult tot = solve_forward(g, eps, cfg.pulse, cfg.plan, svals, krec);
        write_trace(joinp(cfg.output_dir, "trace_total.glwt"), tot.trace);
        write_ladder_planes(joinp(cfg.output_dir, "gamma_data.glws"),
                            gamma_stack(g, tot.W, cfg.ladder));
    }
    {
        ForwardResult ref =
            solve_forward(g, ScalarField(g, 1.0), cfg.pulse, cfg.plan, svals, krec);
        write_trace(joinp(cfg.output_dir, "trace_reference.glwt"), ref.trace);
        write_ladder_planes(joinp(cfg.output_dir, "reference.glws"),
                            gamma_stack(g, ref.W, cfg.ladder));
    }
    write_text(joinp(cfg.output_dir, "config.json"), config_to_json(cfg));
    write_text(joinp(cfg.output_dir, "phantom.json"), phantom_to_json(cfg.phantom));
}

void cmd_preprocess(const RunConfig& cfg) {
    const Grid3 g = cfg.make_grid3();
    const int krec = cfg.record_index(g);
    const PreprocessParams& p = cfg.prep;
    const std::string& dir = cfg.output_dir;

    const TraceSet total = read_trace(need(joinp(dir, "trace_total.glwt")));
    const TraceSet reference = read_trace(need(joinp(dir, "trace_reference.glwt")));
    const double t_arr = g.zf() - cfg.record_z;

    const TraceSet measured =
        cfg.have_corruption ? corrupt(total, p.corruption, cfg.pulse, t_arr, cfg.seed) : total;

    double lag = 0.0;
    const TraceSet corrected =
        time_zero_correct(measured, reference, p.match_window, p.max_lag, p.min_corr, &lag);
    const TraceSet scattered =
        extract_scattered(corrected, reference, p.gate_start, p.gate_start + p.gate_len,
                          p.match_window, p.temporal_sigma, p.spatial_sigma);
    const TraceSet propagated = propagate_data(scattered, p.propagate_dist);
    if (std::abs(propagated.coord - g.z(g.k1)) > 1e-9)
        throw ConfigError(
            "propagated plane does not land on the top face of the observable region");

    TraceSet calib_measured, calib_sim;
    if (!p.calib_measured.empty() || !p.calib_sim.empty()) {
        if (p.calib_measured.empty() || p.calib_sim.empty())
            throw ConfigError("calibration needs both calib_measured and calib_sim");
        calib_measured = read_trace(need(p.calib_measured));
        calib_sim = read_trace(need(p.calib_sim));
    } else {
        const ScalarField ce = rasterize(p.calib_phantom, g);
        ForwardResult fc = solve_forward(g, ce, cfg.pulse, cfg.plan, {cfg.ladder.smax}, krec);
        calib_sim = fc.trace;
        calib_measured = cfg.have_corruption
                             ? corrupt(fc.trace, p.corruption, cfg.pulse, t_arr, p.calib_seed)
                             : std::move(fc.trace);
    }
    const double factor = max_abs(calib_sim) / max_abs(calib_measured);
    const TraceSet calibrated = calibrate(propagated, calib_measured, calib_sim);

    LadderPlanes out = read_ladder_planes(need(joinp(dir, "reference.glws")));
    check_ladder_match(out, cfg.ladder, "reference.glws");
    if (out.nx != g.nx || out.ny != g.ny) throw ConfigError("reference.glws lattice mismatch");
    check_data_plane(out, g, "reference.glws");
    for (int n = 0; n < out.count; ++n) {
        const std::vector<double> L = laplace_transform(calibrated, out.s(n));
        double* w = out.plane(n);
        for (std::size_t q = 0; q < L.size(); ++q) w[q] += L[q];
    }
    write_ladder_planes(joinp(dir, "gamma_processed.glws"), out);

    json lg;
    lg["detected_lag_samples"] = lag;
    lg["calibration_factor"] = factor;
    lg["gate"] = {p.gate_start, p.gate_start + p.gate_len};
    lg["propagate_dist"] = p.propagate_dist;
    lg["corrupted"] = cfg.have_corruption;
    write_text(joinp(dir, "preprocess.json"), lg.dump(2) + "\n");
}

void cmd_invert(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid3 g = cfg.make_grid3();
    const std::string& dir = cfg.output_dir;
    fs::create_directories(dir);

    LadderPlanes data = read_ladder_planes(need(joinp(dir, cfg.data_file)));
    check_ladder_match(data, cfg.ladder, cfg.data_file);
    data = conform_planes(data, g, cfg.data_file);
    check_data_plane(data, g, cfg.data_file);

    const auto t_ref = std::chrono::steady_clock::now();
    ForwardResult f0 =
        solve_forward(g, ScalarField(g, 1.0), cfg.pulse, cfg.plan, ladder_svals(cfg.ladder));
    const double ref_s = elapsed_s(t_ref);

    const auto t_lad = std::chrono::steady_clock::now();
    InversionResult res;
    try {
        res = run_ladder(g, data, f0.W, cfg.driver_config());
    } catch (const RuntimeError& e) {
        const std::string dump = joinp(dir, "failure_state.json");
        json fj;
        fj["error"] = e.what();
        fj["data_file"] = cfg.data_file;
        fj["preset"] = cfg.preset;
        write_text(dump, fj.dump(2) + "\n");
        throw RuntimeError(std::string(e.what()) + " (state dump: " + dump + ")");
    }
    const double ladder_s = elapsed_s(t_lad);

    const SelectionResult sel = classify_and_select(g, res.D0, res.Dm, res.snaps);

    write_field(joinp(dir, "eps_comp.glwr"), g, sel.field, "computed permittivity");
    write_norms_csv(joinp(dir, "norms.csv"), res.D0, res.Dm);

    const double true_eps = cfg.phantom.max_eps();
    const double true_n = std::sqrt(true_eps);

    json rj;
    rj["class"] = class_name(sel.cls);
    rj["eps_comp"] = sel.eps_comp;
    rj["n_comp"] = sel.n_comp;
    rj["eps_tilde"] = sel.eps_tilde;
    rj["pick"] = sel.pick;
    rj["Nbar"] = sel.Nbar;
    rj["Mbar"] = sel.Mbar;
    rj["retried"] = sel.retried;
    if (sel.retried) rj["Ntilde"] = sel.Ntilde;
    rj["warned"] = sel.warned;
    rj["cap_hit"] = res.cap_hit;
    rj["clipped_nodes"] = res.clipped_nodes;
    rj["forward_solves"] = res.forward_solves;
    rj["mns"] = res.mns;
    rj["D0"] = res.D0;
    rj["Dm"] = res.Dm;
    rj["true_eps"] = true_eps;
    rj["true_n"] = true_n;
    rj["rel_err_n"] = std::abs(sel.n_comp - true_n) / true_n;
    rj["preset"] = cfg.preset;
    rj["data_file"] = cfg.data_file;
    rj["seed"] = cfg.seed;
    rj["grid"] = {{"nx", g.nx}, {"ny", g.ny}, {"nz", g.nz}, {"h", {g.hx, g.hy, g.hz}}};
    rj["ladder"] = {{"smin", cfg.ladder.smin}, {"smax", cfg.ladder.smax},
                    {"step", cfg.ladder.step}};
    rj["mu"] = cfg.mu;
    rj["eta"] = cfg.eta;
    rj["i_max"] = cfg.imax;
    write_text(joinp(dir, "report.json"), rj.dump(2) + "\n");

    json sj;
    sj["mns"] = res.mns;
    sj["Nbar"] = sel.Nbar;
    sj["Mbar"] = sel.Mbar;
    sj["pick"] = sel.pick;
    sj["retried"] = sel.retried;
    sj["Ntilde"] = sel.Ntilde;
    sj["warned"] = sel.warned;
    sj["class"] = class_name(sel.cls);
    sj["eps_comp"] = sel.eps_comp;
    sj["n_comp"] = sel.n_comp;
    sj["eps_tilde"] = sel.eps_tilde;
    write_text(joinp(dir, "state.json"), sj.dump(2) + "\n");

    json tj;
    tj["reference_run_s"] = ref_s;
    tj["ladder_s"] = ladder_s;
    tj["total_s"] = elapsed_s(t0);
    write_text(joinp(dir, "timings.json"), tj.dump(2) + "\n");
}

void cmd_postprocess(const RunConfig& cfg) {
    const Grid3 g = cfg.make_grid3();
    const std::string& dir = cfg.output_dir;

    const json sj = read_json_file(joinp(dir, "state.json"));
    SelectionResult sel;
    std::vector<int> mns;
    try {
        mns = sj.at("mns").get<std::vector<int>>();
        sel.Nbar = sj.at("Nbar").get<int>();
        sel.Mbar = sj.at("Mbar").get<int>();
        sel.pick = sj.at("pick").get<int>();
        sel.retried = sj.at("retried").get<bool>();
        sel.Ntilde = sj.at("Ntilde").get<int>();
    } catch (const json::exception& e) {
        throw RuntimeError(std::string("state.json: ") + e.what());
    }

    LadderPlanes data = read_ladder_planes(need(joinp(dir, cfg.data_file)));
    check_ladder_match(data, cfg.ladder, cfg.data_file);
    data = conform_planes(data, g, cfg.data_file);
    check_data_plane(data, g, cfg.data_file);

    ForwardResult f0 =
        solve_forward(g, ScalarField(g, 1.0), cfg.pulse, cfg.plan, ladder_svals(cfg.ladder));

    const StageTwoResult st = stage_two(g, data, f0.W, cfg.driver_config(), mns, sel);
    write_field(joinp(dir, "eps_image.glwr"), g, st.image, "shape-refined image");
    write_vtk(joinp(dir, "eps_image.vtk"), g, st.image, "epsilon");

    json ij;
    ij["empty"] = st.empty;
    ij["max_eps"] = st.max_eps;
    ij["support_count"] = st.support_count;
    if (!st.empty) {
        ij["i"] = {st.ix0, st.ix1};
        ij["j"] = {st.jy0, st.jy1};
        ij["k"] = {st.kz0, st.kz1};
        ij["x"] = {g.x(st.ix0), g.x(st.ix1)};
        ij["y"] = {g.y(st.jy0), g.y(st.jy1)};
        ij["z"] = {g.z(st.kz0), g.z(st.kz1)};
        ij["centroid_ij"] = {st.centroid_i, st.centroid_j};
        ij["centroid_xy"] = {g.ox + g.hx * st.centroid_i, g.oy + g.hy * st.centroid_j};
    }
    write_text(joinp(dir, "image.json"), ij.dump(2) + "\n");
}

void cmd_report(const std::vector<std::string>& run_dirs, const std::string& csv_path) {
    struct Row {
        std::string run, cls;
        double true_n = 0, n_comp = 0, rel = 0;
        int pick = 0;
    };
    std::vector<Row> rows;
    for (const auto& d : run_dirs) {
        const json rj = read_json_file(joinp(d, "report.json"));
        Row r;
        r.run = d;
        try {
            r.cls = rj.at("class").get<std::string>();
            r.true_n = rj.at("true_n").get<double>();
            r.n_comp = rj.at("n_comp").get<double>();
            r.rel = rj.at("rel_err_n").get<double>();
            r.pick = rj.at("pick").get<int>();
        } catch (const json::exception& e) {
            throw RuntimeError(d + "/report.json: " + e.what());
        }
        rows.push_back(r);
    }

    std::ostringstream os;
    os << "run,class,true_n,n_comp,rel_err_pct,picked_interval\n";
    double acc = 0.0;
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.4f,%.4f,%.2f,%d\n", r.run.c_str(), r.cls.c_str(),
                      r.true_n, r.n_comp, 100.0 * r.rel, r.pick);
        os << buf;
        acc += r.rel;
    }
    if (!rows.empty()) {
        std::snprintf(buf, sizeof buf, "average,,,,%.2f,\n", 100.0 * acc / double(rows.size()));
        os << buf;
    }
    std::cout << os.str();
    if (!csv_path.empty()) write_text(csv_path, os.str());
}

}  // namespace glow
