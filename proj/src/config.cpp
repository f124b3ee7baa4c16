#include "glow/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace glow {

int RunConfig::record_index(const Grid3& g) const {
    const double kf = (record_z - g.oz) / g.hz;
    const int k = int(std::lround(kf));
    if (std::abs(kf - k) > 1e-9 || k < 0 || k >= g.nz)
        throw ConfigError("record plane does not land on a lattice plane inside the grid");
    return k;
}

DriverConfig RunConfig::driver_config() const {
    DriverConfig d;
    d.ladder = ladder;
    d.mu = mu;
    d.eta = eta;
    d.imax = imax;
    d.pulse = pulse;
    d.plan = plan;
    return d;
}

GridSpec preset_grid(const std::string& name) {
    GridSpec s;
    s.gz0 = -0.16;
    s.gz1 = 0.1;
    s.oz0 = -0.1;
    s.oz1 = 0.04;
    if (name == "test1" || name == "test2" || name == "test3") {
        s.gx0 = s.gy0 = -0.56;
        s.gx1 = s.gy1 = 0.56;
        const double half = (name == "test3") ? 0.2 : 0.5;
        s.ox0 = s.oy0 = -half;
        s.ox1 = s.oy1 = half;
        const double h = (name == "test2") ? 0.01 : 0.02;
        s.hx = s.hy = s.hz = h;
    } else if (name == "mini") {
        s.gx0 = s.gy0 = -0.26;
        s.gx1 = s.gy1 = 0.26;
        s.ox0 = s.oy0 = -0.2;
        s.ox1 = s.oy1 = 0.2;
        s.hx = s.hy = s.hz = 0.02;
    } else {
        throw ConfigError("unknown preset '" + name + "' (test1|test2|test3|mini)");
    }
    return s;
}

double preset_duration(const std::string& name) { return name == "mini" ? 1.0 : 1.2; }

namespace {

using nlohmann::json;

void check_keys(const json& j, const char* where, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(std::string("unknown key '") + it.key() + "' in " + where);
}

double num(const json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::array<double, 6> six(const json& j, const char* key) {
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 6)
        throw ConfigError(std::string("'") + key + "' must be [x0,x1,y0,y1,z0,z1]");
    std::array<double, 6> r{};
    for (int i = 0; i < 6; ++i) r[i] = a.at(i).get<double>();
    return r;
}

PulseCopy pulse_copy(const json& a, const char* where) {
    if (!a.is_array() || a.size() != 2)
        throw ConfigError(std::string(where) + " entries must be [delay, amplitude] pairs");
    return PulseCopy{a.at(0).get<double>(), a.at(1).get<double>()};
}

PhantomSpec default_calib_phantom() {
    Shape b;
    b.kind = Shape::Kind::Box;
    b.cx = b.cy = 0.0;
    b.cz = -0.02;
    b.ax = b.ay = 0.04;
    b.az = 0.02;
    b.eps = 2.5;
    PhantomSpec s;
    s.shapes.push_back(b);
    return s;
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(j, "config",
               {"preset", "grid", "phantom", "phantom_file", "pulse_omega", "T", "tau", "ladder",
                "mu", "eta", "i_max", "record_z", "preprocess", "output_dir", "data_file",
                "seed"});

    RunConfig c;
    try {
        const bool has_preset = j.contains("preset");
        const bool has_grid = j.contains("grid");
        if (has_preset == has_grid)
            throw ConfigError("config needs exactly one of 'preset' or 'grid'");
        if (has_preset) {
            c.preset = j.at("preset").get<std::string>();
            c.grid = preset_grid(c.preset);
            c.plan.T = preset_duration(c.preset);
        } else {
            const auto& jg = j.at("grid");
            check_keys(jg, "grid", {"g", "omega", "h"});
            const auto G = six(jg, "g");
            const auto O = six(jg, "omega");
            c.grid.gx0 = G[0];
            c.grid.gx1 = G[1];
            c.grid.gy0 = G[2];
            c.grid.gy1 = G[3];
            c.grid.gz0 = G[4];
            c.grid.gz1 = G[5];
            c.grid.ox0 = O[0];
            c.grid.ox1 = O[1];
            c.grid.oy0 = O[2];
            c.grid.oy1 = O[3];
            c.grid.oz0 = O[4];
            c.grid.oz1 = O[5];
            const auto& jh = jg.at("h");
            if (jh.is_number()) {
                c.grid.hx = c.grid.hy = c.grid.hz = jh.get<double>();
            } else if (jh.is_array() && jh.size() == 3) {
                c.grid.hx = jh.at(0).get<double>();
                c.grid.hy = jh.at(1).get<double>();
                c.grid.hz = jh.at(2).get<double>();
            } else {
                throw ConfigError("'h' must be a number or [hx,hy,hz]");
            }
        }

        if (j.contains("phantom") && j.contains("phantom_file"))
            throw ConfigError("give either 'phantom' or 'phantom_file', not both");
        if (j.contains("phantom")) {
            c.phantom = phantom_from_json(j.at("phantom").dump());
        } else if (j.contains("phantom_file")) {
            const std::string path = j.at("phantom_file").get<std::string>();
            std::ifstream is(path);
            if (!is) throw ConfigError("cannot read phantom file " + path);
            std::stringstream ss;
            ss << is.rdbuf();
            c.phantom = phantom_from_json(ss.str());
        }

        c.pulse.omega = num(j, "pulse_omega", c.pulse.omega);
        c.plan.T = num(j, "T", c.plan.T);
        c.plan.tau = num(j, "tau", c.plan.tau);

        double smin = 8.0, smax = 10.0, step = 0.05;
        if (j.contains("ladder")) {
            const auto& jl = j.at("ladder");
            check_keys(jl, "ladder", {"smin", "smax", "step"});
            smin = num(jl, "smin", smin);
            smax = num(jl, "smax", smax);
            step = num(jl, "step", step);
        }
        c.ladder = make_ladder(smin, smax, step);

        c.mu = num(j, "mu", c.mu);
        c.eta = num(j, "eta", c.eta);
        if (j.contains("i_max")) c.imax = j.at("i_max").get<int>();
        c.record_z = num(j, "record_z", c.record_z);
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("data_file")) c.data_file = j.at("data_file").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();

        c.prep.calib_phantom = default_calib_phantom();
        if (j.contains("preprocess")) {
            const auto& jp = j.at("preprocess");
            check_keys(jp, "preprocess",
                       {"gate_start", "gate_len", "propagate_dist", "match_window", "max_lag",
                        "min_corr", "temporal_sigma", "spatial_sigma", "corruption", "calib_seed",
                        "calib_measured", "calib_sim", "calib_phantom"});
            PreprocessParams& p = c.prep;
            p.gate_start = num(jp, "gate_start", p.gate_start);
            p.gate_len = num(jp, "gate_len", p.gate_len);
            p.propagate_dist = num(jp, "propagate_dist", p.propagate_dist);
            p.match_window = num(jp, "match_window", p.match_window);
            if (jp.contains("max_lag")) p.max_lag = jp.at("max_lag").get<int>();
            p.min_corr = num(jp, "min_corr", p.min_corr);
            p.temporal_sigma = num(jp, "temporal_sigma", p.temporal_sigma);
            p.spatial_sigma = num(jp, "spatial_sigma", p.spatial_sigma);
            if (jp.contains("calib_seed")) p.calib_seed = jp.at("calib_seed").get<uint64_t>();
            if (jp.contains("calib_measured"))
                p.calib_measured = jp.at("calib_measured").get<std::string>();
            if (jp.contains("calib_sim")) p.calib_sim = jp.at("calib_sim").get<std::string>();
            if (jp.contains("calib_phantom"))
                p.calib_phantom = phantom_from_json(jp.at("calib_phantom").dump());
            if (jp.contains("corruption")) {
                const auto& jc = jp.at("corruption");
                check_keys(jc, "corruption", {"direct", "echoes", "gain", "t0", "sigma"});
                c.have_corruption = true;
                CorruptionModel& m = p.corruption;
                // defaults model the bench: two clutter echoes, 5% gain error,
                // a trigger offset, 2%-of-peak noise
                m.gain = num(jc, "gain", 1.05);
                m.t0 = num(jc, "t0", 0.015);
                m.sigma = num(jc, "sigma", 0.02);
                if (jc.contains("direct")) m.direct = pulse_copy(jc.at("direct"), "'direct'");
                if (jc.contains("echoes")) {
                    for (const auto& e : jc.at("echoes"))
                        m.echoes.push_back(pulse_copy(e, "'echoes'"));
                } else {
                    m.echoes = {{0.93, 0.15}, {1.05, 0.1}};
                }
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }

    if (!(c.mu > 0.0)) throw ConfigError("mu must be positive");
    if (!(c.eta > 0.0)) throw ConfigError("eta must be positive");
    if (c.imax < 1) throw ConfigError("i_max must be at least 1");
    if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
    make_grid(c.grid);  // geometry sanity (extent/divisibility) fails early
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return config_from_json(ss.str());
}

std::string config_to_json(const RunConfig& c) {
    json j;
    if (!c.preset.empty()) j["preset"] = c.preset;
    j["grid"] = {{"g",
                  {c.grid.gx0, c.grid.gx1, c.grid.gy0, c.grid.gy1, c.grid.gz0, c.grid.gz1}},
                 {"omega",
                  {c.grid.ox0, c.grid.ox1, c.grid.oy0, c.grid.oy1, c.grid.oz0, c.grid.oz1}},
                 {"h", {c.grid.hx, c.grid.hy, c.grid.hz}}};
    j["phantom"] = json::parse(phantom_to_json(c.phantom));
    j["pulse_omega"] = c.pulse.omega;
    j["T"] = c.plan.T;
    j["tau"] = c.plan.tau;
    j["ladder"] = {{"smin", c.ladder.smin}, {"smax", c.ladder.smax}, {"step", c.ladder.step}};
    j["mu"] = c.mu;
    j["eta"] = c.eta;
    j["i_max"] = c.imax;
    j["record_z"] = c.record_z;
    j["output_dir"] = c.output_dir;
    j["data_file"] = c.data_file;
    j["seed"] = c.seed;
    json jp;
    jp["gate_start"] = c.prep.gate_start;
    jp["gate_len"] = c.prep.gate_len;
    jp["propagate_dist"] = c.prep.propagate_dist;
    jp["match_window"] = c.prep.match_window;
    jp["max_lag"] = c.prep.max_lag;
    jp["min_corr"] = c.prep.min_corr;
    jp["temporal_sigma"] = c.prep.temporal_sigma;
    jp["spatial_sigma"] = c.prep.spatial_sigma;
    jp["calib_seed"] = c.prep.calib_seed;
    if (!c.prep.calib_measured.empty()) jp["calib_measured"] = c.prep.calib_measured;
    if (!c.prep.calib_sim.empty()) jp["calib_sim"] = c.prep.calib_sim;
    if (c.have_corruption) {
        const CorruptionModel& m = c.prep.corruption;
        json jc;
        jc["gain"] = m.gain;
        jc["t0"] = m.t0;
        jc["sigma"] = m.sigma;
        jc["direct"] = {m.direct.delay, m.direct.amp};
        json je = json::array();
        for (const auto& e : m.echoes) je.push_back({e.delay, e.amp});
        jc["echoes"] = je;
        jp["corruption"] = jc;
    }
    j["preprocess"] = jp;
    return j.dump(2);
}

}  // namespace glow
