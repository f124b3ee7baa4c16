#pragma once

#include <cstdint>
#include <string>

#include "glow/driver.hpp"
#include "glow/phantom.hpp"
#include "glow/preprocess.hpp"

namespace glow {

struct PreprocessParams {
    double gate_start = 0.14;
    double gate_len = 0.79;
    double propagate_dist = 0.04;  // record plane to data plane, unit speed
    double match_window = 0.165;   // direct-signal window for lag + amplitude match
    int max_lag = 20;
    double min_corr = 0.5;
    double temporal_sigma = 8.0;  // samples
    double spatial_sigma = 0.75;  // cells
    CorruptionModel corruption;   // synthetic measurement defects (off by default)
    uint64_t calib_seed = 11;     // noise stream for the calibration record
    std::string calib_measured;   // optional trace files; empty = synthesize the pair
    std::string calib_sim;
    PhantomSpec calib_phantom;  // default set by load: eps 2.5 reference block
};

struct RunConfig {
    std::string preset;  // test1 | test2 | test3 | mini, or empty with explicit grid
    GridSpec grid;
    PhantomSpec phantom;  // empty shapes = homogeneous
    SourcePulse pulse;
    TimeSteppingPlan plan;
    Ladder ladder;
    double mu = 20.0;
    double eta = 1e-6;
    int imax = 4;
    double record_z = 0.08;  // measurement plane height
    PreprocessParams prep;
    std::string output_dir = "out";
    std::string data_file = "gamma_data.glws";  // invert input, relative to output_dir
    uint64_t seed = 7;
    bool have_corruption = false;

    Grid3 make_grid3() const { return make_grid(grid); }
    // node index of the measurement plane; must land on the lattice
    int record_index(const Grid3& g) const;
    DriverConfig driver_config() const;
};

// Pinned experiment geometries. test1: coarse full aperture; test2: the same
// at half the spacing; test3: coarse with the narrow observable box; mini:
// reduced aperture for fast runs.
GridSpec preset_grid(const std::string& name);
double preset_duration(const std::string& name);  // time-domain record length

RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& c);

}  // namespace glow
