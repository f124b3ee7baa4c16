#pragma once

#include <cstdint>
#include <vector>

#include "glow/forward.hpp"
#include "glow/grid.hpp"

namespace glow {

// Additive copy of the source pulse arriving `delay` after the direct signal.
struct PulseCopy {
    double delay = 0;
    double amp = 0;
};

// Synthetic stand-in for the measurement environment: leaked direct coupling,
// clutter echoes, gain error, an unknown trigger offset, and sensor noise
// (sigma is a fraction of the clean record's peak).
struct CorruptionModel {
    PulseCopy direct{0.0, 0.0};
    std::vector<PulseCopy> echoes;
    double gain = 1.0;
    double t0 = 0.0;
    double sigma = 0.0;
};

// t_arrival: arrival time of the incident wavefront at the record plane.
// Deterministic for a fixed seed across platforms and thread counts.
TraceSet corrupt(const TraceSet& trace, const CorruptionModel& model, const SourcePulse& pulse,
                 double t_arrival, uint64_t seed);

// Normalized cross-correlation against the reference record at the lattice
// center, restricted to the early-time window, with sub-sample refinement.
// Returns the trace advanced by the detected lag; rejects when the best
// correlation falls below `min_corr` (no direct signal found).
TraceSet time_zero_correct(const TraceSet& trace, const TraceSet& reference,
                           double window_end = 0.165, int max_lag = 20, double min_corr = 0.5,
                           double* detected_lag = nullptr);

// Matched-amplitude subtraction of the background record over the early-time
// window, light temporal/spatial Gaussian smoothing, then a time gate that
// zeroes samples outside [gate_start, gate_end].
TraceSet extract_scattered(const TraceSet& total, const TraceSet& background, double gate_start,
                           double gate_end, double match_window = 0.165,
                           double temporal_sigma = 8.0, double spatial_sigma = 0.75);

// Unit-speed plane advance toward the target: record shifted to t + d, plane
// coordinate decreased by d.
TraceSet propagate_data(const TraceSet& scattered, double d);

// Scales the data by peak(simulated)/peak(measured) of the calibration pair.
TraceSet calibrate(const TraceSet& scattered, const TraceSet& calib_measured,
                   const TraceSet& calib_simulated);

// out[m] = a(m + lag) by linear interpolation, zero outside the record.
std::vector<double> fractional_shift(const std::vector<double>& a, double lag);

// Gaussian smoothing along one axis of a trace with reflected ends
// (kernel exp(-x^2/(2 sigma^2)) truncated at radius int(4 sigma + 0.5)).
void gaussian_smooth_time(TraceSet& tr, double sigma);
void gaussian_smooth_plane(TraceSet& tr, double sigma);

}  // namespace glow
