#pragma once

#include <cmath>
#include <vector>

#include "glow/grid.hpp"

namespace glow {

// Plane-wave excitation: one sine period sin(omega*t) on (0, 2*pi/omega], 0 after.
struct SourcePulse {
    double omega = 30.0;
    double t1() const { return 2.0 * M_PI / omega; }
    double f(double t) const;
};

struct TimeSteppingPlan {
    double tau = 0.003;
    double T = 1.0;
    int steps() const { return int(std::lround(T / tau)); }
    // Stability ratio with unit background speed (eps_r >= 1).
    double cfl_ratio(const Grid3& g) const;
};

struct ForwardResult {
    // Truncated Laplace transform of u over (0, T], one full-grid field per
    // requested pseudo-frequency (trapezoidal accumulation during stepping).
    std::vector<ScalarField> W;
    // Optional time record on a z-plane (empty when not requested).
    TraceSet trace;
};

// Explicit second-order leapfrog for eps_r * u_tt = Laplace(u), u = u_t = 0 at t=0.
// The incident plane wave f(t - (z_front - z)) enters through the front z-face,
// where the scattered remainder gets a first-order absorbing update; the back
// z-face is absorbing on the full field; the four side faces are zero-Neumann.
// record_k: z-plane index to record (-1 = none).
// Throws ConfigError on CFL violation or eps outside [1,15];
// RuntimeError (with step index) if the field turns non-finite.
ForwardResult solve_forward(const Grid3& g, const ScalarField& eps, const SourcePulse& pulse,
                            const TimeSteppingPlan& plan, const std::vector<double>& svals,
                            int record_k = -1);

namespace detail {
// Stepper without the CFL/eps validation; used by tests to exercise the
// instability diagnostic.
ForwardResult run_unchecked(const Grid3& g, const ScalarField& eps, const SourcePulse& pulse,
                            const TimeSteppingPlan& plan, const std::vector<double>& svals,
                            int record_k);
}

// Fundamental solution exp(-s|x-x0|)/(4*pi*|x-x0|) of the modified Helmholtz
// problem; reference only, not an FDTD source.
double analytic_w0(const double x[3], const double x0[3], double s);

// Laplace transform of one sine period: F(s) = omega*(1-exp(-2*pi*s/omega))/(s^2+omega^2).
double pulse_transform(double s, double omega);

// Homogeneous plane-wave transform e^{-s(z_front - z)} * F(s).
double analytic_plane_wave_w(double z, double s, const SourcePulse& pulse, double z_front);

}  // namespace glow
