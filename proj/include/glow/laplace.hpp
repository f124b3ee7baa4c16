#pragma once

#include <vector>

#include "glow/grid.hpp"

namespace glow {

// Descending pseudo-frequency ladder s_n = smax - n*step, n = 0..intervals().
struct Ladder {
    double smin = 8.0, smax = 10.0, step = 0.05;
    int count = 41;  // ladder values, intervals() + 1

    int intervals() const { return count - 1; }
    double s(int n) const { return smax - step * n; }
};

// Validates 0 < smin < smax, step > 0 and integral interval count.
Ladder make_ladder(double smin, double smax, double step);

// Trapezoidal transform per position of a recorded plane: integral of
// u(t) e^{-s t} over the record. Returns an nx*ny plane, x-fastest.
// Requires e^{-s*T} < 1e-3 so the truncated-tail contribution is controlled.
std::vector<double> laplace_transform(const TraceSet& trace, double s);

// ln(w)/s^2 per plane node; rejects non-positive w.
std::vector<double> observed_tail(const std::vector<double>& w_plane, double s);

// v = ln(w)/s^2 and q = dv/ds = (d/ds ln w)/s^2 - 2 ln(w)/s^3 at ladder index n,
// with d/ds by central differences over the ladder (one-sided at the ends).
struct VQPlanes {
    std::vector<double> v, q;
};
VQPlanes compute_v_q_boundary(const LadderPlanes& w, int n);

// q stack for every ladder value (same formula as compute_v_q_boundary).
LadderPlanes psi_planes(const LadderPlanes& w);
std::vector<ScalarField> psi_fields(const std::vector<ScalarField>& w, const Ladder& lad);

// Dirichlet data stacks for the layer-stripping solves: the homogeneous-model
// stack everywhere, overwritten by the measured stack on the Gamma footprint
// (top z-face of Omega). Every boundary node must come out finite.
std::vector<ScalarField> assemble_boundary_data(const std::vector<ScalarField>& psi0,
                                                const LadderPlanes& psi_gamma, const Grid3& g);

}  // namespace glow
