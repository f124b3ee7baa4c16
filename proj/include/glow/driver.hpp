#pragma once

#include <vector>

#include "glow/cwf.hpp"
#include "glow/fem.hpp"
#include "glow/forward.hpp"
#include "glow/laplace.hpp"
#include "glow/stopping.hpp"

namespace glow {

struct DriverConfig {
    Ladder ladder;
    double mu = 20.0;
    double eta = 1e-6;
    int imax = 4;  // inner-iteration cap; activation is reported as a warning
    SourcePulse pulse;
    TimeSteppingPlan plan;  // forward re-simulation settings (same grid as data)
    double clip_abort_fraction = 0.2;
};

struct InversionResult {
    std::vector<double> D0, Dm;       // first and final norms per interval
    std::vector<int> mns;             // accepted inner-iteration counts
    std::vector<ScalarField> snaps;   // interval-start permittivity snapshots
    ScalarField eps_final;            // state after the last interval
    std::vector<std::vector<double>> Bhist, Dhist;  // all inner norms per interval
    std::vector<CwfCoeffs> coeffs;    // logged per interval
    long forward_solves = 0;
    long clipped_nodes = 0;  // non-positive transform nodes encountered in Omega
    bool cap_hit = false;
};

// Central differences on the full grid; one-sided second order at the grid
// faces (the observable region never touches them).
void grad_field(const Grid3& g, const ScalarField& F, ScalarField& gx, ScalarField& gy,
                ScalarField& gz);

// V = p/sbar where p is the discrete harmonic extension of -sbar^2 * psi_sbar.
ScalarField initial_tail(const FemSystem& fem, const ScalarField& psi_sbar, double sbar);

// Layer-stripping loop over the pseudo-frequency ladder. Wdata_gamma holds the
// measured transform planes on the full top-face lattice (only the Gamma
// footprint is consumed); W0_all is the homogeneous-model transform stack on
// the full grid.
InversionResult run_ladder(const Grid3& g, const LadderPlanes& Wdata_gamma,
                           const std::vector<ScalarField>& W0_all, const DriverConfig& cfg);

}  // namespace glow
