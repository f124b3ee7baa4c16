#pragma once

#include <optional>
#include <string>
#include <vector>

#include "glow/grid.hpp"

namespace glow {

// Inner-iteration verdict. The contraction test compares the newest entries
// of the histories: a non-decrease of either norm stops and discards the
// latest iterate; reaching the tolerance stops and keeps it.
enum class InnerStop { Continue, StopRollback, StopKeep };

InnerStop inner_stop(const std::vector<double>& B_history, const std::vector<double>& D_history,
                     double eta = 1e-6);

// Surface L2 over the Gamma footprint (top z-face of Omega) with tensor
// trapezoid weights (half on edges, quarter on corners) times hx*hy.
double gamma_l2(const Grid3& g, const ScalarField& F);
// Same, of F minus a full-lattice plane (nx*ny, x-fastest) at the Gamma face.
double gamma_l2(const Grid3& g, const ScalarField& F, const std::vector<double>& plane);

double omega_max(const Grid3& g, const ScalarField& F);

// First index n with D[n+1] >= D[n].
std::optional<int> first_min(const std::vector<double>& D);
// Adds the stabilization exit: two consecutive relative changes below 1%.
std::optional<int> first_min_or_stab(const std::vector<double>& D);

enum class TargetClass { Dielectric, Metallic };

struct SelectionResult {
    int Nbar = 0, Mbar = 0;    // detected minima, 1-based interval numbers
    int pick = 0;              // selected interval, 1-based
    double eps_tilde = 0;      // max permittivity of the first selection
    bool retried = false;      // middle branch of the threshold split
    int Ntilde = 0;            // re-selected interval when retried (1-based)
    TargetClass cls = TargetClass::Dielectric;
    double eps_comp = 0;       // reported permittivity (max over Omega)
    double n_comp = 0;         // sqrt(eps_comp)
    bool warned = false;       // no minimum found before the last interval
    ScalarField field;         // selected snapshot
};

// Four-step selection: first minimum of the first norms, first minimum or
// stabilization of the final norms, threshold split on the max permittivity
// ({<5: dielectric, >10: metallic, else re-select the global minimum of the
// final norms beyond Nbar and classify that}).
SelectionResult classify_and_select(const Grid3& g, const std::vector<double>& D0,
                                    const std::vector<double>& Dm,
                                    const std::vector<ScalarField>& snaps);

const char* class_name(TargetClass c);

// Plot-ready norm curves, one row per interval: n,D_n0,D_nm.
void write_norms_csv(const std::string& path, const std::vector<double>& D0,
                     const std::vector<double>& Dm);

}  // namespace glow
