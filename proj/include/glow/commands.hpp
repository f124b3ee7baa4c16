#pragma once

#include <string>
#include <vector>

#include "glow/config.hpp"

namespace glow {

// Pipeline stages. Each reads/writes files under cfg.output_dir; failures
// throw ConfigError (bad inputs) or RuntimeError (solver/data trouble).

// Phantom and reference forward runs: time records at the measurement plane
// plus transform stacks on the data-plane lattice.
void cmd_simulate(const RunConfig& cfg);

// Measurement cleanup on the recorded traces: synthetic corruption (when
// configured), time-zero correction, background subtraction + gate,
// propagation to the data plane, amplitude calibration; writes the processed
// transform stack.
void cmd_preprocess(const RunConfig& cfg);

// Layer-stripping inversion of the configured data stack; writes the computed
// permittivity, norm curves, selection state, and the run report.
void cmd_invert(const RunConfig& cfg);

// Shape-refinement replay using the stage-one state; writes the image field
// (binary + VTK) and its support summary.
void cmd_postprocess(const RunConfig& cfg);

// Summary table over completed run directories (stdout); optional CSV copy.
void cmd_report(const std::vector<std::string>& run_dirs, const std::string& csv_path);

}  // namespace glow
