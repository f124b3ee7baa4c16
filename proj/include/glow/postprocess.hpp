#pragma once

#include <string>

#include "glow/driver.hpp"
#include "glow/stopping.hpp"

namespace glow {

struct ThresholdResult {
    ScalarField field;
    bool empty = false;
};

// Keeps values above half the Omega maximum, resets the rest to 1, then
// erases everything outside the (x, y) bounding box of the survivors
// (z unrestricted). Identity + empty flag when nothing exceeds 1.
ThresholdResult threshold_and_box(const Grid3& g, const ScalarField& eps);

struct StageTwoResult {
    ScalarField image;  // bimodal: 1 or >= 0.9 * max
    bool empty = false;
    // support of the image in node indices (valid when !empty)
    int ix0 = -1, ix1 = -1, jy0 = -1, jy1 = -1, kz0 = -1, kz1 = -1;
    double centroid_i = 0, centroid_j = 0;  // index-space (x, y) centroid
    long support_count = 0;
    double max_eps = 0;
};

// Shape-refinement replay: reruns the ladder with the stage-one inner
// iteration counts (no stopping tests), applying threshold_and_box after
// every permittivity update, and extracts the image at the stage-one
// selection with the 0.9-of-max rule. Reported permittivity values stay
// those of stage one.
StageTwoResult stage_two(const Grid3& g, const LadderPlanes& Wdata_gamma,
                         const std::vector<ScalarField>& W0_all, const DriverConfig& cfg,
                         const std::vector<int>& mns, const SelectionResult& sel);

// Legacy ASCII structured-points export for isosurface viewers.
void write_vtk(const std::string& path, const Grid3& g, const ScalarField& f,
               const std::string& name);

}  // namespace glow
