#pragma once

#include <string>
#include <vector>

#include "glow/grid.hpp"

namespace glow {

// Axis-aligned primitive with interior permittivity `eps`.
// box:      half_widths are per-axis half extents around the center.
// sphere:   radius = half_widths[0].
// cylinder: z-aligned; radius = half_widths[0], half height = half_widths[2].
struct Shape {
    enum class Kind { Box, Sphere, Cylinder };
    Kind kind = Kind::Box;
    double cx = 0, cy = 0, cz = 0;
    double ax = 0, ay = 0, az = 0;  // half widths / radius as described above
    double eps = 1.0;

    bool contains(double x, double y, double z) const;
};

struct PhantomSpec {
    std::vector<Shape> shapes;  // empty = homogeneous background
    double max_eps() const;
};

// Samples the phantom on the grid: eps inside shapes (overlaps resolve by
// maximum), 1 elsewhere and on every node outside Omega.
ScalarField rasterize(const PhantomSpec& spec, const Grid3& g);

// Nested two-shape phantom; the inner shape must be contained in the outer one.
PhantomSpec heterogeneous_phantom(const Shape& outer, const Shape& inner);

PhantomSpec phantom_from_json(const std::string& text);
std::string phantom_to_json(const PhantomSpec& spec);

}  // namespace glow
