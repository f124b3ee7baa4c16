#include "glow/phantom.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace glow {

namespace {
// Inclusion tolerance so that nodes sitting exactly on a shape face are kept
// regardless of rounding in the node coordinates.
constexpr double kEdgeTol = 1e-12;
}

bool Shape::contains(double x, double y, double z) const {
    double dx = x - cx, dy = y - cy, dz = z - cz;
    switch (kind) {
        case Kind::Box:
            return std::abs(dx) <= ax + kEdgeTol && std::abs(dy) <= ay + kEdgeTol &&
                   std::abs(dz) <= az + kEdgeTol;
        case Kind::Sphere:
            return dx * dx + dy * dy + dz * dz <= (ax + kEdgeTol) * (ax + kEdgeTol);
        case Kind::Cylinder:
            return dx * dx + dy * dy <= (ax + kEdgeTol) * (ax + kEdgeTol) &&
                   std::abs(dz) <= az + kEdgeTol;
    }
    return false;
}

double PhantomSpec::max_eps() const {
    double m = 1.0;
    for (const auto& s : shapes) m = std::max(m, s.eps);
    return m;
}

namespace {

// Conservative bounding box of a shape, used for the intersects-Omega check.
void bounds(const Shape& s, double lo[3], double hi[3]) {
    double rx = s.ax, ry = s.ay, rz = s.az;
    if (s.kind == Shape::Kind::Sphere) { ry = s.ax; rz = s.ax; }
    if (s.kind == Shape::Kind::Cylinder) { ry = s.ax; }
    lo[0] = s.cx - rx; hi[0] = s.cx + rx;
    lo[1] = s.cy - ry; hi[1] = s.cy + ry;
    lo[2] = s.cz - rz; hi[2] = s.cz + rz;
}

void validate_shape(const Shape& s) {
    if (s.eps < 1.0 || s.eps > 15.0)
        throw ConfigError("shape permittivity must lie in [1, 15]");
    if (s.ax <= 0 || (s.kind == Shape::Kind::Box && (s.ay <= 0 || s.az <= 0)) ||
        (s.kind == Shape::Kind::Cylinder && s.az <= 0))
        throw ConfigError("shape dimensions must be positive");
}

}  // namespace

ScalarField rasterize(const PhantomSpec& spec, const Grid3& g) {
    double omlo[3] = {g.x(g.i0), g.y(g.j0), g.z(g.k0)};
    double omhi[3] = {g.x(g.i1), g.y(g.j1), g.z(g.k1)};
    for (const auto& s : spec.shapes) {
        validate_shape(s);
        double lo[3], hi[3];
        bounds(s, lo, hi);
        for (int a = 0; a < 3; ++a)
            if (hi[a] < omlo[a] - kEdgeTol || lo[a] > omhi[a] + kEdgeTol)
                throw ConfigError("phantom shape lies entirely outside the observable region");
    }

    ScalarField f(g, 1.0);
    for (int k = g.k0; k <= g.k1; ++k)
        for (int j = g.j0; j <= g.j1; ++j)
            for (int i = g.i0; i <= g.i1; ++i) {
                double val = 1.0;
                for (const auto& s : spec.shapes)
                    if (s.contains(g.x(i), g.y(j), g.z(k))) val = std::max(val, s.eps);
                f.at(i, j, k) = val;
            }
    return f;
}

PhantomSpec heterogeneous_phantom(const Shape& outer, const Shape& inner) {
    validate_shape(outer);
    validate_shape(inner);
    double ilo[3], ihi[3], olo[3], ohi[3];
    bounds(inner, ilo, ihi);
    bounds(outer, olo, ohi);
    for (int a = 0; a < 3; ++a)
        if (ilo[a] < olo[a] - kEdgeTol || ihi[a] > ohi[a] + kEdgeTol)
            throw ConfigError("inner shape is not contained in the outer shape");
    PhantomSpec spec;
    spec.shapes = {outer, inner};
    return spec;
}

namespace {

Shape shape_from_json(const nlohmann::json& j) {
    Shape s;
    std::string type = j.at("type").get<std::string>();
    if (type == "box") s.kind = Shape::Kind::Box;
    else if (type == "sphere") s.kind = Shape::Kind::Sphere;
    else if (type == "cylinder") s.kind = Shape::Kind::Cylinder;
    else throw ConfigError("unknown phantom shape type: " + type);

    auto c = j.at("center");
    s.cx = c.at(0).get<double>();
    s.cy = c.at(1).get<double>();
    s.cz = c.at(2).get<double>();
    if (s.kind == Shape::Kind::Box) {
        auto hw = j.at("half_widths");
        s.ax = hw.at(0).get<double>();
        s.ay = hw.at(1).get<double>();
        s.az = hw.at(2).get<double>();
    } else if (s.kind == Shape::Kind::Sphere) {
        s.ax = s.ay = s.az = j.at("radius").get<double>();
    } else {
        s.ax = s.ay = j.at("radius").get<double>();
        s.az = j.at("half_height").get<double>();
    }
    s.eps = j.at("eps").get<double>();
    validate_shape(s);
    return s;
}

nlohmann::json shape_to_json(const Shape& s) {
    nlohmann::json j;
    switch (s.kind) {
        case Shape::Kind::Box:
            j["type"] = "box";
            j["half_widths"] = {s.ax, s.ay, s.az};
            break;
        case Shape::Kind::Sphere:
            j["type"] = "sphere";
            j["radius"] = s.ax;
            break;
        case Shape::Kind::Cylinder:
            j["type"] = "cylinder";
            j["radius"] = s.ax;
            j["half_height"] = s.az;
            break;
    }
    j["center"] = {s.cx, s.cy, s.cz};
    j["eps"] = s.eps;
    return j;
}

}  // namespace

PhantomSpec phantom_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("phantom JSON parse error: ") + e.what());
    }
    PhantomSpec spec;
    try {
        for (const auto& js : j.at("shapes")) spec.shapes.push_back(shape_from_json(js));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("phantom JSON field error: ") + e.what());
    }
    return spec;
}

std::string phantom_to_json(const PhantomSpec& spec) {
    nlohmann::json j;
    j["shapes"] = nlohmann::json::array();
    for (const auto& s : spec.shapes) j["shapes"].push_back(shape_to_json(s));
    return j.dump(2);
}

}  // namespace glow
