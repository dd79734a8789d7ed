#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace curvedrt {

using Vec2 = Eigen::Vector2d;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The perpendicular through a boundary-edge point does not meet the arc
/// inside the bracket: the mesh is too coarse for this boundary edge.
struct NoIntersection : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    using Error::Error;
};

/// Local boundary-constraint matrix too close to singular (mesh too coarse).
struct IllConditioned : Error {
    using Error::Error;
};

struct SingularSystem : Error {
    using Error::Error;
};

/// A triangle with all three vertices on the curved boundary was found.
struct ThreeBoundaryVertices : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

inline double cross2(const Vec2& a, const Vec2& b) {
    return a.x() * b.y() - a.y() * b.x();
}

// clockwise rotation by 90 degrees; maps a unit tangent to the normal on its right
inline Vec2 rot_cw(const Vec2& v) {
    return {v.y(), -v.x()};
}

} // namespace curvedrt
