#pragma once

#include "curvedrt/common.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace curvedrt {

enum class BcTag { Dirichlet, Flux }; // Dirichlet: u given; Flux: q.n = 0 (essential)

enum class Convexity { Convex, Concave, Straight };

/// One smooth piece of the domain boundary, parametrized by t in [t0, t1]
/// (t0 > t1 is allowed and means the piece is traversed backwards so that
/// the whole boundary stays counter-clockwise).
struct BoundaryArc {
    enum class Kind { Circle, Segment };

    Kind kind = Kind::Segment;
    BcTag tag = BcTag::Dirichlet;

    // circle data: position(t) = center + radius * (cos t, sin t)
    Vec2 center{0, 0};
    double radius = 0;
    bool inward = false; // true if the domain lies outside the circle

    // segment data: position(t) = p0 + t * (p1 - p0), t in [0, 1]
    Vec2 p0{0, 0}, p1{0, 0};

    double t0 = 0, t1 = 0;

    Vec2 position(double t) const;
    Vec2 unit_tangent(double t) const; // in the direction of traversal (t0 -> t1)
    Vec2 outward_normal(double t) const;
    Convexity convexity() const;

    /// Parameter of the point closest to p (p assumed on or near the arc).
    double param_of(const Vec2& p) const;
    bool contains(const Vec2& p, double tol = 1e-9) const;

    double tmin() const { return std::min(t0, t1); }
    double tmax() const { return std::max(t0, t1); }
};

BoundaryArc circle_arc(const Vec2& center, double radius, double a0, double a1,
                       BcTag tag, bool inward);
BoundaryArc segment_arc(const Vec2& a, const Vec2& b, BcTag tag);

struct DomainBoundary {
    std::vector<BoundaryArc> arcs;

    /// Endpoints shared by consecutive arcs (arc i ends where arc i+1 starts).
    std::vector<Vec2> transition_points() const;

    /// Checks that the arcs form a closed loop and that each tag change
    /// happens at an arc endpoint. Throws ConfigError otherwise.
    void validate(double tol = 1e-9) const;
};

struct ParamInterval {
    double lo, hi;
};

/// Result of dropping a perpendicular from an edge point M along n_T onto an arc.
struct FootPoint {
    Vec2 N;        // intersection of { M + s n_T } with the arc
    double t;      // arc parameter of N
    double offset; // signed distance s (positive when N lies on the n_T side of M)
    Vec2 normal;   // outward unit normal of the true boundary at N
};

/// Analytic solve where possible (circle, segment), with bracket [lo, hi] on the
/// arc parameter. Throws NoIntersection when the line misses the arc inside the
/// bracket. The nearest admissible root (smallest |offset|) is returned.
FootPoint foot_of_perpendicular(const BoundaryArc& arc, const Vec2& M,
                                const Vec2& n_T, const ParamInterval& bracket);

/// Same problem solved by a safeguarded Newton/bisection root search on
/// g(t) = cross(position(t) - M, n_T). Used to cross-check the analytic path.
FootPoint foot_of_perpendicular_generic(const BoundaryArc& arc, const Vec2& M,
                                        const Vec2& n_T, const ParamInterval& bracket);

struct Mesh; // defined in mesh.hpp

/// Over all boundary edges: the largest distance from an edge point to the arc
/// along the edge normal, and the largest |n(N) - n_T| deviation at the foot.
std::pair<double, double> max_gap_and_normal_deviation(const Mesh& mesh,
                                                       const DomainBoundary& domain);

DomainBoundary read_domain(std::istream& in);
void write_domain(std::ostream& out, const DomainBoundary& domain);
DomainBoundary read_domain_file(const std::string& path);
void write_domain_file(const std::string& path, const DomainBoundary& domain);

} // namespace curvedrt
