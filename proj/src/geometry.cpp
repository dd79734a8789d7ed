#include "curvedrt/geometry.hpp"
#include "curvedrt/mesh.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace curvedrt {

namespace {

double traversal_sign(const BoundaryArc& a) {
    return a.t1 >= a.t0 ? 1.0 : -1.0;
}

} // namespace

Vec2 BoundaryArc::position(double t) const {
    if (kind == Kind::Circle)
        return center + radius * Vec2(std::cos(t), std::sin(t));
    return p0 + t * (p1 - p0);
}

Vec2 BoundaryArc::unit_tangent(double t) const {
    if (kind == Kind::Circle)
        return traversal_sign(*this) * Vec2(-std::sin(t), std::cos(t));
    return traversal_sign(*this) * (p1 - p0).normalized();
}

Vec2 BoundaryArc::outward_normal(double t) const {
    if (kind == Kind::Circle) {
        Vec2 radial(std::cos(t), std::sin(t));
        return inward ? Vec2(-radial) : radial;
    }
    // boundary traversed counter-clockwise: outward normal is the tangent rotated cw
    return rot_cw(unit_tangent(t));
}

Convexity BoundaryArc::convexity() const {
    if (kind == Kind::Segment)
        return Convexity::Straight;
    return inward ? Convexity::Concave : Convexity::Convex;
}

double BoundaryArc::param_of(const Vec2& p) const {
    if (kind == Kind::Segment) {
        Vec2 d = p1 - p0;
        return (p - p0).dot(d) / d.squaredNorm();
    }
    double t = std::atan2(p.y() - center.y(), p.x() - center.x());
    // shift by multiples of 2*pi into the parameter range
    const double two_pi = 2.0 * M_PI;
    while (t < tmin() - 1e-12)
        t += two_pi;
    while (t > tmax() + 1e-12)
        t -= two_pi;
    return t;
}

bool BoundaryArc::contains(const Vec2& p, double tol) const {
    double t = param_of(p);
    if (t < tmin() - tol || t > tmax() + tol)
        return false;
    return (position(t) - p).norm() <= tol;
}

BoundaryArc circle_arc(const Vec2& center, double radius, double a0, double a1,
                       BcTag tag, bool inward) {
    if (radius <= 0)
        throw ConfigError("circle_arc: radius must be positive");
    BoundaryArc a;
    a.kind = BoundaryArc::Kind::Circle;
    a.center = center;
    a.radius = radius;
    a.t0 = a0;
    a.t1 = a1;
    a.tag = tag;
    a.inward = inward;
    return a;
}

BoundaryArc segment_arc(const Vec2& p, const Vec2& q, BcTag tag) {
    if ((q - p).norm() == 0)
        throw ConfigError("segment_arc: endpoints coincide");
    BoundaryArc a;
    a.kind = BoundaryArc::Kind::Segment;
    a.p0 = p;
    a.p1 = q;
    a.t0 = 0;
    a.t1 = 1;
    a.tag = tag;
    return a;
}

std::vector<Vec2> DomainBoundary::transition_points() const {
    std::vector<Vec2> pts;
    for (const auto& a : arcs)
        pts.push_back(a.position(a.t0));
    return pts;
}

void DomainBoundary::validate(double tol) const {
    if (arcs.empty())
        throw ConfigError("domain boundary has no arcs");
    const size_t n = arcs.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& a = arcs[i];
        const auto& b = arcs[(i + 1) % n];
        double gap = (a.position(a.t1) - b.position(b.t0)).norm();
        if (gap > tol) {
            std::ostringstream msg;
            msg << "domain boundary not closed: arc " << i << " ends "
                << gap << " away from the start of arc " << (i + 1) % n;
            throw ConfigError(msg.str());
        }
    }
}

FootPoint foot_of_perpendicular(const BoundaryArc& arc, const Vec2& M,
                                const Vec2& n_T, const ParamInterval& bracket) {
    Vec2 n = n_T.normalized();
    if (arc.kind == BoundaryArc::Kind::Segment) {
        // M + s n = p0 + t (p1 - p0)
        Vec2 d = arc.p1 - arc.p0;
        double det = cross2(d, n);
        if (std::abs(det) < 1e-14 * d.norm())
            throw NoIntersection("perpendicular parallel to boundary segment");
        Vec2 rhs = M - arc.p0;
        double t = cross2(rhs, n) / det;
        if (t < bracket.lo - 1e-12 || t > bracket.hi + 1e-12)
            throw NoIntersection("perpendicular misses boundary segment");
        FootPoint f;
        f.t = t;
        f.N = arc.position(t);
        f.offset = (f.N - M).dot(n);
        f.normal = arc.outward_normal(t);
        return f;
    }

    // circle: |M + s n - c|^2 = r^2, a quadratic in s
    Vec2 w = M - arc.center;
    double b = w.dot(n);
    double c = w.squaredNorm() - arc.radius * arc.radius;
    double disc = b * b - c;
    if (disc < 0)
        throw NoIntersection("perpendicular misses boundary circle");
    double sq = std::sqrt(disc);
    FootPoint best;
    bool found = false;
    for (double s : {-b - sq, -b + sq}) {
        Vec2 N = M + s * n;
        double t = arc.param_of(N);
        if (t < bracket.lo - 1e-12 || t > bracket.hi + 1e-12)
            continue;
        if (!found || std::abs(s) < std::abs(best.offset)) {
            best.N = N;
            best.t = t;
            best.offset = s;
            best.normal = arc.outward_normal(t);
            found = true;
        }
    }
    if (!found)
        throw NoIntersection("perpendicular misses boundary arc inside bracket");
    return best;
}

FootPoint foot_of_perpendicular_generic(const BoundaryArc& arc, const Vec2& M,
                                        const Vec2& n_T, const ParamInterval& bracket) {
    Vec2 n = n_T.normalized();
    // g(t) = cross(position(t) - M, n) vanishes where position(t) is on the line M + s n
    auto g = [&](double t) { return cross2(arc.position(t) - M, n); };
    auto dg = [&](double t) {
        Vec2 v = arc.kind == BoundaryArc::Kind::Circle
                     ? Vec2(arc.radius * Vec2(-std::sin(t), std::cos(t)))
                     : Vec2(arc.p1 - arc.p0);
        return cross2(v, n);
    };

    double lo = bracket.lo, hi = bracket.hi;
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0)
        hi = lo;
    else if (ghi == 0.0)
        lo = hi;
    else if (glo * ghi > 0)
        throw NoIntersection("no sign change of the perpendicularity residual in bracket");

    double t = 0.5 * (lo + hi);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        double gt = g(t);
        if (std::abs(gt) < 1e-15) {
            converged = true;
            break;
        }
        if (gt * glo < 0)
            hi = t;
        else {
            lo = t;
            glo = gt;
        }
        double d = dg(t);
        double tn = d != 0 ? t - gt / d : t;
        if (!(tn > lo && tn < hi))
            tn = 0.5 * (lo + hi); // Newton left the bracket: bisect
        if (std::abs(tn - t) < 1e-15 * (1 + std::abs(t))) {
            t = tn;
            converged = true;
            break;
        }
        t = tn;
    }
    if (!converged && hi - lo > 1e-12)
        throw NonConvergence("foot-of-perpendicular iteration did not converge");

    FootPoint f;
    f.t = t;
    f.N = arc.position(t);
    f.offset = (f.N - M).dot(n);
    f.normal = arc.outward_normal(t);
    return f;
}

std::pair<double, double> max_gap_and_normal_deviation(const Mesh& mesh,
                                                       const DomainBoundary& domain) {
    double gap = 0, dev = 0;
    const int samples = 9;
    for (const auto& be : mesh.boundary_edges) {
        const auto& e = mesh.edges[be.edge];
        const auto& arc = domain.arcs[be.arc];
        Vec2 a = mesh.vertices[e[0]], b = mesh.vertices[e[1]];
        Vec2 n = rot_cw((b - a).normalized());
        ParamInterval br{arc.tmin(), arc.tmax()};
        for (int i = 0; i < samples; ++i) {
            double s = (i + 1.0) / (samples + 1.0);
            Vec2 M = a + s * (b - a);
            FootPoint f = foot_of_perpendicular(arc, M, n, br);
            gap = std::max(gap, std::abs(f.offset));
            Vec2 nt = f.normal.dot(n) >= 0 ? n : Vec2(-n);
            dev = std::max(dev, (f.normal - nt).norm());
        }
    }
    return {gap, dev};
}

namespace {

BcTag parse_tag(const std::string& s) {
    if (s == "dirichlet")
        return BcTag::Dirichlet;
    if (s == "flux")
        return BcTag::Flux;
    throw ConfigError("unknown boundary tag '" + s + "'");
}

const char* tag_name(BcTag t) {
    return t == BcTag::Dirichlet ? "dirichlet" : "flux";
}

} // namespace

DomainBoundary read_domain(std::istream& in) {
    DomainBoundary dom;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind) || kind[0] == '#')
            continue;
        if (kind == "circle") {
            double cx, cy, r, a0, a1;
            std::string tag, side;
            if (!(ls >> cx >> cy >> r >> a0 >> a1 >> tag >> side))
                throw ConfigError("malformed circle line: " + line);
            if (side != "inward" && side != "outward")
                throw ConfigError("circle side must be 'inward' or 'outward'");
            dom.arcs.push_back(
                circle_arc({cx, cy}, r, a0, a1, parse_tag(tag), side == "inward"));
        } else if (kind == "segment") {
            double x0, y0, x1, y1;
            std::string tag;
            if (!(ls >> x0 >> y0 >> x1 >> y1 >> tag))
                throw ConfigError("malformed segment line: " + line);
            dom.arcs.push_back(segment_arc({x0, y0}, {x1, y1}, parse_tag(tag)));
        } else {
            throw ConfigError("unknown boundary record '" + kind + "'");
        }
    }
    dom.validate();
    return dom;
}

void write_domain(std::ostream& out, const DomainBoundary& domain) {
    out << std::setprecision(17);
    for (const auto& a : domain.arcs) {
        if (a.kind == BoundaryArc::Kind::Circle)
            out << "circle " << a.center.x() << ' ' << a.center.y() << ' ' << a.radius
                << ' ' << a.t0 << ' ' << a.t1 << ' ' << tag_name(a.tag) << ' '
                << (a.inward ? "inward" : "outward") << '\n';
        else
            out << "segment " << a.p0.x() << ' ' << a.p0.y() << ' ' << a.p1.x() << ' '
                << a.p1.y() << ' ' << tag_name(a.tag) << '\n';
    }
}

DomainBoundary read_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open domain file '" + path + "'");
    return read_domain(in);
}

void write_domain_file(const std::string& path, const DomainBoundary& domain) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write domain file '" + path + "'");
    write_domain(out, domain);
}

} // namespace curvedrt
