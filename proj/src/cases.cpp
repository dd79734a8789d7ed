#include "curvedrt/cases.hpp"

#include <cmath>

namespace curvedrt {

std::vector<std::string> case_names() {
    return {"annulus-quarter", "square-patch", "square-neumann", "disk-dirichlet"};
}

TestCase make_case(const std::string& name) {
    TestCase c;
    c.name = name;
    if (name == "annulus-quarter") {
        // quarter annulus 1/2 <= r <= 1: u = (r^2 - 2r + 3/4)/2, radial flux
        // (r-1) r_hat vanishing on the outer circle and the radial cuts
        c.domain = quarter_annulus_domain();
        c.make_mesh = [](int m) { return generate_quarter_annulus(1 << m); };
        c.u = [](const Vec2& x) {
            double r = x.norm();
            return 0.5 * (r * r - 2 * r + 0.75);
        };
        c.p = [](const Vec2& x) {
            double r = x.norm();
            return Vec2((r - 1) / r * x);
        };
        c.div_p = [](const Vec2& x) { return 2 - 1 / x.norm(); };
        c.f = [](const Vec2& x) { return 1 / x.norm() - 2; };
    } else if (name == "square-patch") {
        // flux linear in y: reproduced exactly by the k = 1 spaces
        c.domain = unit_square_domain(BcTag::Dirichlet, BcTag::Flux, BcTag::Dirichlet,
                                      BcTag::Flux);
        c.make_mesh = [dom = c.domain](int m) {
            Mesh s = generate_unit_square(1 << m);
            assign_boundary(s, dom);
            return s;
        };
        c.u = [](const Vec2& x) { return x.y() - x.y() * x.y(); };
        c.p = [](const Vec2& x) { return Vec2(0.0, 1 - 2 * x.y()); };
        c.div_p = [](const Vec2&) { return -2.0; };
        c.f = [](const Vec2&) { return 2.0; };
    } else if (name == "square-neumann") {
        // zero flux on the whole boundary; the multiplier is fixed to zero mean
        c.domain =
            unit_square_domain(BcTag::Flux, BcTag::Flux, BcTag::Flux, BcTag::Flux);
        c.make_mesh = [dom = c.domain](int m) {
            Mesh s = generate_unit_square(1 << m);
            assign_boundary(s, dom);
            return s;
        };
        c.u = [](const Vec2& x) { return std::cos(M_PI * x.x()) * std::cos(M_PI * x.y()); };
        c.p = [](const Vec2& x) {
            return Vec2(-M_PI * std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()),
                        -M_PI * std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()));
        };
        c.div_p = [](const Vec2& x) {
            return -2 * M_PI * M_PI * std::cos(M_PI * x.x()) * std::cos(M_PI * x.y());
        };
        c.f = [](const Vec2& x) {
            return 2 * M_PI * M_PI * std::cos(M_PI * x.x()) * std::cos(M_PI * x.y());
        };
    } else if (name == "disk-dirichlet") {
        // curved boundary, Dirichlet everywhere: no trial-space modification
        c.domain = unit_disk_domain();
        c.make_mesh = [](int m) { return generate_unit_disk(1 << m); };
        c.u = [](const Vec2& x) { return 0.25 * (1 - x.squaredNorm()); };
        c.p = [](const Vec2& x) { return Vec2(-0.5 * x); };
        c.div_p = [](const Vec2&) { return -1.0; };
        c.f = [](const Vec2&) { return 1.0; };
    } else {
        throw ConfigError("unknown case '" + name + "'");
    }
    return c;
}

} // namespace curvedrt
