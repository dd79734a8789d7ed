#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curvedrt/pg_spaces.hpp"

#include <cmath>

using namespace curvedrt;

TEST_CASE("dof counts against direct enumeration") {
    // quarter annulus, L = 2: 6 triangles, 13 edges, 6 flux boundary edges
    Mesh m = generate_quarter_annulus(2);
    DomainBoundary dom = quarter_annulus_domain();
    assign_boundary(m, dom);

    GlobalDofMap d0 = build_test_space(m, 0);
    CHECK(d0.n_flux == 13);
    CHECK(d0.n_flux_free == 7);
    CHECK(d0.n_pressure == 6);

    GlobalDofMap d1 = build_test_space(m, 1);
    CHECK(d1.n_flux == 2 * 13 + 2 * 6);     // 2 per edge + 2 interior per triangle
    CHECK(d1.n_flux_free == 2 * 7 + 2 * 6); // 6 flux edges constrained
    CHECK(d1.n_pressure == 3 * 6);

    // constrained dofs are exactly the flux-boundary edge dofs
    long nconstr = 0;
    for (long i = 0; i < d1.n_flux; ++i)
        if (d1.free_of_flux[i] < 0)
            ++nconstr;
    CHECK(nconstr == d1.n_flux - d1.n_flux_free);
    for (const BoundaryEdge& be : m.boundary_edges)
        if (be.tag == BcTag::Flux)
            for (int q = 0; q < 2; ++q)
                CHECK(d1.free_of_flux[d1.edge_dof(be.edge, q)] == -1);
}

TEST_CASE("free indices are a bijection onto [0, n_flux_free)") {
    Mesh m = generate_quarter_annulus(4);
    DomainBoundary dom = quarter_annulus_domain();
    assign_boundary(m, dom);
    GlobalDofMap d = build_test_space(m, 1);
    std::vector<int> seen(d.n_flux_free, 0);
    for (long i = 0; i < d.n_flux; ++i)
        if (d.free_of_flux[i] >= 0) {
            REQUIRE(d.free_of_flux[i] < d.n_flux_free);
            ++seen[d.free_of_flux[i]];
        }
    for (int s : seen)
        CHECK(s == 1);
}

TEST_CASE("pressure basis: duality and partition of unity") {
    for (int k : {0, 1, 2}) {
        PressureBasis pb = pressure_basis(k);
        CHECK(pb.dim() == (k + 1) * (k + 2) / 2);
        for (int i = 0; i < pb.dim(); ++i)
            for (int j = 0; j < pb.dim(); ++j)
                CHECK(pb.eval(j, pb.nodes[i]) ==
                      doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-11));
        // partition of unity at an arbitrary point
        Vec2 x(0.31, 0.17);
        double s = 0;
        for (int j = 0; j < pb.dim(); ++j)
            s += pb.eval(j, x);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("modified elements reduce to the identity on a straight boundary") {
    Mesh m = generate_unit_square(2);
    DomainBoundary dom = unit_square_domain(BcTag::Flux, BcTag::Flux, BcTag::Flux,
                                            BcTag::Flux);
    assign_boundary(m, dom);
    Discretization d = discretize(m, dom, 1);
    REQUIRE(!d.modified.empty());
    for (const ModifiedElement& me : d.modified) {
        CHECK(me.deviation() <= 1e-12);
        CHECK(me.cond_estimate() < 1.0 + 1e-10);
    }
}

TEST_CASE("modified elements on the curved boundary") {
    for (int k : {0, 1}) {
        Mesh m = generate_quarter_annulus(4);
        DomainBoundary dom = quarter_annulus_domain();
        assign_boundary(m, dom);
        Discretization d = discretize(m, dom, k);
        REQUIRE(d.modified.size() == d.cls.flux_tris.size());
        for (const ModifiedElement& me : d.modified) {
            CHECK(me.deviation() < 0.5);
            CHECK(me.cond_estimate() < 1e3);
            int n = static_cast<int>(me.E_tilde.rows());
            CHECK((me.E_inv * me.E_tilde - Eigen::MatrixXd::Identity(n, n)).norm() <
                  1e-10);
            // every foot lies on the true boundary and nu is unit
            for (size_t i = 0; i < me.N.size(); ++i) {
                bool on_arc = false;
                for (const BoundaryArc& a : dom.arcs)
                    if (a.kind == BoundaryArc::Kind::Circle &&
                        std::abs((me.N[i] - a.center).norm() - a.radius) < 1e-10)
                        on_arc = true;
                    else if (a.kind == BoundaryArc::Kind::Segment &&
                             std::abs(cross2(me.N[i] - a.p0, a.p1 - a.p0)) < 1e-10)
                        on_arc = true;
                CHECK(on_arc);
                CHECK(me.nu[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("deviation of the modified elements halves with the mesh size") {
    DomainBoundary dom = quarter_annulus_domain();
    double prev = 0;
    for (int L : {4, 8, 16}) {
        Mesh m = generate_quarter_annulus(L);
        assign_boundary(m, dom);
        Discretization d = discretize(m, dom, 1);
        double dev = 0;
        for (const ModifiedElement& me : d.modified)
            dev = std::max(dev, me.deviation());
        CHECK(dev > 0);
        if (prev > 0) {
            double ratio = prev / dev;
            CHECK(ratio > 1.7);
            CHECK(ratio < 2.3);
        }
        prev = dev;
    }
}

TEST_CASE("modified trial basis vanishes at the boundary feet") {
    Mesh m = generate_quarter_annulus(4);
    DomainBoundary dom = quarter_annulus_domain();
    assign_boundary(m, dom);
    for (int k : {0, 1}) {
        Discretization d = discretize(m, dom, k);
        for (size_t f = 0; f < d.cls.flux_tris.size(); ++f) {
            const ModifiedElement& me = d.modified[f];
            const ElementBasis& eb = d.basis[me.tri];
            // column j of coeff * E_inv is the modified basis field j; for every
            // free dof j its normal trace at each foot N_i must vanish
            Eigen::MatrixXd C = eb.coeff * me.E_inv;
            for (int j = 0; j < eb.dim(); ++j) {
                bool constrained = false;
                for (int r : me.row)
                    if (r == j)
                        constrained = true;
                if (constrained)
                    continue;
                for (size_t i = 0; i < me.N.size(); ++i) {
                    double v = eb.eval(C.col(j), me.N[i]).dot(me.nu[i]);
                    CHECK(std::abs(v) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("test interpolant reproduces a global flux polynomial exactly") {
    Mesh m = generate_quarter_annulus(4);
    DomainBoundary dom = quarter_annulus_domain();
    assign_boundary(m, dom);
    Discretization d = discretize(m, dom, 1);
    VectorField p = [](const Vec2& x) {
        // affine part plus (x,y) * (0.5 y), which lies in the k = 1 flux span
        return Vec2(1.0 + 2.0 * x.x() - x.y() + 0.5 * x.x() * x.y(),
                    -3.0 + x.x() + 4.0 * x.y() + 0.5 * x.y() * x.y());
    };
    // this field lies in the k=1 flux space on every triangle
    Eigen::VectorXd dofs = interpolate_test(d, p);
    for (int t = 0; t < m.n_triangles(); ++t) {
        auto tc = m.tri_coords(t);
        Vec2 x = (tc[0] + tc[1] + tc[2]) / 3.0 + 0.1 * (tc[0] - tc[2]);
        Vec2 v = d.eval_flux(dofs, t, x, false);
        CHECK((v - p(x)).norm() < 1e-10);
    }
}

TEST_CASE("test interpolant matches the canonical moments (quadrature oracle)") {
    Mesh m = generate_quarter_annulus(2);
    DomainBoundary dom = quarter_annulus_domain();
    assign_boundary(m, dom);
    Discretization d = discretize(m, dom, 1);
    VectorField f = [](const Vec2& x) {
        return Vec2(std::sin(x.x()), std::cos(x.y()));
    };
    Eigen::VectorXd dofs = interpolate_test(d, f);
    GaussRule g = gauss_legendre(10);
    // edge moments of (interpolant - f).n vanish against Legendre degree <= k
    for (int e = 0; e < m.n_edges(); ++e) {
        Vec2 lo = m.vertices[m.edges[e][0]], hi = m.vertices[m.edges[e][1]];
        Vec2 dvec = hi - lo;
        Vec2 n = rot_cw(dvec.normalized());
        int t = m.edge_tris[e][0];
        for (int mm = 0; mm <= 1; ++mm) {
            double acc = 0;
            for (size_t q = 0; q < g.nodes.size(); ++q) {
                Vec2 x = lo + g.nodes[q] * dvec;
                Vec2 diff = d.eval_flux(dofs, t, x, false) - f(x);
                acc += g.weights[q] * diff.dot(n) * legendre01(mm, g.nodes[q]);
            }
            CHECK(std::abs(acc) < 1e-11);
        }
    }
    // interior moments against [P_0]^2 vanish
    TriangleRule r = triangle_rule(12);
    for (int t = 0; t < m.n_triangles(); ++t) {
        PiolaMap F = d.tri_map(t);
        Vec2 acc(0, 0);
        for (size_t q = 0; q < r.points.size(); ++q) {
            Vec2 x = F.to_physical(r.points[q]);
            acc += r.weights[q] * std::abs(F.detB) *
                   (d.eval_flux(dofs, t, x, false) - f(x));
        }
        CHECK(acc.norm() < 1e-11);
    }
}

TEST_CASE("interpolation commutes with the divergence") {
    // div of the test interpolant equals the elementwise L2 projection of div f
    Mesh m = generate_quarter_annulus(4);
    DomainBoundary dom = quarter_annulus_domain();
    assign_boundary(m, dom);
    for (int k : {0, 1}) {
        Discretization d = discretize(m, dom, k);
        VectorField f = [](const Vec2& x) {
            return Vec2(std::sin(x.x()) * x.y(), std::exp(0.3 * x.x()) - x.y() * x.y());
        };
        ScalarField divf = [](const Vec2& x) {
            return std::cos(x.x()) * x.y() - 2.0 * x.y();
        };
        Eigen::VectorXd dofs = interpolate_test(d, f);
        TriangleRule r = triangle_rule(14);
        int np = d.pbasis.dim();
        for (int t = 0; t < m.n_triangles(); ++t) {
            PiolaMap F = d.tri_map(t);
            // dense normal-equations projection of div f onto P_k on this triangle
            Eigen::MatrixXd G = Eigen::MatrixXd::Zero(np, np);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np);
            for (size_t q = 0; q < r.points.size(); ++q) {
                Eigen::VectorXd phi(np);
                for (int j = 0; j < np; ++j)
                    phi(j) = d.pbasis.eval(j, r.points[q]);
                double w = r.weights[q] * std::abs(F.detB);
                G += w * phi * phi.transpose();
                rhs += w * divf(F.to_physical(r.points[q])) * phi;
            }
            Eigen::VectorXd proj = G.ldlt().solve(rhs);
            // compare at a few interior points
            for (const Vec2& xhat : {Vec2(0.2, 0.2), Vec2(0.5, 0.25), Vec2(0.1, 0.6)}) {
                double ip = 0;
                for (int j = 0; j < np; ++j)
                    ip += proj(j) * d.pbasis.eval(j, xhat);
                double dv = d.eval_flux_div(dofs, t, F.to_physical(xhat), false);
                CHECK(dv == doctest::Approx(ip).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("trial interpolant zeroes the constrained slots") {
    Mesh m = generate_quarter_annulus(4);
    DomainBoundary dom = quarter_annulus_domain();
    assign_boundary(m, dom);
    Discretization d = discretize(m, dom, 1);
    VectorField f = [](const Vec2& x) { return Vec2(x.y(), -x.x()); };
    Eigen::VectorXd tr = interpolate_trial(d, f);
    Eigen::VectorXd te = interpolate_test(d, f);
    for (long i = 0; i < d.dofs.n_flux; ++i) {
        if (d.dofs.free_of_flux[i] < 0)
            CHECK(tr(i) == 0.0);
        else
            CHECK(tr(i) == doctest::Approx(te(i)).epsilon(1e-13));
    }
}

TEST_CASE("multiplier projection") {
    Mesh m = generate_unit_square(3);
    DomainBoundary dom = unit_square_domain(BcTag::Dirichlet, BcTag::Flux,
                                            BcTag::Dirichlet, BcTag::Flux);
    assign_boundary(m, dom);
    Discretization d = discretize(m, dom, 1);

    // P_1 functions are reproduced exactly by both projections
    ScalarField lin = [](const Vec2& x) { return 2.0 - x.x() + 3.0 * x.y(); };
    for (auto which : {MultiplierProjection::L2, MultiplierProjection::Lattice}) {
        Eigen::VectorXd c = project_multiplier(d, lin, which);
        for (int t = 0; t < m.n_triangles(); ++t) {
            PiolaMap F = d.tri_map(t);
            Vec2 x = F.to_physical({0.37, 0.21});
            CHECK(d.eval_pressure(c, t, x) == doctest::Approx(lin(x)).epsilon(1e-11));
        }
    }

    // L2 projection of a quadratic against a dense normal-equations oracle
    ScalarField u = [](const Vec2& x) { return x.y() - x.y() * x.y(); };
    Eigen::VectorXd c = project_multiplier(d, u, MultiplierProjection::L2);
    TriangleRule r = triangle_rule(10);
    int np = d.pbasis.dim();
    for (int t = 0; t < m.n_triangles(); ++t) {
        PiolaMap F = d.tri_map(t);
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(np, np);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np);
        for (size_t q = 0; q < r.points.size(); ++q) {
            Eigen::VectorXd phi(np);
            for (int j = 0; j < np; ++j)
                phi(j) = d.pbasis.eval(j, r.points[q]);
            double w = r.weights[q] * std::abs(F.detB);
            G += w * phi * phi.transpose();
            rhs += w * u(F.to_physical(r.points[q])) * phi;
        }
        Eigen::VectorXd proj = G.ldlt().solve(rhs);
        Vec2 x = F.to_physical({0.3, 0.3});
        double oracle = 0;
        for (int j = 0; j < np; ++j)
            oracle += proj(j) * d.pbasis.eval(j, {0.3, 0.3});
        CHECK(d.eval_pressure(c, t, x) == doctest::Approx(oracle).epsilon(1e-10));
    }

    // zero-mean lattice projection has (numerically) zero mean
    DomainBoundary fdom = unit_square_domain(BcTag::Flux, BcTag::Flux, BcTag::Flux,
                                             BcTag::Flux);
    Mesh fm = generate_unit_square(3);
    assign_boundary(fm, fdom);
    Discretization fd = discretize(fm, fdom, 1);
    Eigen::VectorXd cz = project_multiplier(fd, u, MultiplierProjection::LatticeZeroMean);
    CHECK(std::abs(pressure_mean(fd, cz)) < 1e-13);
}

TEST_CASE("polygonal trial mode keeps the unmodified basis") {
    Mesh m = generate_quarter_annulus(4);
    DomainBoundary dom = quarter_annulus_domain();
    assign_boundary(m, dom);
    Discretization d = discretize(m, dom, 1, TrialMode::Polygonal);
    VectorField f = [](const Vec2& x) { return Vec2(x.x() * x.y(), 1.0 - x.x()); };
    Eigen::VectorXd dofs = interpolate_test(d, f);
    // free dofs only, constrained slots zero
    for (long i = 0; i < d.dofs.n_flux; ++i)
        if (d.dofs.free_of_flux[i] < 0)
            dofs(i) = 0;
    for (int t = 0; t < m.n_triangles(); ++t) {
        PiolaMap F = d.tri_map(t);
        Vec2 x = F.to_physical({0.25, 0.25});
        CHECK((d.eval_flux(dofs, t, x, true) - d.eval_flux(dofs, t, x, false)).norm() <
              1e-13);
    }
}
