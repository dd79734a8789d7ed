#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curvedrt/mesh.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace curvedrt;

TEST_CASE("quarter annulus: counts by enumeration") {
    // the generating grid has L^2 - (L/2)^2 cells of two triangles each
    for (int L : {2, 4, 8}) {
        Mesh m = generate_quarter_annulus(L);
        int H = L / 2;
        int cells = L * L - H * H;
        CHECK(m.n_triangles() == 2 * cells);
        CHECK(m.n_vertices() == (L + 1) * (L + 1) - H * H);
        // Euler: E = V + T - 1 for a simply connected triangulation
        CHECK(m.n_edges() == m.n_vertices() + m.n_triangles() - 1);
        // boundary: 2L outer, L inner, L/2 on each straight cut
        CHECK(static_cast<int>(m.boundary_edges.size()) == 2 * L + L + 2 * H);
    }
    CHECK(generate_quarter_annulus(4).n_triangles() == 24);
    CHECK_THROWS_AS(generate_quarter_annulus(3), ConfigError);
    CHECK_THROWS_AS(generate_quarter_annulus(0), ConfigError);
}

TEST_CASE("quarter annulus: boundary vertices exactly on the circles") {
    Mesh m = generate_quarter_annulus(8);
    DomainBoundary dom = quarter_annulus_domain();
    for (const auto& be : m.boundary_edges) {
        const auto& arc = dom.arcs[be.arc];
        if (arc.kind != BoundaryArc::Kind::Circle)
            continue;
        for (int v : m.edges[be.edge])
            CHECK(std::abs(m.vertices[v].norm() - arc.radius) < 1e-13);
    }
    // every mesh point stays inside the annulus bounds
    for (const auto& v : m.vertices) {
        CHECK(v.norm() > 0.5 - 1e-13);
        CHECK(v.norm() < 1.0 + 1e-13);
        CHECK(v.x() > -1e-13);
        CHECK(v.y() > -1e-13);
    }
}

TEST_CASE("quarter annulus: validation and quasi-uniformity across the family") {
    double prev_h = 0;
    for (int L = 2; L <= 64; L *= 2) {
        Mesh m = generate_quarter_annulus(L);
        CHECK_NOTHROW(m.validate());
        if (prev_h > 0) {
            CHECK(prev_h / m.h > 1.8);
            CHECK(prev_h / m.h < 2.2);
        }
        prev_h = m.h;
    }
}

TEST_CASE("unit square: counts") {
    Mesh m1 = generate_unit_square(1);
    CHECK(m1.n_triangles() == 2);
    CHECK(m1.n_edges() == 5);
    Mesh m2 = generate_unit_square(2);
    CHECK(m2.n_triangles() == 8);
    CHECK(m2.n_vertices() == 9);
    CHECK(m2.n_edges() == 16);
    CHECK(m2.boundary_edges.size() == 8);
    CHECK_NOTHROW(m2.validate());
    CHECK_THROWS_AS(generate_unit_square(0), ConfigError);
}

TEST_CASE("unit disk: boundary on the circle, family validates") {
    for (int n : {2, 4, 8}) {
        Mesh m = generate_unit_disk(n);
        CHECK_NOTHROW(m.validate());
        for (const auto& be : m.boundary_edges)
            for (int v : m.edges[be.edge])
                CHECK(std::abs(m.vertices[v].norm() - 1.0) < 1e-13);
        CHECK(m.n_triangles() == 2 * (2 * n) * (2 * n));
        // no triangle with three vertices on the circle
        DomainBoundary dom = unit_disk_domain();
        CHECK_NOTHROW(classify_boundary(m, dom));
    }
}

TEST_CASE("classification on the annulus") {
    Mesh m = generate_quarter_annulus(4);
    DomainBoundary dom = quarter_annulus_domain();
    BoundaryClassification cls = classify_boundary(m, dom);
    CHECK_FALSE(cls.all_flux);
    CHECK(static_cast<int>(cls.dirichlet_sides.size()) == 4); // inner circle edges

    int flux_edges = 0, corner_tris = 0;
    for (const auto& ft : cls.flux_tris) {
        flux_edges += static_cast<int>(ft.bedges.size());
        if (ft.bedges.size() == 2)
            ++corner_tris;
        CHECK(cls.flux_tri_of_tri[ft.tri] >= 0);
    }
    CHECK(flux_edges == 2 * 4 + 2 + 2); // outer circle + both straight cuts
    CHECK(corner_tris == 2);            // at (1,0) and (0,1)

    // outer-circle triangles are convex-side, inner-circle Dirichlet ones get no sign
    for (const auto& ft : cls.flux_tris) {
        bool curved = false;
        for (int b : ft.bedges)
            if (dom.arcs[m.boundary_edges[b].arc].kind == BoundaryArc::Kind::Circle)
                curved = true;
        if (curved)
            CHECK(cls.sigma[ft.tri] == 1);
        else
            CHECK(cls.sigma[ft.tri] == 0);
    }
    for (const auto& side : cls.dirichlet_sides)
        CHECK(cls.sigma[side.tri] == 0);
}

TEST_CASE("classification: concave side sign") {
    // swap the tags so the inner (concave) circle carries the flux condition
    DomainBoundary dom;
    dom.arcs.push_back(circle_arc({0, 0}, 1.0, 0.0, M_PI / 2, BcTag::Dirichlet, false));
    dom.arcs.push_back(segment_arc({0, 1}, {0, 0.5}, BcTag::Dirichlet));
    dom.arcs.push_back(circle_arc({0, 0}, 0.5, M_PI / 2, 0.0, BcTag::Flux, true));
    dom.arcs.push_back(segment_arc({0.5, 0}, {1, 0}, BcTag::Dirichlet));
    Mesh m = generate_quarter_annulus(4);
    assign_boundary(m, dom);
    BoundaryClassification cls = classify_boundary(m, dom);
    for (const auto& ft : cls.flux_tris)
        CHECK(cls.sigma[ft.tri] == -1);
}

TEST_CASE("classification: all-flux square") {
    Mesh m = generate_unit_square(2);
    DomainBoundary dom =
        unit_square_domain(BcTag::Flux, BcTag::Flux, BcTag::Flux, BcTag::Flux);
    assign_boundary(m, dom);
    BoundaryClassification cls = classify_boundary(m, dom);
    CHECK(cls.all_flux);
    CHECK(cls.dirichlet_sides.empty());
    for (const auto& ft : cls.flux_tris)
        CHECK(cls.sigma[ft.tri] == 0);
}

TEST_CASE("three vertices on a curved arc are rejected") {
    // a single triangle inscribed in the unit circle
    Mesh m;
    m.vertices = {Vec2(1, 0), Vec2(std::cos(2 * M_PI / 3), std::sin(2 * M_PI / 3)),
                  Vec2(std::cos(4 * M_PI / 3), std::sin(4 * M_PI / 3))};
    m.triangles = {{0, 1, 2}};
    m.finalize();
    DomainBoundary dom = unit_disk_domain();
    assign_boundary(m, dom);
    CHECK_THROWS_AS(classify_boundary(m, dom), ThreeBoundaryVertices);
}

TEST_CASE("mesh connectivity invariants") {
    Mesh m = generate_quarter_annulus(4);
    // edges sorted lexicographically and unique
    for (int e = 1; e < m.n_edges(); ++e)
        CHECK(m.edges[e - 1] < m.edges[e]);
    // each edge has one or two adjacent triangles; boundary edges exactly one
    for (int e = 0; e < m.n_edges(); ++e) {
        CHECK(m.edge_tris[e][0] >= 0);
        bool boundary = m.bedge_of_edge[e] >= 0;
        CHECK((m.edge_tris[e][1] < 0) == boundary);
    }
    // tri_edges agrees with edge_index
    for (int t = 0; t < m.n_triangles(); ++t)
        for (int l = 0; l < 3; ++l)
            CHECK(m.tri_edges[t][l] ==
                  m.edge_index(m.triangles[t][l], m.triangles[t][(l + 1) % 3]));
    // all triangles counter-clockwise
    for (int t = 0; t < m.n_triangles(); ++t)
        CHECK(m.tri_area(t) > 0);
}

TEST_CASE("mesh file round trip") {
    Mesh m = generate_quarter_annulus(4);
    std::stringstream ss;
    write_mesh(ss, m);
    Mesh back = read_mesh(ss);
    REQUIRE(back.n_vertices() == m.n_vertices());
    REQUIRE(back.n_triangles() == m.n_triangles());
    REQUIRE(back.boundary_edges.size() == m.boundary_edges.size());
    for (int v = 0; v < m.n_vertices(); ++v)
        CHECK((back.vertices[v] - m.vertices[v]).norm() == 0.0);
    for (size_t b = 0; b < m.boundary_edges.size(); ++b) {
        CHECK(back.boundary_edges[b].edge == m.boundary_edges[b].edge);
        CHECK(back.boundary_edges[b].arc == m.boundary_edges[b].arc);
        CHECK(back.boundary_edges[b].tag == m.boundary_edges[b].tag);
    }

    std::stringstream bad("mesh 3 1 2\nv 0 0\nv 1 0\nv 0 1\nt 0 1 5\n");
    CHECK_THROWS_AS(read_mesh(bad), ConfigError);
    std::stringstream bad2("grid 3 1 2\n");
    CHECK_THROWS_AS(read_mesh(bad2), ConfigError);
}

TEST_CASE("degenerate meshes rejected by validate") {
    Mesh m;
    m.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    m.triangles = {{0, 2, 1}}; // clockwise
    m.finalize();
    CHECK_THROWS_AS(m.validate(), Error);

    Mesh sliver;
    sliver.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0.5, 1e-4)};
    sliver.triangles = {{0, 1, 2}};
    sliver.finalize();
    CHECK_THROWS_AS(sliver.validate(), Error);
}
