#pragma once

#include "curvedrt/geometry.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <vector>

namespace curvedrt {

struct BoundaryEdge {
    int edge = -1; // index into Mesh::edges
    int arc = -1;  // index into DomainBoundary::arcs
    BcTag tag = BcTag::Dirichlet;
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles; // counter-clockwise

    // derived connectivity (built by finalize)
    std::vector<std::array<int, 2>> edges; // vertex pairs lo < hi, lexicographic order
    std::vector<std::array<int, 3>> tri_edges;
    std::vector<std::array<int, 2>> edge_tris;   // adjacent triangles, -1 if none
    std::vector<BoundaryEdge> boundary_edges;    // sorted by edge index
    std::vector<int> bedge_of_edge;              // edge -> boundary_edges index or -1
    std::vector<double> h_tri;
    double h = 0;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }

    int edge_index(int a, int b) const;
    double tri_area(int t) const;
    std::array<Vec2, 3> tri_coords(int t) const;

    /// Builds edges/adjacency; requires triangles to be set. Boundary edges are
    /// detected but left without arc assignment (see assign_boundary).
    void finalize();

    /// Conformity, positive ccw area, minimum-angle check. Throws Error on failure.
    void validate(double min_angle_deg = 15.0) const;
};

/// Matches every boundary edge of the mesh to the arc of `domain` containing
/// both its endpoints and records the arc's tag. Throws Error when some
/// boundary edge fits no arc.
void assign_boundary(Mesh& mesh, const DomainBoundary& domain, double tol = 1e-9);

/// Quarter annulus 1/2 <= r <= 1, x >= 0, y >= 0. L cells per unit side of the
/// generating square grid (L even, >= 2); gives 3 L^2 / 2 triangles with all
/// boundary vertices exactly on the two circles.
Mesh generate_quarter_annulus(int L);
DomainBoundary quarter_annulus_domain();

/// Unit square (0,1)^2, n x n grid cells split along the (i,j)-(i+1,j+1) diagonal.
Mesh generate_unit_square(int n);
/// Tags in traversal order: bottom (y=0), right (x=1), top (y=1), left (x=0).
DomainBoundary unit_square_domain(BcTag bottom, BcTag right, BcTag top, BcTag left);

/// Unit disk via the max-norm-preserving central projection of a (2n)^2 grid
/// on [-1,1]^2; boundary vertices land exactly on the unit circle.
Mesh generate_unit_disk(int n);
DomainBoundary unit_disk_domain();

struct BoundarySide {
    int tri = -1;
    int local_edge = -1; // slot in tri_edges[tri]: 0=(v0,v1), 1=(v1,v2), 2=(v2,v0)
    int bedge = -1;      // index into Mesh::boundary_edges
};

/// A triangle together with its boundary edges on the flux part of the
/// boundary (corner triangles can have two: one curved, one straight).
struct FluxTriangle {
    int tri = -1;
    std::vector<int> local_edges;
    std::vector<int> bedges; // aligned with local_edges
};

struct BoundaryClassification {
    std::vector<FluxTriangle> flux_tris;
    std::vector<BoundarySide> dirichlet_sides; // one record per Dirichlet edge
    std::vector<int> flux_tri_of_tri;          // tri -> index into flux_tris or -1
    std::vector<int> sigma;                    // per triangle: +1 convex / -1 concave / 0
    bool all_flux = false;                     // every boundary edge has the flux tag
};

/// Splits boundary triangles by tag and computes the convexity sign sigma(T) of
/// each flux triangle. Rejects triangles with all three vertices on one curved
/// arc (the boundary fitting degenerates there).
BoundaryClassification classify_boundary(const Mesh& mesh, const DomainBoundary& domain);

Mesh read_mesh(std::istream& in);
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path);
void write_mesh_file(const std::string& path, const Mesh& mesh);

} // namespace curvedrt
