#include "curvedrt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace curvedrt {

int Mesh::edge_index(int a, int b) const {
    std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key)
        return -1;
    return static_cast<int>(it - edges.begin());
}

double Mesh::tri_area(int t) const {
    auto [a, b, c] = tri_coords(t);
    return 0.5 * cross2(b - a, c - a);
}

std::array<Vec2, 3> Mesh::tri_coords(int t) const {
    const auto& tr = triangles[t];
    return {vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]};
}

void Mesh::finalize() {
    std::map<std::array<int, 2>, int> edge_of;
    edges.clear();
    for (const auto& tr : triangles)
        for (int l = 0; l < 3; ++l) {
            int a = tr[l], b = tr[(l + 1) % 3];
            edge_of.emplace(std::array<int, 2>{std::min(a, b), std::max(a, b)}, 0);
        }
    edges.reserve(edge_of.size());
    for (auto& [key, idx] : edge_of) {
        idx = static_cast<int>(edges.size());
        edges.push_back(key);
    }

    tri_edges.assign(triangles.size(), {-1, -1, -1});
    edge_tris.assign(edges.size(), {-1, -1});
    for (int t = 0; t < n_triangles(); ++t)
        for (int l = 0; l < 3; ++l) {
            int a = triangles[t][l], b = triangles[t][(l + 1) % 3];
            int e = edge_of.at({std::min(a, b), std::max(a, b)});
            tri_edges[t][l] = e;
            if (edge_tris[e][0] < 0)
                edge_tris[e][0] = t;
            else if (edge_tris[e][1] < 0)
                edge_tris[e][1] = t;
            else
                throw Error("edge shared by more than two triangles");
        }

    boundary_edges.clear();
    bedge_of_edge.assign(edges.size(), -1);
    for (int e = 0; e < n_edges(); ++e)
        if (edge_tris[e][1] < 0) {
            bedge_of_edge[e] = static_cast<int>(boundary_edges.size());
            BoundaryEdge be;
            be.edge = e;
            boundary_edges.push_back(be);
        }

    h = 0;
    h_tri.assign(triangles.size(), 0.0);
    for (int t = 0; t < n_triangles(); ++t) {
        auto [a, b, c] = tri_coords(t);
        h_tri[t] = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
        h = std::max(h, h_tri[t]);
    }
}

void Mesh::validate(double min_angle_deg) const {
    for (int t = 0; t < n_triangles(); ++t) {
        if (tri_area(t) <= 0)
            throw Error("triangle " + std::to_string(t) + " is degenerate or clockwise");
        auto [a, b, c] = tri_coords(t);
        Vec2 s[3] = {b - a, c - b, a - c};
        for (int l = 0; l < 3; ++l) {
            Vec2 u = -s[(l + 2) % 3], v = s[l];
            double ang = std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
            if (ang < min_angle_deg * M_PI / 180.0)
                throw Error("triangle " + std::to_string(t) + " has an angle below " +
                            std::to_string(min_angle_deg) + " degrees");
        }
    }
    for (int e = 0; e < n_edges(); ++e)
        if (edge_tris[e][0] < 0)
            throw Error("orphan edge in mesh");
}

void assign_boundary(Mesh& mesh, const DomainBoundary& domain, double tol) {
    for (auto& be : mesh.boundary_edges) {
        const auto& e = mesh.edges[be.edge];
        Vec2 a = mesh.vertices[e[0]], b = mesh.vertices[e[1]];
        be.arc = -1;
        for (int i = 0; i < static_cast<int>(domain.arcs.size()); ++i)
            if (domain.arcs[i].contains(a, tol) && domain.arcs[i].contains(b, tol)) {
                be.arc = i;
                be.tag = domain.arcs[i].tag;
                break;
            }
        if (be.arc < 0)
            throw Error("boundary edge with endpoints not on any boundary arc");
    }
}

Mesh generate_quarter_annulus(int L) {
    if (L < 2 || L % 2 != 0)
        throw ConfigError("quarter annulus: L must be even and >= 2");

    // grid on the unit square minus [0,1/2]^2, mapped so that the max-norm level
    // sets of the square become the circles r = const
    auto map_pt = [](double x, double y) -> Vec2 {
        double m = std::max(x, y);
        double theta = y <= x ? (M_PI / 4.0) * (y / x) : (M_PI / 4.0) * (2.0 - x / y);
        return {m * std::cos(theta), m * std::sin(theta)};
    };

    Mesh mesh;
    std::vector<std::vector<int>> vid(L + 1, std::vector<int>(L + 1, -1));
    int H = L / 2;
    for (int i = 0; i <= L; ++i)
        for (int j = 0; j <= L; ++j) {
            if (i < H && j < H)
                continue; // vertex only touched by removed cells
            vid[i][j] = mesh.n_vertices();
            mesh.vertices.push_back(map_pt(i / double(L), j / double(L)));
        }
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            if (i < H && j < H)
                continue;
            int v00 = vid[i][j], v10 = vid[i + 1][j];
            int v01 = vid[i][j + 1], v11 = vid[i + 1][j + 1];
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    mesh.finalize();
    assign_boundary(mesh, quarter_annulus_domain());
    return mesh;
}

DomainBoundary quarter_annulus_domain() {
    DomainBoundary dom;
    dom.arcs.push_back(circle_arc({0, 0}, 1.0, 0.0, M_PI / 2, BcTag::Flux, false));
    dom.arcs.push_back(segment_arc({0, 1}, {0, 0.5}, BcTag::Flux));
    dom.arcs.push_back(circle_arc({0, 0}, 0.5, M_PI / 2, 0.0, BcTag::Dirichlet, true));
    dom.arcs.push_back(segment_arc({0.5, 0}, {1, 0}, BcTag::Flux));
    dom.validate();
    return dom;
}

Mesh generate_unit_square(int n) {
    if (n < 1)
        throw ConfigError("unit square: n must be >= 1");
    Mesh mesh;
    auto vid = [n](int i, int j) { return i * (n + 1) + j; };
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            mesh.vertices.push_back({i / double(n), j / double(n)});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    mesh.finalize();
    return mesh;
}

DomainBoundary unit_square_domain(BcTag bottom, BcTag right, BcTag top, BcTag left) {
    DomainBoundary dom;
    dom.arcs.push_back(segment_arc({0, 0}, {1, 0}, bottom));
    dom.arcs.push_back(segment_arc({1, 0}, {1, 1}, right));
    dom.arcs.push_back(segment_arc({1, 1}, {0, 1}, top));
    dom.arcs.push_back(segment_arc({0, 1}, {0, 0}, left));
    dom.validate();
    return dom;
}

Mesh generate_unit_disk(int n) {
    if (n < 1)
        throw ConfigError("unit disk: n must be >= 1");
    // central projection preserving the max norm: square ring m = const -> circle r = m
    auto map_pt = [](double x, double y) -> Vec2 {
        double m = std::max(std::abs(x), std::abs(y));
        if (m == 0)
            return {0, 0};
        return m / std::hypot(x, y) * Vec2(x, y);
    };

    Mesh mesh;
    int N = 2 * n;
    auto vid = [N](int i, int j) { return i * (N + 1) + j; };
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            mesh.vertices.push_back(map_pt(i / double(n) - 1.0, j / double(n) - 1.0));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            // split along the diagonal that crosses max-norm rings, so no
            // triangle has all three vertices on one ring (the outermost ring
            // is the boundary circle)
            double mac = std::abs(mesh.vertices[a].norm() - mesh.vertices[c].norm());
            double mbd = std::abs(mesh.vertices[b].norm() - mesh.vertices[d].norm());
            if (mac >= mbd - 1e-14) {
                mesh.triangles.push_back({a, b, c});
                mesh.triangles.push_back({a, c, d});
            } else {
                mesh.triangles.push_back({a, b, d});
                mesh.triangles.push_back({b, c, d});
            }
        }
    mesh.finalize();
    assign_boundary(mesh, unit_disk_domain());
    return mesh;
}

DomainBoundary unit_disk_domain() {
    DomainBoundary dom;
    dom.arcs.push_back(circle_arc({0, 0}, 1.0, 0.0, 2 * M_PI, BcTag::Dirichlet, false));
    return dom;
}

BoundaryClassification classify_boundary(const Mesh& mesh, const DomainBoundary& domain) {
    BoundaryClassification cls;
    cls.flux_tri_of_tri.assign(mesh.n_triangles(), -1);
    cls.sigma.assign(mesh.n_triangles(), 0);
    cls.all_flux = true;

    for (int t = 0; t < mesh.n_triangles(); ++t)
        for (const auto& arc : domain.arcs) {
            if (arc.kind != BoundaryArc::Kind::Circle)
                continue;
            int on = 0;
            for (int v : mesh.triangles[t])
                on += arc.contains(mesh.vertices[v]) ? 1 : 0;
            if (on == 3)
                throw ThreeBoundaryVertices("triangle " + std::to_string(t) +
                                            " has all three vertices on a curved arc");
        }

    for (int b = 0; b < static_cast<int>(mesh.boundary_edges.size()); ++b) {
        const auto& be = mesh.boundary_edges[b];
        if (be.arc < 0)
            throw Error("boundary edge without arc assignment; call assign_boundary first");
        int t = mesh.edge_tris[be.edge][0];
        int l = 0;
        while (mesh.tri_edges[t][l] != be.edge)
            ++l;

        if (be.tag == BcTag::Flux) {
            if (cls.flux_tri_of_tri[t] < 0) {
                cls.flux_tri_of_tri[t] = static_cast<int>(cls.flux_tris.size());
                cls.flux_tris.push_back({t, {}, {}});
            }
            FluxTriangle& ft = cls.flux_tris[cls.flux_tri_of_tri[t]];
            ft.local_edges.push_back(l);
            ft.bedges.push_back(b);

            const auto& arc = domain.arcs[be.arc];
            if (arc.kind == BoundaryArc::Kind::Circle) {
                Vec2 a = mesh.vertices[mesh.triangles[t][l]];
                Vec2 c = mesh.vertices[mesh.triangles[t][(l + 1) % 3]];
                Vec2 n = rot_cw((c - a).normalized()); // outward for ccw triangles
                FootPoint f = foot_of_perpendicular(arc, 0.5 * (a + c), n,
                                                    {arc.tmin(), arc.tmax()});
                cls.sigma[t] = f.offset >= 0 ? 1 : -1;
            }
        } else {
            cls.dirichlet_sides.push_back({t, l, b});
            cls.all_flux = false;
        }
    }
    return cls;
}

Mesh read_mesh(std::istream& in) {
    std::string word;
    int nv, nt, nbe;
    if (!(in >> word >> nv >> nt >> nbe) || word != "mesh")
        throw ConfigError("mesh file: bad header");
    Mesh mesh;
    mesh.vertices.reserve(nv);
    mesh.triangles.reserve(nt);
    struct BeRec {
        int edge, arc;
        std::string tag;
    };
    std::vector<BeRec> recs;
    for (int i = 0; i < nv; ++i) {
        double x, y;
        if (!(in >> word >> x >> y) || word != "v")
            throw ConfigError("mesh file: bad vertex record");
        mesh.vertices.push_back({x, y});
    }
    for (int i = 0; i < nt; ++i) {
        int a, b, c;
        if (!(in >> word >> a >> b >> c) || word != "t")
            throw ConfigError("mesh file: bad triangle record");
        if (a < 0 || b < 0 || c < 0 || a >= nv || b >= nv || c >= nv)
            throw ConfigError("mesh file: vertex index out of range");
        mesh.triangles.push_back({a, b, c});
    }
    for (int i = 0; i < nbe; ++i) {
        BeRec r;
        if (!(in >> word >> r.edge >> r.arc >> r.tag) || word != "be")
            throw ConfigError("mesh file: bad boundary-edge record");
        recs.push_back(r);
    }
    mesh.finalize();
    if (static_cast<int>(mesh.boundary_edges.size()) != nbe)
        throw ConfigError("mesh file: boundary edge count does not match connectivity");
    for (const auto& r : recs) {
        if (r.edge < 0 || r.edge >= mesh.n_edges() || mesh.bedge_of_edge[r.edge] < 0)
            throw ConfigError("mesh file: record names a non-boundary edge");
        auto& be = mesh.boundary_edges[mesh.bedge_of_edge[r.edge]];
        be.arc = r.arc;
        if (r.tag == "dirichlet")
            be.tag = BcTag::Dirichlet;
        else if (r.tag == "flux")
            be.tag = BcTag::Flux;
        else
            throw ConfigError("mesh file: unknown tag '" + r.tag + "'");
    }
    return mesh;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
    out << "mesh " << mesh.n_vertices() << ' ' << mesh.n_triangles() << ' '
        << mesh.boundary_edges.size() << '\n';
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices)
        out << "v " << v.x() << ' ' << v.y() << '\n';
    for (const auto& t : mesh.triangles)
        out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& be : mesh.boundary_edges)
        out << "be " << be.edge << ' ' << be.arc << ' '
            << (be.tag == BcTag::Dirichlet ? "dirichlet" : "flux") << '\n';
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open mesh file '" + path + "'");
    return read_mesh(in);
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write mesh file '" + path + "'");
    write_mesh(out, mesh);
}

} // namespace curvedrt
