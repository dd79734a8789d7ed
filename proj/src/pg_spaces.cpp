#include "curvedrt/pg_spaces.hpp"

#include <cmath>

namespace curvedrt {

namespace {

std::vector<std::array<int, 2>> monomials_upto(int deg) {
    std::vector<std::array<int, 2>> m;
    for (int d = 0; d <= deg; ++d)
        for (int a = 0; a <= d; ++a)
            m.push_back({d - a, a});
    return m;
}

double ipow(double x, int p) {
    double r = 1;
    for (int i = 0; i < p; ++i)
        r *= x;
    return r;
}

} // namespace

GlobalDofMap build_test_space(const Mesh& mesh, int k) {
    if (k < 0)
        throw ConfigError("build_test_space: k must be >= 0");
    GlobalDofMap m;
    m.k = k;
    m.per_edge = k + 1;
    m.per_tri_flux = k * (k + 1);
    m.per_tri_pres = (k + 1) * (k + 2) / 2;
    m.n_flux = static_cast<long>(mesh.n_edges()) * m.per_edge +
               static_cast<long>(mesh.n_triangles()) * m.per_tri_flux;
    m.n_pressure = static_cast<long>(mesh.n_triangles()) * m.per_tri_pres;

    m.free_of_flux.assign(m.n_flux, 0);
    for (const auto& be : mesh.boundary_edges)
        if (be.tag == BcTag::Flux)
            for (int i = 0; i < m.per_edge; ++i)
                m.free_of_flux[m.edge_dof(be.edge, i)] = -1;
    long next = 0;
    for (long i = 0; i < m.n_flux; ++i)
        m.free_of_flux[i] = m.free_of_flux[i] < 0 ? -1 : next++;
    m.n_flux_free = next;
    return m;
}

double ModifiedElement::deviation() const {
    int n = static_cast<int>(E_tilde.rows());
    return (E_tilde - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().rowwise().sum().maxCoeff();
}

double ModifiedElement::cond_estimate() const {
    return E_tilde.cwiseAbs().rowwise().sum().maxCoeff() *
           E_inv.cwiseAbs().rowwise().sum().maxCoeff();
}

ModifiedElement build_modified_element(const Mesh& mesh, const DomainBoundary& domain,
                                       const ElementBasis& eb, const FluxTriangle& ft) {
    int nk = eb.dim();
    ModifiedElement me;
    me.tri = ft.tri;
    me.E_tilde = Eigen::MatrixXd::Identity(nk, nk);

    for (size_t s = 0; s < ft.local_edges.size(); ++s) {
        const auto& be = mesh.boundary_edges[ft.bedges[s]];
        const auto& arc = domain.arcs[be.arc];
        int l = ft.local_edges[s];
        Vec2 n_out = eb.out_sign[l] * eb.edge_normal[l];
        ParamInterval bracket{arc.tmin(), arc.tmax()};
        for (size_t i = 0; i < eb.edge_nodes[l].size(); ++i) {
            const Vec2& M = eb.edge_nodes[l][i];
            FootPoint f = foot_of_perpendicular(arc, M, n_out, bracket);
            Vec2 nu = f.normal.dot(eb.edge_normal[l]) >= 0 ? f.normal : Vec2(-f.normal);
            int row = eb.edge_dof(l, static_cast<int>(i));
            me.row.push_back(row);
            me.edge.push_back(be.edge);
            me.M.push_back(M);
            me.N.push_back(f.N);
            me.nu.push_back(nu);
            me.offset.push_back(f.offset);
            for (int j = 0; j < nk; ++j)
                me.E_tilde(row, j) = eb.eval_basis(j, f.N).dot(nu);
        }
    }

    if (me.deviation() > 0.9)
        throw IllConditioned(
            "boundary-constraint matrix too far from identity (mesh too coarse "
            "for the boundary curvature)");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(me.E_tilde);
    me.E_inv = lu.solve(Eigen::MatrixXd::Identity(nk, nk));
    return me;
}

std::vector<ModifiedElement> build_trial_space(const Mesh& mesh,
                                               const DomainBoundary& domain,
                                               const BoundaryClassification& cls,
                                               const std::vector<ElementBasis>& basis) {
    std::vector<ModifiedElement> out;
    out.reserve(cls.flux_tris.size());
    for (const auto& ft : cls.flux_tris)
        out.push_back(build_modified_element(mesh, domain, basis[ft.tri], ft));
    return out;
}

double PressureBasis::eval(int j, const Vec2& xhat) const {
    auto monos = monomials_upto(k);
    double r = 0;
    for (size_t i = 0; i < monos.size(); ++i)
        r += coeff(i, j) * ipow(xhat.x(), monos[i][0]) * ipow(xhat.y(), monos[i][1]);
    return r;
}

PressureBasis pressure_basis(int k) {
    PressureBasis pb;
    pb.k = k;
    if (k == 0) {
        pb.nodes = {Vec2(1.0 / 3, 1.0 / 3)};
        pb.coeff = Eigen::MatrixXd::Ones(1, 1);
        return pb;
    }
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k - i; ++j)
            pb.nodes.push_back({i / double(k), j / double(k)});
    auto monos = monomials_upto(k);
    int n = pb.dim();
    Eigen::MatrixXd V(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            V(r, c) = ipow(pb.nodes[r].x(), monos[c][0]) * ipow(pb.nodes[r].y(), monos[c][1]);
    pb.coeff = V.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
    return pb;
}

std::vector<long> Discretization::local_flux_dofs(int t) const {
    std::vector<long> ids;
    ids.reserve(basis[t].dim());
    for (int l = 0; l < 3; ++l) {
        int e = mesh->tri_edges[t][l];
        for (int m = 0; m <= k; ++m)
            ids.push_back(dofs.edge_dof(e, m));
    }
    for (int i = 0; i < dofs.per_tri_flux; ++i)
        ids.push_back(dofs.interior_dof(mesh->n_edges(), t, i));
    return ids;
}

Eigen::VectorXd Discretization::span_coeffs(const Eigen::VectorXd& flux, int t,
                                            bool trial) const {
    auto ids = local_flux_dofs(t);
    Eigen::VectorXd loc(ids.size());
    for (size_t i = 0; i < ids.size(); ++i)
        loc(i) = flux(ids[i]);
    if (trial && mode == TrialMode::BoundaryFitted && cls.flux_tri_of_tri[t] >= 0)
        loc = modified[cls.flux_tri_of_tri[t]].E_inv * loc;
    return basis[t].coeff * loc;
}

Vec2 Discretization::eval_flux(const Eigen::VectorXd& flux, int t, const Vec2& x,
                               bool trial) const {
    return basis[t].eval(span_coeffs(flux, t, trial), x);
}

double Discretization::eval_flux_div(const Eigen::VectorXd& flux, int t, const Vec2& x,
                                     bool trial) const {
    return basis[t].eval_div(span_coeffs(flux, t, trial), x);
}

double Discretization::eval_pressure(const Eigen::VectorXd& pressure, int t,
                                     const Vec2& x) const {
    Vec2 xhat = tri_map(t).to_reference(x);
    double r = 0;
    for (int j = 0; j < dofs.per_tri_pres; ++j)
        r += pressure(dofs.pressure_dof(t, j)) * pbasis.eval(j, xhat);
    return r;
}

PiolaMap Discretization::tri_map(int t) const {
    auto [a, b, c] = mesh->tri_coords(t);
    return piola_map(a, b, c);
}

Discretization discretize(const Mesh& mesh, const DomainBoundary& domain, int k,
                          TrialMode mode) {
    Discretization d;
    d.mesh = &mesh;
    d.domain = &domain;
    d.k = k;
    d.mode = mode;
    d.cls = classify_boundary(mesh, domain);
    d.dofs = build_test_space(mesh, k);
    d.basis.reserve(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t)
        d.basis.push_back(element_basis(mesh, t, k));
    if (mode == TrialMode::BoundaryFitted)
        d.modified = build_trial_space(mesh, domain, d.cls, d.basis);
    d.pbasis = pressure_basis(k);
    d.vol_rule = triangle_rule(2 * k + 8);
    d.err_rule = triangle_rule(2 * k + 10);
    d.zero_mean = d.cls.all_flux;
    return d;
}

Eigen::VectorXd interpolate_test(const Discretization& d, const VectorField& m) {
    const Mesh& mesh = *d.mesh;
    int k = d.k;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d.dofs.n_flux);

    GaussRule gq = gauss_legendre(k + 6);
    GaussRule gnodes = gauss_legendre(k + 1);
    for (int e = 0; e < mesh.n_edges(); ++e) {
        Vec2 a = mesh.vertices[mesh.edges[e][0]];
        Vec2 b = mesh.vertices[mesh.edges[e][1]];
        Vec2 dvec = b - a;
        Vec2 n = rot_cw(dvec.normalized());
        // L2 projection of m.n onto P_k along the edge, then sampled at the dof nodes
        Eigen::VectorXd c = Eigen::VectorXd::Zero(k + 1);
        for (size_t q = 0; q < gq.nodes.size(); ++q) {
            double s = gq.nodes[q];
            double mn = m(a + s * dvec).dot(n);
            for (int j = 0; j <= k; ++j)
                c(j) += gq.weights[q] * (2 * j + 1) * mn * legendre01(j, s);
        }
        for (int i = 0; i <= k; ++i) {
            double v = 0;
            for (int j = 0; j <= k; ++j)
                v += c(j) * legendre01(j, gnodes.nodes[i]);
            out(d.dofs.edge_dof(e, i)) = v;
        }
    }

    if (k >= 1) {
        auto monos = monomials_upto(k - 1);
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const ElementBasis& eb = d.basis[t];
            PiolaMap F = d.tri_map(t);
            double area = mesh.tri_area(t);
            for (size_t i = 0; i < monos.size(); ++i) {
                double mx = 0, my = 0;
                for (size_t q = 0; q < d.vol_rule.points.size(); ++q) {
                    Vec2 x = F.to_physical(d.vol_rule.points[q]);
                    Vec2 X = (x - eb.span.origin) / eb.span.scale;
                    double w = d.vol_rule.weights[q] * std::abs(F.detB) / area;
                    double phi = ipow(X.x(), monos[i][0]) * ipow(X.y(), monos[i][1]);
                    Vec2 mv = m(x);
                    mx += w * phi * mv.x();
                    my += w * phi * mv.y();
                }
                out(d.dofs.interior_dof(mesh.n_edges(), t, static_cast<int>(i))) = mx;
                out(d.dofs.interior_dof(mesh.n_edges(), t,
                                        static_cast<int>(monos.size() + i))) = my;
            }
        }
    }
    return out;
}

Eigen::VectorXd interpolate_trial(const Discretization& d, const VectorField& m) {
    Eigen::VectorXd out = interpolate_test(d, m);
    for (long i = 0; i < d.dofs.n_flux; ++i)
        if (d.dofs.free_of_flux[i] < 0)
            out(i) = 0;
    return out;
}

Eigen::VectorXd project_multiplier(const Discretization& d, const ScalarField& u,
                                   MultiplierProjection which) {
    const Mesh& mesh = *d.mesh;
    int np = d.dofs.per_tri_pres;
    Eigen::VectorXd out(d.dofs.n_pressure);

    if (which == MultiplierProjection::L2) {
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            PiolaMap F = d.tri_map(t);
            Eigen::MatrixXd M = Eigen::MatrixXd::Zero(np, np);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np);
            for (size_t q = 0; q < d.vol_rule.points.size(); ++q) {
                const Vec2& xhat = d.vol_rule.points[q];
                double w = d.vol_rule.weights[q]; // constant Jacobian cancels
                Eigen::VectorXd phi(np);
                for (int j = 0; j < np; ++j)
                    phi(j) = d.pbasis.eval(j, xhat);
                M += w * phi * phi.transpose();
                rhs += w * u(F.to_physical(xhat)) * phi;
            }
            out.segment(static_cast<long>(t) * np, np) = M.ldlt().solve(rhs);
        }
        return out;
    }

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        PiolaMap F = d.tri_map(t);
        for (int j = 0; j < np; ++j)
            out(d.dofs.pressure_dof(t, j)) = u(F.to_physical(d.pbasis.nodes[j]));
    }
    if (which == MultiplierProjection::LatticeZeroMean)
        out.array() -= pressure_mean(d, out);
    return out;
}

double pressure_mean(const Discretization& d, const Eigen::VectorXd& pressure) {
    double integral = 0, area = 0;
    for (int t = 0; t < d.mesh->n_triangles(); ++t) {
        double jac = 2 * d.mesh->tri_area(t);
        for (size_t q = 0; q < d.vol_rule.points.size(); ++q) {
            const Vec2& xhat = d.vol_rule.points[q];
            double w = d.vol_rule.weights[q] * jac;
            double v = 0;
            for (int j = 0; j < d.dofs.per_tri_pres; ++j)
                v += pressure(d.dofs.pressure_dof(t, j)) * d.pbasis.eval(j, xhat);
            integral += w * v;
            area += w;
        }
    }
    return integral / area;
}

} // namespace curvedrt
