#include "curvedrt/analysis.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

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

ErrorReport compute_errors(const Discretization& d, const Solution& sol,
                           const ScalarField& u, const VectorField& p,
                           const ScalarField& div_p, bool trial_flux) {
    const Mesh& mesh = *d.mesh;
    const TriangleRule& rule = d.err_rule;
    ErrorReport rep;
    rep.h = mesh.h;

    double a2 = 0, a1 = 0, area = 0, p2 = 0, dv2 = 0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        PiolaMap F = d.tri_map(t);
        double jac = std::abs(F.detB);
        Eigen::VectorXd sc = d.span_coeffs(sol.flux, t, trial_flux);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            Vec2 x = F.to_physical(rule.points[q]);
            double w = rule.weights[q] * jac;
            double eu = u(x) - d.eval_pressure(sol.pressure, t, x);
            a2 += w * eu * eu;
            a1 += w * eu;
            area += w;
            Vec2 ep = p(x) - d.basis[t].eval(sc, x);
            p2 += w * ep.squaredNorm();
            double ed = div_p(x) - d.basis[t].eval_div(sc, x);
            dv2 += w * ed * ed;
        }
    }
    double shift = d.zero_mean ? a1 / area : 0.0;
    rep.l2_u = std::sqrt(std::max(0.0, a2 - (d.zero_mean ? a1 * a1 / area : 0.0)));
    rep.l2_p = std::sqrt(p2);
    rep.l2_div = std::sqrt(dv2);

    // multiplier seminorm: Lagrange node values
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        PiolaMap F = d.tri_map(t);
        for (int j = 0; j < d.dofs.per_tri_pres; ++j) {
            double ex = u(F.to_physical(d.pbasis.nodes[j])) - shift;
            rep.dofmax_u = std::max(
                rep.dofmax_u, std::abs(ex - sol.pressure(d.dofs.pressure_dof(t, j))));
        }
    }

    // flux seminorm over the canonical degrees of freedom
    GaussRule g = gauss_legendre(d.k + 1);
    for (int e = 0; e < mesh.n_edges(); ++e) {
        Vec2 a = mesh.vertices[mesh.edges[e][0]];
        Vec2 b = mesh.vertices[mesh.edges[e][1]];
        Vec2 n = rot_cw((b - a).normalized());
        bool constrained = d.dofs.free_of_flux[d.dofs.edge_dof(e, 0)] < 0;
        if (!constrained) {
            // on curved boundary edges the exact flux is sampled at the foot of
            // the perpendicular on the true boundary, matching the functionals
            // the boundary fitting is built on
            const BoundaryArc* arc = nullptr;
            if (mesh.bedge_of_edge[e] >= 0) {
                const auto& be = mesh.boundary_edges[mesh.bedge_of_edge[e]];
                if (d.domain->arcs[be.arc].kind == BoundaryArc::Kind::Circle)
                    arc = &d.domain->arcs[be.arc];
            }
            for (int m = 0; m <= d.k; ++m) {
                Vec2 M = a + g.nodes[m] * (b - a);
                Vec2 X = arc ? foot_of_perpendicular(*arc, M, n,
                                                     {arc->tmin(), arc->tmax()})
                                   .N
                             : M;
                double err = sol.flux(d.dofs.edge_dof(e, m)) - p(X).dot(n);
                rep.dofmax_p = std::max(rep.dofmax_p, std::abs(err));
            }
        } else if (trial_flux && d.mode == TrialMode::BoundaryFitted) {
            // modified edge: the discrete field at the polygon Gauss point
            // against the exact flux at the foot on the true boundary
            int t = mesh.edge_tris[e][0];
            const ModifiedElement& me = d.modified[d.cls.flux_tri_of_tri[t]];
            Eigen::VectorXd sc = d.span_coeffs(sol.flux, t, true);
            for (size_t i = 0; i < me.M.size(); ++i) {
                if (me.edge[i] != e)
                    continue;
                double err = d.basis[t].eval(sc, me.M[i]).dot(n) - p(me.N[i]).dot(n);
                rep.dofmax_p = std::max(rep.dofmax_p, std::abs(err));
            }
        } else {
            for (int m = 0; m <= d.k; ++m) {
                Vec2 M = a + g.nodes[m] * (b - a);
                rep.dofmax_p = std::max(rep.dofmax_p, std::abs(p(M).dot(n)));
            }
        }
    }
    if (d.k >= 1) {
        auto monos = monomials_upto(d.k - 1);
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const ElementBasis& eb = d.basis[t];
            PiolaMap F = d.tri_map(t);
            double tarea = mesh.tri_area(t);
            std::vector<double> ex(2 * monos.size(), 0.0);
            for (size_t q = 0; q < rule.points.size(); ++q) {
                Vec2 x = F.to_physical(rule.points[q]);
                Vec2 X = (x - eb.span.origin) / eb.span.scale;
                double w = rule.weights[q] * std::abs(F.detB) / tarea;
                Vec2 pv = p(x);
                for (size_t i = 0; i < monos.size(); ++i) {
                    double phi = ipow(X.x(), monos[i][0]) * ipow(X.y(), monos[i][1]);
                    ex[i] += w * phi * pv.x();
                    ex[monos.size() + i] += w * phi * pv.y();
                }
            }
            for (int i = 0; i < d.dofs.per_tri_flux; ++i) {
                double err =
                    sol.flux(d.dofs.interior_dof(mesh.n_edges(), t, i)) - ex[i];
                rep.dofmax_p = std::max(rep.dofmax_p, std::abs(err));
            }
        }
    }
    return rep;
}

std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> r(e.size(), nan);
    for (size_t i = 1; i < e.size(); ++i) {
        if (e[i - 1] <= 0 || e[i] <= 0 || e[i] >= e[i - 1] || h[i] >= h[i - 1])
            continue; // non-monotone: leave NaN
        r[i] = std::log(e[i - 1] / e[i]) / std::log(h[i - 1] / h[i]);
    }
    return r;
}

void ConvergenceTable::finish() {
    std::vector<double> h, eu, ep, ed;
    for (const auto& r : rows) {
        h.push_back(r.err.h);
        eu.push_back(r.err.l2_u);
        ep.push_back(r.err.l2_p);
        ed.push_back(r.err.l2_div);
    }
    eoc_u = eoc(h, eu);
    eoc_p = eoc(h, ep);
    eoc_div = eoc(h, ed);
}

ConvergenceTable convergence_study(const TestCase& c, int k, int m0, int m1,
                                   RhsMode mode, TrialMode trial) {
    if (m0 < 1 || m1 < m0)
        throw ConfigError("convergence_study: bad level range");
    ConvergenceTable tab;
    for (int m = m0; m <= m1; ++m) {
        Mesh mesh = c.make_mesh(m);
        Discretization d = discretize(mesh, c.domain, k, trial);
        MixedSystem sys = assemble(d, c.f, mode);
        Solution sol = solve(d, sys);
        tab.rows.push_back({m, compute_errors(d, sol, c.u, c.p, c.div_p)});
    }
    tab.finish();
    return tab;
}

namespace {

std::string fmt_err(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(6) << v;
    return os.str();
}

std::string fmt_eoc(double v) {
    if (std::isnan(v))
        return "";
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
}

} // namespace

void write_csv(std::ostream& out, const ConvergenceTable& t) {
    out << "level,h,l2_u,l2_p,l2_div,max_u,max_p,eoc_u,eoc_p,eoc_div\n";
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        out << r.level << ',' << fmt_err(r.err.h) << ',' << fmt_err(r.err.l2_u) << ','
            << fmt_err(r.err.l2_p) << ',' << fmt_err(r.err.l2_div) << ','
            << fmt_err(r.err.dofmax_u) << ',' << fmt_err(r.err.dofmax_p) << ','
            << fmt_eoc(t.eoc_u[i]) << ',' << fmt_eoc(t.eoc_p[i]) << ','
            << fmt_eoc(t.eoc_div[i]) << '\n';
    }
}

void write_markdown(std::ostream& out, const ConvergenceTable& t) {
    out << "| level | h | l2_u | l2_p | l2_div | max_u | max_p | eoc_u | eoc_p | "
           "eoc_div |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|\n";
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        out << "| " << r.level << " | " << fmt_err(r.err.h) << " | "
            << fmt_err(r.err.l2_u) << " | " << fmt_err(r.err.l2_p) << " | "
            << fmt_err(r.err.l2_div) << " | " << fmt_err(r.err.dofmax_u) << " | "
            << fmt_err(r.err.dofmax_p) << " | " << fmt_eoc(t.eoc_u[i]) << " | "
            << fmt_eoc(t.eoc_p[i]) << " | " << fmt_eoc(t.eoc_div[i]) << " |\n";
    }
}

ConvergenceTable interpolation_study(const TestCase& c, int k, int m0, int m1,
                                     InterpTarget which) {
    ConvergenceTable tab;
    for (int m = m0; m <= m1; ++m) {
        Mesh mesh = c.make_mesh(m);
        Discretization d = discretize(mesh, c.domain, k);
        Solution fake;
        fake.flux = which == InterpTarget::Test ? interpolate_test(d, c.p)
                                                : interpolate_trial(d, c.p);
        fake.pressure = project_multiplier(d, c.u, MultiplierProjection::L2);
        tab.rows.push_back({m, compute_errors(d, fake, c.u, c.p, c.div_p,
                                              which == InterpTarget::Trial)});
    }
    tab.finish();
    return tab;
}

namespace {

// H(div) Gram matrix of the free flux basis (test or boundary-modified trial)
Eigen::SparseMatrix<double> flux_hdiv_gram(const Discretization& d, bool trial) {
    const Mesh& mesh = *d.mesh;
    const TriangleRule& rule = d.vol_rule;
    int nq = static_cast<int>(rule.points.size());
    std::vector<Eigen::Triplet<double>> trip;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const ElementBasis& eb = d.basis[t];
        int nk = eb.dim();
        PiolaMap F = d.tri_map(t);
        Eigen::MatrixXd Px(nq, nk), Py(nq, nk), Pd(nq, nk);
        Eigen::VectorXd w(nq);
        for (int q = 0; q < nq; ++q) {
            Vec2 x = F.to_physical(rule.points[q]);
            w(q) = rule.weights[q] * std::abs(F.detB);
            for (int j = 0; j < nk; ++j) {
                Vec2 v = eb.span.eval(j, x);
                Px(q, j) = v.x();
                Py(q, j) = v.y();
                Pd(q, j) = eb.span.div(j, x);
            }
        }
        Eigen::MatrixXd C = eb.coeff;
        if (trial && d.mode == TrialMode::BoundaryFitted && d.cls.flux_tri_of_tri[t] >= 0)
            C = eb.coeff * d.modified[d.cls.flux_tri_of_tri[t]].E_inv;
        Eigen::MatrixXd Vx = Px * C, Vy = Py * C, Vd = Pd * C;
        Eigen::MatrixXd G = Vx.transpose() * w.asDiagonal() * Vx +
                            Vy.transpose() * w.asDiagonal() * Vy +
                            Vd.transpose() * w.asDiagonal() * Vd;
        auto ids = d.local_flux_dofs(t);
        for (int i = 0; i < nk; ++i) {
            long fi = d.dofs.free_of_flux[ids[i]];
            if (fi < 0)
                continue;
            for (int j = 0; j < nk; ++j) {
                long fj = d.dofs.free_of_flux[ids[j]];
                if (fj >= 0)
                    trip.emplace_back(fi, fj, G(i, j));
            }
        }
    }
    Eigen::SparseMatrix<double> G(d.dofs.n_flux_free, d.dofs.n_flux_free);
    G.setFromTriplets(trip.begin(), trip.end());
    return G;
}

Eigen::SparseMatrix<double> pressure_mass(const Discretization& d) {
    const Mesh& mesh = *d.mesh;
    const TriangleRule& rule = d.vol_rule;
    int np = d.dofs.per_tri_pres;
    int nq = static_cast<int>(rule.points.size());
    Eigen::MatrixXd Phi(nq, np);
    for (int q = 0; q < nq; ++q)
        for (int j = 0; j < np; ++j)
            Phi(q, j) = d.pbasis.eval(j, rule.points[q]);
    std::vector<Eigen::Triplet<double>> trip;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        double jac = 2 * mesh.tri_area(t);
        Eigen::VectorXd w(nq);
        for (int q = 0; q < nq; ++q)
            w(q) = rule.weights[q] * jac;
        Eigen::MatrixXd M = Phi.transpose() * w.asDiagonal() * Phi;
        for (int i = 0; i < np; ++i)
            for (int j = 0; j < np; ++j)
                trip.emplace_back(d.dofs.pressure_dof(t, i), d.dofs.pressure_dof(t, j),
                                  M(i, j));
    }
    Eigen::SparseMatrix<double> M(d.dofs.n_pressure, d.dofs.n_pressure);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

} // namespace

std::vector<ProbeRow> dirichlet_residual_probe(const TestCase& c, int k, int m0, int m1) {
    std::vector<ProbeRow> rows;
    GaussRule gnodes = gauss_legendre(k + 1);
    GaussRule gq = gauss_legendre(k + 6);
    for (int m = m0; m <= m1; ++m) {
        Mesh mesh = c.make_mesh(m);
        Discretization d = discretize(mesh, c.domain, k);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(d.dofs.n_flux_free);
        for (const auto& side : d.cls.dirichlet_sides) {
            int e = mesh.tri_edges[side.tri][side.local_edge];
            Vec2 a = mesh.vertices[mesh.edges[e][0]];
            Vec2 bb = mesh.vertices[mesh.edges[e][1]];
            Vec2 dvec = bb - a;
            double len = dvec.norm();
            double sgn = d.basis[side.tri].out_sign[side.local_edge];
            for (int i = 0; i <= k; ++i) {
                long dof = d.dofs.free_of_flux[d.dofs.edge_dof(e, i)];
                double acc = 0;
                for (size_t q = 0; q < gq.nodes.size(); ++q) {
                    double s = gq.nodes[q];
                    // Lagrange basis at the edge Gauss nodes
                    double ell = 1;
                    for (int j = 0; j <= k; ++j)
                        if (j != i)
                            ell *= (s - gnodes.nodes[j]) /
                                   (gnodes.nodes[i] - gnodes.nodes[j]);
                    acc += gq.weights[q] * c.u(a + s * dvec) * ell;
                }
                b(dof) += sgn * len * acc;
            }
        }
        Eigen::SparseMatrix<double> G = flux_hdiv_gram(d, false);
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(G);
        if (ldlt.info() != Eigen::Success)
            throw SingularSystem("flux Gram factorization failed");
        double v = std::sqrt(std::max(0.0, b.dot(ldlt.solve(b))));
        rows.push_back({m, mesh.h, v});
    }
    return rows;
}

double infsup_constant(const Discretization& d, const MixedSystem& sys) {
    long n = sys.n_flux_free + sys.n_pressure;
    Eigen::MatrixXd C = Eigen::MatrixXd(sys.mat).topLeftCorner(n, n);

    auto block_gram = [&](bool trial) {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
        G.topLeftCorner(sys.n_flux_free, sys.n_flux_free) =
            Eigen::MatrixXd(flux_hdiv_gram(d, trial));
        G.bottomRightCorner(sys.n_pressure, sys.n_pressure) =
            Eigen::MatrixXd(pressure_mass(d));
        return G;
    };
    Eigen::LLT<Eigen::MatrixXd> Lq(block_gram(false));
    Eigen::LLT<Eigen::MatrixXd> Lp(block_gram(true));
    if (Lq.info() != Eigen::Success || Lp.info() != Eigen::Success)
        throw SingularSystem("Gram matrix not positive definite");

    Eigen::MatrixXd W = Lq.matrixL().solve(C);
    W = Lp.matrixL().solve(W.transpose()).transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(W);
    return svd.singularValues().minCoeff();
}

std::vector<ProbeRow> infsup_probe(const TestCase& c, int k, int m0, int m1) {
    std::vector<ProbeRow> rows;
    for (int m = m0; m <= m1; ++m) {
        Mesh mesh = c.make_mesh(m);
        Discretization d = discretize(mesh, c.domain, k);
        MixedSystem sys = assemble(d, c.f);
        rows.push_back({m, mesh.h, infsup_constant(d, sys)});
    }
    return rows;
}

void write_probe_csv(std::ostream& out, const std::vector<ProbeRow>& rows) {
    out << "level,h,value\n";
    for (const auto& r : rows)
        out << r.level << ',' << fmt_err(r.h) << ',' << fmt_err(r.value) << '\n';
}

} // namespace curvedrt
