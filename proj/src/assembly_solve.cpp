#include "curvedrt/assembly_solve.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <vector>

namespace curvedrt {

MixedSystem assemble(const Discretization& d, const ScalarField& f, RhsMode mode,
                     double chi) {
    const Mesh& mesh = *d.mesh;
    const TriangleRule& rule = d.vol_rule;
    const int nq = static_cast<int>(rule.points.size());
    const int nk = d.basis.empty() ? 0 : d.basis[0].dim();
    const int np = d.dofs.per_tri_pres;

    MixedSystem sys;
    sys.n_flux_free = d.dofs.n_flux_free;
    sys.n_pressure = d.dofs.n_pressure;
    sys.zero_mean = d.zero_mean;
    long n = sys.size();
    sys.rhs = Eigen::VectorXd::Zero(n);

    // reference pressure basis values at the quadrature points (shared by all
    // triangles: the map is affine)
    Eigen::MatrixXd Phi(nq, np);
    for (int q = 0; q < nq; ++q)
        for (int j = 0; j < np; ++j)
            Phi(q, j) = d.pbasis.eval(j, rule.points[q]);

    // contracted lattice nodes for the interpolated right-hand side
    std::vector<Vec2> chi_nodes;
    Eigen::MatrixXd chi_vander;
    if (mode == RhsMode::LatticeInterpolation) {
        Vec2 centroid(1.0 / 3, 1.0 / 3);
        Eigen::MatrixXd V(np, np);
        for (int r = 0; r < np; ++r) {
            Vec2 node = centroid + chi * (d.pbasis.nodes[r] - centroid);
            chi_nodes.push_back(node);
            for (int j = 0; j < np; ++j)
                V(r, j) = d.pbasis.eval(j, node);
        }
        chi_vander = V.partialPivLu().solve(Eigen::MatrixXd::Identity(np, np));
    }

    std::vector<Eigen::Triplet<double>> trip;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const ElementBasis& eb = d.basis[t];
        PiolaMap F = d.tri_map(t);
        double jac = std::abs(F.detB);

        // span field values / divergences at the quadrature points
        Eigen::MatrixXd Px(nq, nk), Py(nq, nk), Pd(nq, nk);
        for (int q = 0; q < nq; ++q) {
            Vec2 x = F.to_physical(rule.points[q]);
            for (int j = 0; j < nk; ++j) {
                Vec2 v = eb.span.eval(j, x);
                Px(q, j) = v.x();
                Py(q, j) = v.y();
                Pd(q, j) = eb.span.div(j, x);
            }
        }
        Eigen::VectorXd w(nq);
        for (int q = 0; q < nq; ++q)
            w(q) = rule.weights[q] * jac;

        Eigen::MatrixXd Ct = eb.coeff; // test
        Eigen::MatrixXd Cr = eb.coeff; // trial
        if (d.mode == TrialMode::BoundaryFitted && d.cls.flux_tri_of_tri[t] >= 0)
            Cr = eb.coeff * d.modified[d.cls.flux_tri_of_tri[t]].E_inv;

        Eigen::MatrixXd Vxt = Px * Ct, Vyt = Py * Ct, Vdt = Pd * Ct;
        Eigen::MatrixXd Vxr = Px * Cr, Vyr = Py * Cr, Vdr = Pd * Cr;

        Eigen::MatrixXd A = Vxt.transpose() * w.asDiagonal() * Vxr +
                            Vyt.transpose() * w.asDiagonal() * Vyr;
        Eigen::MatrixXd B = Vdt.transpose() * w.asDiagonal() * Phi;       // test div x pressure
        Eigen::MatrixXd D = Phi.transpose() * w.asDiagonal() * Vdr;       // pressure x trial div

        auto ids = d.local_flux_dofs(t);
        std::vector<long> free(ids.size());
        for (size_t i = 0; i < ids.size(); ++i)
            free[i] = d.dofs.free_of_flux[ids[i]];

        for (int i = 0; i < nk; ++i) {
            if (free[i] < 0)
                continue;
            for (int j = 0; j < nk; ++j)
                if (free[j] >= 0 && A(i, j) != 0)
                    trip.emplace_back(free[i], free[j], A(i, j));
            for (int m = 0; m < np; ++m)
                if (B(i, m) != 0)
                    trip.emplace_back(free[i], sys.n_flux_free + d.dofs.pressure_dof(t, m),
                                      B(i, m));
        }
        for (int m = 0; m < np; ++m) {
            long row = sys.n_flux_free + d.dofs.pressure_dof(t, m);
            for (int j = 0; j < nk; ++j)
                if (free[j] >= 0 && D(m, j) != 0)
                    trip.emplace_back(row, free[j], D(m, j));
        }

        // right-hand side -(f, v)_h
        Eigen::VectorXd fq(nq);
        if (mode == RhsMode::ExactQuadrature) {
            for (int q = 0; q < nq; ++q)
                fq(q) = f(F.to_physical(rule.points[q]));
        } else {
            Eigen::VectorXd fvals(np);
            for (int r = 0; r < np; ++r)
                fvals(r) = f(F.to_physical(chi_nodes[r]));
            Eigen::VectorXd fcoef = chi_vander * fvals;
            fq = Phi * fcoef;
        }
        for (int m = 0; m < np; ++m) {
            double acc = 0;
            for (int q = 0; q < nq; ++q)
                acc += w(q) * fq(q) * Phi(q, m);
            sys.rhs(sys.n_flux_free + d.dofs.pressure_dof(t, m)) -= acc;
        }

        if (sys.zero_mean) {
            long mcol = sys.n_flux_free + sys.n_pressure;
            for (int m = 0; m < np; ++m) {
                double im = 0;
                for (int q = 0; q < nq; ++q)
                    im += w(q) * Phi(q, m);
                long prow = sys.n_flux_free + d.dofs.pressure_dof(t, m);
                trip.emplace_back(prow, mcol, im); // multiplier column
                trip.emplace_back(mcol, prow, im); // mean-zero constraint row
            }
        }
    }

    sys.mat.resize(n, n);
    sys.mat.setFromTriplets(trip.begin(), trip.end());
    sys.mat.makeCompressed();
    return sys;
}

Solution solve(const Discretization& d, const MixedSystem& sys) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(sys.mat);
    lu.factorize(sys.mat);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("mixed system factorization failed: " + lu.lastErrorMessage());
    Eigen::VectorXd x = lu.solve(sys.rhs);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("mixed system solve failed");

    Solution sol;
    sol.residual = (sys.mat * x - sys.rhs).norm();
    double scale = std::max(1.0, sys.rhs.norm());
    if (!(sol.residual / scale < 1e-8))
        throw SingularSystem("mixed system solve left a large residual");

    sol.flux = Eigen::VectorXd::Zero(d.dofs.n_flux);
    for (long i = 0; i < d.dofs.n_flux; ++i)
        if (d.dofs.free_of_flux[i] >= 0)
            sol.flux(i) = x(d.dofs.free_of_flux[i]);
    sol.pressure = x.segment(sys.n_flux_free, sys.n_pressure);
    if (sys.zero_mean)
        sol.mean_multiplier = x(sys.n_flux_free + sys.n_pressure);
    return sol;
}

Solution solve_pure_dirichlet(const Discretization& d, const ScalarField& f,
                              RhsMode mode) {
    if (!d.cls.flux_tris.empty())
        throw ConfigError("solve_pure_dirichlet: the boundary carries flux edges");
    return solve(d, assemble(d, f, mode));
}

std::pair<Vec2, double> evaluate(const Discretization& d, const Solution& sol, int t,
                                 const Vec2& x) {
    return {d.eval_flux(sol.flux, t, x, true), d.eval_pressure(sol.pressure, t, x)};
}

void write_solution(std::ostream& out, const Discretization& d, const Solution& sol) {
    const Mesh& mesh = *d.mesh;
    out << std::setprecision(17);
    out << "solution k " << d.k << " flux " << d.dofs.n_flux << " pressure "
        << d.dofs.n_pressure << '\n';
    for (int e = 0; e < mesh.n_edges(); ++e)
        for (int m = 0; m <= d.k; ++m)
            out << "flux edge " << e << ' ' << m << ' '
                << sol.flux(d.dofs.edge_dof(e, m)) << '\n';
    for (int t = 0; t < mesh.n_triangles(); ++t)
        for (int i = 0; i < d.dofs.per_tri_flux; ++i)
            out << "flux tri " << t << ' ' << i << ' '
                << sol.flux(d.dofs.interior_dof(mesh.n_edges(), t, i)) << '\n';
    for (int t = 0; t < mesh.n_triangles(); ++t)
        for (int j = 0; j < d.dofs.per_tri_pres; ++j)
            out << "pressure " << t << ' ' << j << ' '
                << sol.pressure(d.dofs.pressure_dof(t, j)) << '\n';
    if (d.zero_mean)
        out << "multiplier " << sol.mean_multiplier << '\n';
}

} // namespace curvedrt
