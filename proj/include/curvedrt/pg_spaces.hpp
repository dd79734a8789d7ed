#pragma once

#include "curvedrt/fem_core.hpp"

#include <functional>

namespace curvedrt {

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

/// Shared numbering for flux and pressure unknowns. Flux degrees of freedom:
/// (k+1) per edge (values of q.n_e at the edge Gauss points), then k(k+1)
/// interior moments per triangle. Pressure: (k+1)(k+2)/2 Lagrange values per
/// triangle. Edge dofs on the flux boundary are constrained (not free).
struct GlobalDofMap {
    int k = 0;
    int per_edge = 1;
    int per_tri_flux = 0;
    int per_tri_pres = 1;
    long n_flux = 0;
    long n_pressure = 0;
    long n_flux_free = 0;
    std::vector<long> free_of_flux; // full flux dof -> free index, or -1 if constrained

    long edge_dof(int e, int m) const { return static_cast<long>(e) * per_edge + m; }
    long interior_dof(long n_edges, int t, int i) const {
        return n_edges * per_edge + static_cast<long>(t) * per_tri_flux + i;
    }
    long pressure_dof(int t, int j) const {
        return static_cast<long>(t) * per_tri_pres + j;
    }
};

GlobalDofMap build_test_space(const Mesh& mesh, int k);

/// A flux-boundary triangle whose trial basis is rebuilt so that the normal
/// component vanishes at the feet N_i of the perpendiculars dropped from the
/// edge Gauss points M_i onto the true boundary, instead of at the M_i.
/// Corner triangles contribute rows for each of their flux edges.
struct ModifiedElement {
    int tri = -1;
    std::vector<int> row;         // local dof rows replaced in E_tilde
    std::vector<int> edge;        // global edge of each replaced row
    std::vector<Vec2> M;          // Gauss points of the polygonal boundary edge
    std::vector<Vec2> N;          // feet on the true boundary
    std::vector<Vec2> nu;         // unit normal of the true boundary at N (aligned with n_e)
    std::vector<double> offset;   // signed distance M -> N (along the outward normal)
    Eigen::MatrixXd E_tilde;      // identity with the boundary-edge dof rows replaced
    Eigen::MatrixXd E_inv;

    double deviation() const;     // || E_tilde - I ||_inf
    double cond_estimate() const; // || E_tilde ||_inf * || E_inv ||_inf
};

ModifiedElement build_modified_element(const Mesh& mesh, const DomainBoundary& domain,
                                       const ElementBasis& eb, const FluxTriangle& ft);

/// Modified elements for all flux-boundary triangles, aligned with cls.flux_tris.
std::vector<ModifiedElement> build_trial_space(const Mesh& mesh,
                                               const DomainBoundary& domain,
                                               const BoundaryClassification& cls,
                                               const std::vector<ElementBasis>& basis);

/// Lagrange basis of degree k on the reference triangle (lattice nodes;
/// centroid for k = 0), used for the pressure space.
struct PressureBasis {
    int k = 0;
    std::vector<Vec2> nodes;  // reference coordinates
    Eigen::MatrixXd coeff;    // column j: monomial coefficients of basis j

    int dim() const { return (k + 1) * (k + 2) / 2; }
    double eval(int j, const Vec2& xhat) const;
};
PressureBasis pressure_basis(int k);

enum class TrialMode {
    BoundaryFitted, // trial fluxes constrained at the true boundary (the method)
    Polygonal       // trial = test space (classical scheme on the polygon)
};

/// Everything needed to assemble and evaluate on one mesh: classification,
/// dof map, per-triangle bases, boundary modifications, and the quadrature
/// rules shared by assembly and projection.
struct Discretization {
    const Mesh* mesh = nullptr;
    const DomainBoundary* domain = nullptr;
    int k = 0;
    TrialMode mode = TrialMode::BoundaryFitted;

    BoundaryClassification cls;
    GlobalDofMap dofs;
    std::vector<ElementBasis> basis;
    std::vector<ModifiedElement> modified; // aligned with cls.flux_tris
    PressureBasis pbasis;
    TriangleRule vol_rule; // assembly, load and L2 projection share this rule
    TriangleRule err_rule;
    bool zero_mean = false; // pure flux-boundary problem: pressure fixed to mean zero

    /// Full flux dof id for each local dof of triangle t (edge dofs in global
    /// lo->hi order, then interior).
    std::vector<long> local_flux_dofs(int t) const;

    /// Span coefficients of the flux field with full-layout dof vector `flux`
    /// restricted to triangle t. Trial side applies the boundary modification.
    Eigen::VectorXd span_coeffs(const Eigen::VectorXd& flux, int t, bool trial) const;

    Vec2 eval_flux(const Eigen::VectorXd& flux, int t, const Vec2& x, bool trial) const;
    double eval_flux_div(const Eigen::VectorXd& flux, int t, const Vec2& x,
                         bool trial) const;
    double eval_pressure(const Eigen::VectorXd& pressure, int t, const Vec2& x) const;
    PiolaMap tri_map(int t) const;
};

Discretization discretize(const Mesh& mesh, const DomainBoundary& domain, int k,
                          TrialMode mode = TrialMode::BoundaryFitted);

/// Canonical interpolant onto the test space: edge moments of m.n matched
/// against Legendre polynomials, interior moments matched directly.
/// Returns a full-layout flux dof vector.
Eigen::VectorXd interpolate_test(const Discretization& d, const VectorField& m);

/// Interpolant onto the trial space: identical functionals on the free dofs,
/// constrained slots left at zero (the modified basis carries the boundary
/// behaviour).
Eigen::VectorXd interpolate_trial(const Discretization& d, const VectorField& m);

enum class MultiplierProjection {
    L2,             // elementwise L2 projection, using the shared volume rule
    Lattice,        // Lagrange interpolation at the pressure nodes
    LatticeZeroMean // lattice interpolation shifted to zero mean over the polygon
};

Eigen::VectorXd project_multiplier(const Discretization& d, const ScalarField& u,
                                   MultiplierProjection which);

/// Mean of a discrete pressure over the polygonal domain.
double pressure_mean(const Discretization& d, const Eigen::VectorXd& pressure);

} // namespace curvedrt
