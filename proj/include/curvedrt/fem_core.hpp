#pragma once

#include "curvedrt/mesh.hpp"

#include <array>
#include <vector>

namespace curvedrt {

/// Gauss-Legendre nodes and weights on [0,1]; weights sum to 1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Quadrature on the reference triangle {x,y >= 0, x+y <= 1}, exact for
/// polynomials up to `degree` (collapsed tensor-product construction).
struct TriangleRule {
    std::vector<Vec2> points;
    std::vector<double> weights; // sum to 1/2
    int degree = 0;
};
TriangleRule triangle_rule(int degree);

/// Shifted Legendre polynomial L_m on [0,1], orthogonal with L_m(1) = 1.
double legendre01(int m, double s);

/// Span of the lowest-order-complete flux space of degree k on a shifted/scaled
/// frame: [P_k]^2 plus the k+1 fields X * (homogeneous degree k). Dimension
/// (k+1)(k+3). Fields are plain vector fields (no reference-element mapping):
/// basis j evaluated at a physical point, with divergence taken in physical
/// coordinates.
struct FluxSpan {
    int k = 0;
    Vec2 origin{0, 0};
    double scale = 1;

    int dim() const { return (k + 1) * (k + 3); }
    Vec2 eval(int j, const Vec2& x) const;
    double div(int j, const Vec2& x) const;
};

/// Flux basis on the reference triangle, dual to the canonical functionals:
/// per edge, k+1 moments against shifted Legendre polynomials of q.n; for
/// k >= 1, interior moments of both components against P_{k-1} monomials.
struct RefFluxBasis {
    int k = 0;
    FluxSpan span;           // origin (0,0), scale 1
    Eigen::MatrixXd coeff;   // column j: span coefficients of basis field j

    int dim() const { return span.dim(); }
    Vec2 eval(int j, const Vec2& xhat) const;
    double eval_div(int j, const Vec2& xhat) const;

    /// Applies every canonical functional to every basis field
    /// (identity up to quadrature error).
    Eigen::MatrixXd dof_matrix() const;
};
RefFluxBasis rt_basis(int k);

/// Affine map x = B xhat + b from the reference triangle to (a0, a1, a2).
struct PiolaMap {
    Eigen::Matrix2d B, Binv;
    Vec2 b;
    double detB = 0;

    Vec2 to_physical(const Vec2& xhat) const { return B * xhat + b; }
    Vec2 to_reference(const Vec2& x) const { return Binv * (x - b); }
};
PiolaMap piola_map(const Vec2& a0, const Vec2& a1, const Vec2& a2);

/// Contravariant (flux-preserving) transform of a reference field value.
inline Vec2 piola_push(const PiolaMap& F, const Vec2& qhat) {
    return (F.B * qhat) / F.detB;
}
/// Field j of the reference basis pushed to the physical point x.
Vec2 piola_push_eval(const RefFluxBasis& basis, int j, const PiolaMap& F, const Vec2& x);
double piola_push_div(const RefFluxBasis& basis, int j, const PiolaMap& F, const Vec2& x);

/// Flux basis built directly on a physical triangle, dual to the degrees of
/// freedom used globally: point values of q.n_e at the k+1 Gauss points of each
/// edge (edge direction and normal fixed by the global vertex order, so the two
/// triangles sharing an edge see identical functionals), plus scaled interior
/// moments for k >= 1.
struct ElementBasis {
    int k = 0;
    int tri = -1;
    FluxSpan span;
    Eigen::MatrixXd coeff; // column j: span coefficients of dof basis j

    std::array<std::vector<Vec2>, 3> edge_nodes; // Gauss points, ordered lo -> hi vertex
    std::array<Vec2, 3> edge_normal;             // global edge normal n_e
    std::array<double, 3> out_sign;              // +1 if n_e points out of this triangle
    std::array<double, 3> edge_len;

    int dim() const { return span.dim(); }
    int n_edge_dofs() const { return 3 * (k + 1); }

    /// local dof index of Gauss node m on local edge l
    int edge_dof(int l, int m) const { return l * (k + 1) + m; }

    Vec2 eval(const Eigen::VectorXd& span_coef, const Vec2& x) const;
    double eval_div(const Eigen::VectorXd& span_coef, const Vec2& x) const;
    Vec2 eval_basis(int j, const Vec2& x) const { return eval(coeff.col(j), x); }
    double eval_basis_div(int j, const Vec2& x) const { return eval_div(coeff.col(j), x); }
};
ElementBasis element_basis(const Mesh& mesh, int tri, int k);

} // namespace curvedrt
