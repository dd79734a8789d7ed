#pragma once

#include "curvedrt/pg_spaces.hpp"

#include <Eigen/Sparse>
#include <iosfwd>

namespace curvedrt {

enum class RhsMode {
    ExactQuadrature,     // integrate f itself with the shared volume rule
    LatticeInterpolation // replace f elementwise by its interpolant at the
                         // lattice nodes contracted toward the centroid
};

struct MixedSystem {
    Eigen::SparseMatrix<double> mat;
    Eigen::VectorXd rhs;
    long n_flux_free = 0;
    long n_pressure = 0;
    bool zero_mean = false; // bordered with the zero-mean multiplier row/column

    long size() const { return n_flux_free + n_pressure + (zero_mean ? 1 : 0); }
};

/// Assembles the square mixed system
///   (p_h, q)_h + (u_h, div q)_h = 0        for all test fluxes q,
///   (div p_h, v)_h = -(f, v)_h             for all pressures v,
/// with the trial flux expanded in the boundary-modified basis. In zero-mean
/// mode (no Dirichlet boundary) a mean constraint is appended.
MixedSystem assemble(const Discretization& d, const ScalarField& f,
                     RhsMode mode = RhsMode::ExactQuadrature, double chi = 0.75);

struct Solution {
    Eigen::VectorXd flux;     // full flux layout; constrained slots are zero
    Eigen::VectorXd pressure; // Lagrange coefficients per triangle
    double mean_multiplier = 0;
    double residual = 0; // algebraic residual of the solved linear system
};

Solution solve(const Discretization& d, const MixedSystem& sys);

/// Convenience path for a domain whose whole boundary carries the Dirichlet
/// condition (no trial-space modification anywhere; the system is symmetric).
Solution solve_pure_dirichlet(const Discretization& d, const ScalarField& f,
                              RhsMode mode = RhsMode::ExactQuadrature);

/// Flux vector and pressure value of the discrete solution at x inside
/// triangle t.
std::pair<Vec2, double> evaluate(const Discretization& d, const Solution& sol, int t,
                                 const Vec2& x);

void write_solution(std::ostream& out, const Discretization& d, const Solution& sol);

} // namespace curvedrt
