#pragma once

#include "curvedrt/assembly_solve.hpp"
#include "curvedrt/cases.hpp"

#include <iosfwd>

namespace curvedrt {

struct ErrorReport {
    double h = 0;
    double l2_u = 0, l2_p = 0, l2_div = 0;
    // discrete seminorms: largest multiplier error over the Lagrange nodes and
    // largest flux error over the canonical degrees of freedom (exact flux
    // sampled at the true-boundary foot point on modified edges)
    double dofmax_u = 0, dofmax_p = 0;
};

ErrorReport compute_errors(const Discretization& d, const Solution& sol,
                           const ScalarField& u, const VectorField& p,
                           const ScalarField& div_p, bool trial_flux = true);

/// rates[i] = log(e[i-1]/e[i]) / log(h[i-1]/h[i]); rates[0] and any
/// non-decreasing pair give NaN.
std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& e);

struct ConvergenceRow {
    int level = 0;
    ErrorReport err;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::vector<double> eoc_u, eoc_p, eoc_div; // from the L2 columns
    void finish(); // fills the eoc columns
};

ConvergenceTable convergence_study(const TestCase& c, int k, int m0, int m1,
                                   RhsMode mode = RhsMode::ExactQuadrature,
                                   TrialMode trial = TrialMode::BoundaryFitted);

void write_csv(std::ostream& out, const ConvergenceTable& t);
void write_markdown(std::ostream& out, const ConvergenceTable& t);

enum class InterpTarget { Test, Trial };

/// L2 and divergence errors of the canonical interpolant of the case flux.
ConvergenceTable interpolation_study(const TestCase& c, int k, int m0, int m1,
                                     InterpTarget which);

struct ProbeRow {
    int level = 0;
    double h = 0;
    double value = 0;
};

/// sup over discrete test fluxes of |(u, q.n)| on the polygonal Dirichlet
/// boundary divided by the flux norm of q (zero when the exact multiplier
/// vanishes there; decays like h^(3/2) on curved Dirichlet arcs).
std::vector<ProbeRow> dirichlet_residual_probe(const TestCase& c, int k, int m0, int m1);

/// Smallest singular value of the mixed system preconditioned on both sides by
/// the natural norms of the trial and test spaces (dense computation).
std::vector<ProbeRow> infsup_probe(const TestCase& c, int k, int m0, int m1);
double infsup_constant(const Discretization& d, const MixedSystem& sys);

void write_probe_csv(std::ostream& out, const std::vector<ProbeRow>& rows);

} // namespace curvedrt
