#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpflux/discretize.hpp"
#include "fpflux/potentials.hpp"
#include "fpflux/types.hpp"

namespace fpflux {

// Local thermal state preparation on a 1D interval region. Integrals run over [-box, box]; the
// dynamics use the finite-difference self-adjoint generator of V_R on N reflecting cells.
struct LocalPrepProblem {
    Potential base = Potential::cosine_plus_quadratic(1.0, 1.0, 1.0);
    Region region = Region::interval(-0.75, -0.25);
    double m = 2.0;          // convexity constant of the base on R
    double beta = 10.0;
    double eps = 1e-3;
    double box = 2.0;
    int N = 512;
    std::optional<CVec> warm_start;  // defaults to the Gaussian of variance 1/(beta m) at R's centroid

    void validate() const;
};

struct GapTerms {
    double kappa = 0.0;
    double z = 0.0;          // integral of e^{-beta V_R} over the box
    double z_r = 0.0;        // integral of e^{-beta V} over R
    double formula = 0.0;    // 2 (1 - sqrt(Z_R / Z))
    double direct = 0.0;     // quadrature of |rho_R - rho|^2
};

// Both sides of the L2 gap identity for a given kappa.
GapTerms gap_terms(const LocalPrepProblem &p, double kappa, double tol = 1e-14);

struct KappaChoice {
    double kappa = 0.0;
    double gap_sq = 0.0;     // formula value at kappa (<= eps^2)
    int iterations = 0;
    double kappa_big_o = 0.0;  // 1 / (Z_R^2 beta eps^4)
};

// Smallest kappa (to relative tolerance `rel_tol`) with 2 (1 - sqrt(Z_R/Z)) <= eps^2, found by
// geometric bracketing then bisection in log kappa. NumericError when no kappa <= 1e14 works.
KappaChoice choose_kappa(const LocalPrepProblem &p, double rel_tol = 1e-6);

struct DynamicsResult {
    double t = 0.0;
    double kappa = 0.0;
    CVec state;               // u(t), normalised
    double distance = 0.0;    // ||u(t) - target|| with u scaled so <target|u(0)> = 1
    double initial_distance = 0.0;
    double gap = 0.0;         // -lambda_2 of the generator
    double overlap = 0.0;     // |<target|u0>| for unit u0
    double restricted_distance = 0.0;  // ||u(t)/|u(t)| - rho_R||, rho_R the grid restricted Boltzmann
    Vec target;               // normalised e^{-beta V_R / 2} on the grid
};

// Exact evolution under e^{t H_beta[V_R]} by eigendecomposition.
DynamicsResult prep_by_dynamics(const LocalPrepProblem &p, double kappa, double t);

// Time at which the distance first drops to eps, from the same eigendecomposition (bisection
// on a monotone envelope). Also returns the decay rate used by the bound.
struct MixingTime {
    double t_eps = 0.0;
    double gap = 0.0;
    double initial_distance = 0.0;
    double bound = 0.0;       // ln(C / eps) / gap with C the initial distance
};
MixingTime mixing_time(const LocalPrepProblem &p, double kappa, double eps);

CVec default_warm_start(const LocalPrepProblem &p, const Basis &b);

struct ConvexityReport {
    double kappa = 0.0;
    double min_hessian = 0.0;           // min over the grid of lambda_min(Hess V_R)
    double min_hessian_at = 0.0;
    bool hessian_ok = false;            // min_hessian >= m - tol
    long pairs = 0;
    long monotone_violations = 0;       // (g(x)-g(y)).(x-y) < m |x-y|^2
    long stated_violations = 0;         // (g(x)-g(y)).(x-y) < (m + 2 kappa - 1) |x-y|^2
    std::optional<std::pair<double, double>> stated_counterexample;
    std::optional<std::pair<double, double>> monotone_counterexample;
    double worst_stated_ratio = 0.0;    // min of lhs / |x-y|^2 over the pairs
};

// Requires kappa >= 1/2. Grid scan of the Hessian over the box and 10^3 random pairs
// x in R, y outside R (seeded).
ConvexityReport verify_convexity(const LocalPrepProblem &p, double kappa, int grid = 20001, long pairs = 1000,
                                 std::uint64_t seed = 3, double tol = 1e-9);

// Rows x, V(x), V_R(x), V_P(x) for plotting.
struct PotentialCurves {
    std::vector<double> x, v, v_r, v_p;
};
PotentialCurves potential_curves(const Potential &base, const Region &R, const Region &P, double kappa, double box,
                                 int points);

}  // namespace fpflux
