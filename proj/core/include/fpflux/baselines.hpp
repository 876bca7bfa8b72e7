#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpflux/discretize.hpp"
#include "fpflux/fit.hpp"
#include "fpflux/potentials.hpp"
#include "fpflux/types.hpp"

namespace fpflux {

// <P| e^{tH} |R> by full eigendecomposition. t = 0 returns <P|R>. Dimensions above `cap`
// throw ResourceError.
cplx exact_propagator_overlap(const Mat &h, const CVec &r, const CVec &p, double t, long cap = 8192);
cplx exact_propagator_overlap(const CMat &h, const CVec &r, const CVec &p, double t, long cap = 8192);

// ---------------------------------------------------------------------------------------------
// Euler-Maruyama Langevin baseline

// dt = eps^2 e^{-gamma R^2} / (2^10 R^2 eta).
double langevin_step_size(double eps, double gamma, double radius, int eta = 1);

struct LangevinConfig {
    Potential potential = Potential::double_well();
    double beta = 1.0;
    double eps_target = 0.1;
    double radius = 1.0;        // R in the step-size rule
    double gamma_lip = 0.0;     // <= 0: estimate from the Hessian on the sampling box
    double T = 1.0;
    long trajectories = 100000;
    std::uint64_t seed = 1;
    double dt = 0.0;            // > 0 overrides the step-size rule
    double box = 4.0;           // rejection proposals are drawn inside [-box, box]^n
    bool periodic = false;      // wrap positions onto [-box, box)^n after every step
    long max_steps = 10'000'000'000;  // cap on trajectories * steps
    int threads = 1;
};

struct LangevinResult {
    double fraction = 0.0;      // share of trajectories with x(T) in P
    double fraction_stderr = 0.0;
    double nu = 0.0;            // sqrt(p_R / p_P) * fraction
    double nu_stderr = 0.0;
    double p_R = 0.0;
    double p_P = 0.0;
    double dt = 0.0;
    double dt_rule = 0.0;       // value of the step-size rule, reported even when overridden
    double gamma = 0.0;
    long steps = 0;
    long trajectories = 0;
    double acceptance = 0.0;    // rejection sampler acceptance rate
    std::vector<std::string> notes;
};

LangevinResult langevin_flux(const LangevinConfig &cfg, const Region &R, const Region &P);

// Initial points distributed as e^{-beta V} 1_R, by rejection from the box intersected with R.
// Throws SamplerError when the acceptance rate falls below 1e-4.
std::vector<Vec> sample_restricted_boltzmann(const Potential &v, double beta, const Region &R, double box,
                                             long count, std::uint64_t seed, double *acceptance = nullptr);

// Mass of R under e^{-beta V} restricted to [-box, box]^n. Adaptive quadrature in 1D, a
// tensor-grid midpoint rule otherwise.
double region_mass(const Potential &v, double beta, const Region &R, double box);

// Euler-Maruyama levels driven by the same Brownian path: level l uses step h_0 / 2^l.
struct HalvingLevel {
    double dt = 0.0;
    double fraction = 0.0;
    double fraction_stderr = 0.0;
    double second_moment = 0.0;     // E|x(T)|^2
    double second_moment_stderr = 0.0;
};

struct HalvingStudy {
    std::vector<HalvingLevel> levels;
    // Successive differences between level l and l+1 with paired standard errors.
    std::vector<double> fraction_diff, fraction_diff_stderr;
    std::vector<double> moment_diff, moment_diff_stderr;
    double weak_order = 0.0;        // power-law exponent of |moment_diff| vs dt
    ScalingFit order_fit;
    // fraction(dt) = f0 + C dt by least squares over the levels
    double bias_constant = 0.0;
    double extrapolated_fraction = 0.0;
    double p_R = 0.0;
    double p_P = 0.0;
    long trajectories = 0;
};

HalvingStudy langevin_halving_study(const LangevinConfig &cfg, const Region &R, const Region &P, double dt0,
                                    int levels);

// ---------------------------------------------------------------------------------------------
// Condition-number scans

enum class KappaGenerator { CenteredBackward, SqraSelfAdjoint };
std::string to_string(KappaGenerator g);

struct ConditionNumber {
    double kappa = 0.0;
    double sigma_max = 0.0;
    double sigma_min = 0.0;      // smallest singular value kept
    double sigma_zero = 0.0;     // deflated value (0 when nothing was deflated)
    bool deflated = false;
    std::vector<std::string> notes;
};

// sigma_max / sigma_min after removing `deflate` smallest singular values (dense BDCSVD).
ConditionNumber condition_number(const Mat &a, int deflate = 1);

// Condition number of a generator whose rows sum to zero and whose null space is the constant
// vector. The diagonal is rebuilt from the off-diagonal rates in long double and the smallest
// nonzero singular value is found by inverse iteration with bordered solves, which stays
// accurate after a dense SVD has lost it to rounding. sigma_max comes from the SVD.
ConditionNumber condition_number_rate_matrix(const Mat &b, int max_iter = 200, double tol = 1e-13);

struct KappaPoint {
    double parameter = 0.0;      // N or beta
    ConditionNumber cond;
};

struct KappaScan {
    std::string sweep;           // "N" or "beta"
    KappaGenerator generator = KappaGenerator::CenteredBackward;
    std::vector<KappaPoint> points;
    ScalingFit fit;
};

Mat kappa_generator(const Potential &v, double beta, const Basis &basis, KappaGenerator g);

// Reflecting finite-difference grid. The N-sweep fits a power law, the beta-sweep an exponential.
KappaScan kappa_scan_n(const Potential &v, double beta, double L, const std::vector<int> &ns,
                       KappaGenerator g = KappaGenerator::CenteredBackward, int threads = 1);
KappaScan kappa_scan_beta(const Potential &v, const std::vector<double> &betas, int N, double L,
                          KappaGenerator g = KappaGenerator::CenteredBackward, int threads = 1);

// ---------------------------------------------------------------------------------------------
// Many-body Lipschitz constant

struct LipschitzPoint {
    int eta = 0;
    double two_cluster_quotient = 0.0;  // v^T Hess v / |v|^2 for the +/- cluster vector
    double two_cluster_norm = 0.0;      // ||Hess||_2 at the two-cluster configuration
    double random_max_norm = 0.0;       // largest ||Hess||_2 over the random configurations
    double max_norm = 0.0;
    double bound = 0.0;                 // gamma * eta / 4
};

struct LipschitzScan {
    double gamma = 0.0;
    double r0 = 0.0;
    int d = 1;
    std::vector<LipschitzPoint> points;
    ScalingFit fit;                     // linear fit of max_norm vs eta
    bool slope_ok = false;              // slope >= gamma / 4
};

struct LipschitzOptions {
    double r_lo = 0.5;                  // curvature scan window for r0
    double r_hi = 4.0;
    double box = 2.0;                   // random positions uniform in [-box, box]^d
    int random_configs = 50;
    std::uint64_t seed = 11;
};

// Two clusters of eta/2 particles at the origin and at r0 e_1; r0 maximises |V''| on the scan
// window. Throws ConfigError when no r0 with |V''(r0)| >= gamma/2 exists in the window.
LipschitzScan lipschitz_scan(const Potential &pair, const std::vector<int> &etas, int d,
                             const LipschitzOptions &opts = {});

// Pair potential of `pair`'s radial profile for eta particles in d dimensions.
Potential with_particles(const Potential &pair, int eta, int d);

// ---------------------------------------------------------------------------------------------
// Classical versus quantum cost

struct CostInputs {
    double T = 1.0;
    double eps = 0.01;
    double R = 1.0;
    double gamma_pair = 0.25;   // gamma = eta * gamma_pair unless gamma_fixed >= 0
    double gamma_fixed = -1.0;
    double beta = 1.0;
    double N = 64.0;
    double alpha_V = 1.0;
};

// 2^10 T R^2 eta^2 max(1, ln eta) e^{R^2 gamma} / eps^4 (unit constant).
double classical_cost(double T, double eta, double eps, double gamma, double R);

// (eta^{5/2} alpha_V sqrt(t beta) + eta^{3/2} sqrt(t / beta) N) / eps (unit constant).
double quantum_cost(double t, double eta, double eps, double beta, double N, double alpha_V);

struct CostPoint {
    double eta = 0.0;
    double gamma = 0.0;
    double classical = 0.0;
    double quantum = 0.0;
};

struct CostComparison {
    std::vector<CostPoint> curve;
    std::optional<double> crossover_eta;  // smallest eta in the scan with quantum < classical
};

CostComparison cost_comparison(const CostInputs &in, const std::vector<double> &etas);

}  // namespace fpflux
