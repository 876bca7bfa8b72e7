#pragma once

#include <string>
#include <vector>

#include "fpflux/lchs.hpp"
#include "fpflux/types.hpp"

namespace fpflux {

// Register layout everywhere in this module: ancilla index is the most significant, so the
// encoded block is the top-left n x n corner of U and |0>_a |x> is the first n entries.
struct BlockEncoding {
    CMat A;
    double alpha = 1.0;
    int ancilla_dim = 2;
    CMat U;

    long system_dim() const { return A.rows(); }
    CMat corner() const { return U.topLeftCorner(A.rows(), A.cols()); }
    double unitarity_error() const;
    double corner_error() const;  // ||corner - A/alpha||_max
    bool hermitian_unitary(double tol = 1e-12) const;
};

// Two-block unitary completion [[B, sqrt(I-BB^+)], [sqrt(I-B^+B), -B^+]] with B = A/alpha.
BlockEncoding dilate(const CMat &A, double alpha);

// Unitary with first column v (Householder completion); v must be a unit vector.
CMat unitary_with_first_column(const CVec &v);

// (PREP^+ (x) I) SEL (PREP (x) I) encoding sum_i c_i A_i with alpha = sum_i |c_i| alpha_i.
// The LCU index is the most significant register; member ancillas are zero-padded to the
// largest one.
BlockEncoding lcu_combine(const std::vector<BlockEncoding> &encodings, const std::vector<cplx> &coeffs);

// X_j = |j+1><0| (x) A_j + |0><j+1| (x) A_j^+ as an (m+1)n matrix.
CMat dilated_term(const std::vector<CMat> &a_list, int j);

// LCU over the dilations of X_j, each with alpha_j = ||A_j||_2; the corner times alpha is the
// dilated square root.
BlockEncoding dilated_sqrt_encoding(const std::vector<CMat> &a_list);

struct SubnormalizationRoutes {
    double alpha_script_A = 0.0;  // sum_j ||A_j||
    double alpha_H = 0.0;         // sum_j ||A_j||^2 (products A_j^+ A_j encoded separately)
    double norm_script_A = 0.0;   // ||script_A||_2
    double norm_H = 0.0;          // ||sum_j A_j^+ A_j||_2
};
SubnormalizationRoutes subnormalization_routes(const std::vector<CMat> &a_list);

struct ChebySeries {
    std::vector<cplx> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    // 0 even, 1 odd, -1 indefinite (zero coefficients ignored).
    int parity(double tol = 0.0) const;
    cplx eval(double x) const;
    ChebySeries even_part() const;
    ChebySeries odd_part() const;
    ChebySeries scaled(cplx s) const;
    ChebySeries real_part() const;
    ChebySeries imag_part() const;
};

// e^{i k x} = J_0(k) + 2 sum_l i^l J_l(k) T_l(x), truncated by the tail rule for eps.
ChebySeries jacobi_anger(double k, double eps);

// max |series(x) - e^{ikx}| over an n-point Chebyshev grid.
double jacobi_anger_certificate(const ChebySeries &s, double k, int grid = 4096);

struct PhaseSequence {
    std::vector<double> phases;

    int degree() const { return static_cast<int>(phases.size()) - 1; }
    int parity() const { return degree() % 2; }
    PhaseSequence negated() const;
};

// Top-left entry of e^{i p_0 Z} prod_j [O(x) e^{i p_j Z}] with O(x) = [[x, -s], [s, x]].
cplx qsp_poly(const PhaseSequence &phi, double x);

// Corner of the phase-interleaved product of the iterate U Z_Pi; equals P(A/alpha).
// Requires a Hermitian block (UnsupportedError otherwise).
CMat qsp_eval(const BlockEncoding &be, const PhaseSequence &phi);

struct SolveOptions {
    int max_degree = 64;
    int max_iterations = 200;
    double tolerance = 1e-8;
};

// Phases whose QSP polynomial has real part equal to the real part of the target. Target must
// have definite parity and sup-norm at most 1 - 1e-4; a bare +/- T_d gets its closed-form
// phases. Throws SolverError on non-convergence.
PhaseSequence solve_phases(const ChebySeries &target, const SolveOptions &opts = {});

// Monotone counter of iterate applications within one evaluation context.
struct QueryCounter {
    long count = 0;
    void tick(long n = 1) { count += n; }
};

struct MultiplexedResult {
    CVec state;        // member register (x) ancilla (x) system
    int members = 0;
    long ancilla_dim = 0;
    long system_dim = 0;
    long queries = 0;
    int d_max = 0;

    // n-vector in the |j>|0>_a sector.
    CVec sector(int j) const;
};

// Runs all members in superposition; layer l applies the iterate once to every member.
// Members with lower degree are padded with (-pi/2, pi/2) pairs. Same parity is required.
MultiplexedResult multiplexed_qsp(const BlockEncoding &be, const std::vector<PhaseSequence> &members,
                                  const std::vector<cplx> &amplitudes, const CVec &psi,
                                  QueryCounter *counter = nullptr);

// Same but members of both parities; the odd-one-out class skips the final layer, which is a
// single controlled application of the iterate.
MultiplexedResult multiplexed_qsp_mixed(const BlockEncoding &be, const std::vector<PhaseSequence> &members,
                                        const std::vector<cplx> &amplitudes, const CVec &psi,
                                        QueryCounter *counter = nullptr);

// Chebyshev-sum mode: shared iterate powers w_l = O^l |0, psi>, corners T_l(A/alpha)|psi>,
// member j gets sum_l coeffs T_l |psi>; the remainder of each member's norm is placed in the
// ancilla-1 sector. Queries equal the maximal degree.
MultiplexedResult multiplexed_chebyshev(const BlockEncoding &be, const std::vector<ChebySeries> &members,
                                        const std::vector<cplx> &amplitudes, const CVec &psi,
                                        QueryCounter *counter = nullptr);

enum class LchsMode { ExactUnitary, Qsp };
enum class QspRoute { Auto, Phases, ChebyshevSum };

struct LchsState {
    CVec state;
    double alpha_g = 0.0;
    double alpha_eff = 0.0;    // contracted good sector times alpha_eff approximates e^{-A^2 t}|psi>
    std::vector<cplx> weights; // contraction weights per member
    int members = 0;
    long ancilla_dim = 0;
    long system_dim = 0;
    long queries = 0;
    int d_max = 0;
    std::string route;

    // sum_j weights_j <j|<0|_a state
    CVec contract() const;
};

// Superposition sum_j sqrt(c_j/alpha_g) |j> (|0> e^{-i k_j A}|psi> + |perp>). Qsp mode splits each
// node into even (cos) and odd (sin) Jacobi-Anger parts; with the Phases route each part is
// realised as the real part of a QSP polynomial through a +/- phase pair. scale <= 0 picks 0.85
// for the Phases route and 1 / (1 + max eps_j) for the Chebyshev-sum route.
LchsState gaussian_lchs_state(const LchsPlan &plan, const BlockEncoding &be, const CVec &psi,
                              LchsMode mode, QspRoute route = QspRoute::Auto,
                              double scale = 0.0);

std::string serialize_phases(const PhaseSequence &p);
PhaseSequence parse_phases(const std::string &text);
std::string serialize_series(const ChebySeries &s);
ChebySeries parse_series(const std::string &text);

}  // namespace fpflux
