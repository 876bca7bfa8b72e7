#pragma once

#include <vector>

#include "fpflux/potentials.hpp"
#include "fpflux/types.hpp"

namespace fpflux {

enum class Scheme { FiniteDifference, PlaneWave };
enum class Boundary { Periodic, Reflecting };

std::string to_string(Scheme s);
std::string to_string(Boundary b);
Scheme scheme_from_string(const std::string &s);
Boundary boundary_from_string(const std::string &s);

// Tensor-product grid on [-L, L]^(eta d) with N points per degree of freedom.
// Multi-index layout: flat = sum_q i_q N^q, coordinate q = 0 varies fastest.
struct Basis {
    Scheme scheme = Scheme::PlaneWave;
    int N = 64;
    double L = 1.0;
    int d = 1;
    int eta = 1;
    Boundary boundary = Boundary::Periodic;  // finite-difference only; plane waves are periodic
    long cap = 1L << 14;

    static Basis plane_wave(int N, double L, int d = 1, int eta = 1);
    static Basis finite_difference(int N, double L, int d = 1, int eta = 1,
                                   Boundary boundary = Boundary::Periodic);

    int dofs() const { return d * eta; }
    long dimension() const;
    double spacing() const { return 2.0 * L / N; }
    Vec grid_1d() const;
    Vec point(long flat) const;
    // k_m = 2 pi m / (2L), m = -N/2 .. N/2-1, in that order.
    Vec wavenumbers() const;
    void validate() const;
};

struct OperatorSet {
    Basis basis;
    double beta = 1.0;
    Mat F;                 // FKE generator (finite-difference scheme only; empty otherwise)
    Mat Hbeta;             // self-adjoint form
    std::vector<CMat> A;   // sum-of-squares factors (plane-wave scheme only)
    CMat script_A;         // dilated square root (plane-wave scheme only)
};

// Detailed-balance finite-difference generator: the rate from grid point i to neighbour j is
// e^{-beta (V_j - V_i)/2} / (beta h^2). Columns sum to zero; e^{-beta V} is the stationary vector.
Mat build_fke_fd(const Potential &v, double beta, const Basis &basis);

// Backward generator of the same scheme (transpose of the FKE matrix).
Mat build_bke_fd(const Potential &v, double beta, const Basis &basis);

// Centred-difference backward generator beta^{-1} u'' - V' u'; used for condition-number scans.
Mat build_bke_centered(const Potential &v, double beta, const Basis &basis);

// Self-adjoint form. Plane waves: beta^{-1} Laplacian (spectral) + diag(U_beta).
// Finite differences: D^{-1} F D with D = diag(e^{-beta V/2}), assembled directly.
Mat build_hbeta(const Potential &v, double beta, const Basis &basis);

// A_j = -i (beta^{-1/2} d_j - (sqrt(beta)/2) F_j), F_j = -d_j V, on the plane-wave basis.
std::vector<CMat> build_sos(const Potential &v, double beta, const Basis &basis);

// Block (m+1)x(m+1) Hermitian matrix with A_j^dagger in block row 0 and A_j in block column 0.
CMat build_dilated_sqrt(const std::vector<CMat> &a_list);

// H_disc := -sum_j A_j^dagger A_j.
CMat h_disc(const std::vector<CMat> &a_list);

OperatorSet build_operator_set(const Potential &v, double beta, const Basis &basis);

// Spectral first and second derivative matrices on N periodic points with spacing 2L/N.
CMat spectral_d1(int N, double L);
Mat spectral_d2(int N, double L);

// Orthonormal columns spanning products of Hermite functions (orders < per_dof, width sigma)
// sampled on the grid. Used for bandwidth-matched operator comparisons.
CMat smooth_probe_subspace(const Basis &basis, int per_dof, double sigma);

// Values of V at every grid point.
Vec potential_on_grid(const Potential &v, const Basis &basis);

}  // namespace fpflux
