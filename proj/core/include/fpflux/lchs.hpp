#pragma once

#include <string>
#include <vector>

#include "fpflux/types.hpp"

namespace fpflux {

// Gaussian-LCHS plan: e^{-x^2 t} ~ sum_j c_j e^{-i k_j x} for |x| <= alpha_A.
struct LchsPlan {
    double t = 0.0;
    double eps = 0.0;         // target spectral-norm error
    double eps_quad = 0.0;    // budget for truncation + quadrature (certificate target)
    double eps_poly = 0.0;    // budget eps' for polynomial approximation of the unitaries
    double alpha_A = 0.0;
    double K = 0.0;           // truncation wavenumber
    int M_q = 0;
    std::vector<double> nodes;    // k_j in [-K, K]
    std::vector<double> weights;  // w_j > 0
    std::vector<double> coeffs;   // c_j = w_j f_t(k_j)
    std::vector<double> eps_j;    // per-term polynomial budgets (capped)
    std::vector<int> degrees;     // Jacobi-Anger degrees for e^{-i k_j A}
    double alpha_g = 0.0;
    double certificate = -1.0;    // measured sup-norm error on the scalar grid; < 0 when unchecked
    int refinements = 0;

    int max_degree() const;
    long total_degree() const;
};

// Gaussian kernel f_t(k) = e^{-k^2/(4t)} / (2 sqrt(pi t)).
double gaussian_kernel(double k, double t);

// K = max(2 sqrt(t) (1 + 1e-7), 2 sqrt(t ln(4 / (sqrt(pi) eps)))).
double truncation_wavenumber(double t, double eps);

// Constructive node-count bound (1 / (2 ln(1 + sqrt 2))) (K alpha / 2 + ln(10 / (eps sqrt t))).
double node_count_bound(double t, double eps, double alpha_A);

// Plan with a prescribed node count; no certificate is run.
LchsPlan plan_with_nodes(double t, double eps, double alpha_A, int m);

// max over a uniform grid on [-alpha_A, alpha_A] of |e^{-x^2 t} - sum_j c_j e^{-i k_j x}|.
double scalar_certificate(const LchsPlan &plan, int grid_points = 10000);

// Node count from the bound, then certificate; on failure M_q doubles (up to 4 times)
// before a CertificateError is thrown.
LchsPlan build_plan(double t, double eps, double alpha_A);

// sum_j c_j e^{-i k_j A} through one eigendecomposition of the Hermitian matrix A.
CMat apply_plan_exact(const LchsPlan &plan, const CMat &script_A);

// Per-node unitaries applied to a vector: returns columns e^{-i k_j A} v.
CMat apply_nodes_to_vector(const LchsPlan &plan, const CMat &script_A, const CVec &v);

std::string serialize_plan(const LchsPlan &plan);
LchsPlan parse_plan(const std::string &text);

}  // namespace fpflux
