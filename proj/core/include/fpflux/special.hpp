#pragma once

#include <vector>

namespace fpflux {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// M-point Gauss-Legendre rule on [-1, 1]; nodes ascending, Newton-refined to ~1e-15.
QuadratureRule gauss_legendre(int m);

// Same rule mapped onto [a, b].
QuadratureRule gauss_legendre(int m, double a, double b);

// J_0(x) .. J_lmax(x) by Miller's backward recurrence, normalised with
// J_0 + 2 sum_k J_2k = 1. Valid for any real x.
std::vector<double> bessel_j_sequence(double x, int lmax);

// Smallest D with sum_{l > D} 2 |J_l(theta)| <= eps (Jacobi-Anger tail rule).
int jacobi_anger_degree(double theta, double eps);

// Recursive bisection with 10-point Gauss-Legendre panels; a panel is accepted when it agrees
// with the sum over its two halves to within tol (scaled by panel width). Throws NumericError
// when max_depth is exhausted.
template <class F>
double adaptive_integrate(F &&f, double a, double b, double tol, int max_depth = 40);

}  // namespace fpflux

#include "fpflux/special_impl.hpp"
