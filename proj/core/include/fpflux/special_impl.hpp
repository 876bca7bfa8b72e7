#pragma once

#include <cmath>
#include <functional>

#include "fpflux/types.hpp"

namespace fpflux {

namespace detail {

inline const QuadratureRule &gl10() {
    static const QuadratureRule rule = gauss_legendre(10);
    return rule;
}

template <class F>
double gl10_panel(F &f, double a, double b) {
    const auto &r = gl10();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return s * half;
}

template <class F>
double adaptive_rec(F &f, double a, double b, double whole, double tol, double width, int depth) {
    double m = 0.5 * (a + b);
    double left = gl10_panel(f, a, m), right = gl10_panel(f, m, b);
    if (std::abs(left + right - whole) <= tol * (b - a) / width) return left + right;
    if (depth <= 0) throw NumericError("adaptive quadrature did not converge");
    return adaptive_rec(f, a, m, left, tol, width, depth - 1) + adaptive_rec(f, m, b, right, tol, width, depth - 1);
}

}  // namespace detail

template <class F>
double adaptive_integrate(F &&f, double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    if (b < a) return -adaptive_integrate(f, b, a, tol, max_depth);
    double whole = detail::gl10_panel(f, a, b);
    return detail::adaptive_rec(f, a, b, whole, tol, b - a, max_depth);
}

}  // namespace fpflux
