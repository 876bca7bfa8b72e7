#include "fpflux/special.hpp"

#include <cmath>
#include <numbers>

#include "fpflux/types.hpp"

namespace fpflux {

QuadratureRule gauss_legendre(int m) {
    if (m < 1) throw InputError("Gauss-Legendre rule needs at least one node");
    QuadratureRule r;
    r.nodes.assign(m, 0.0);
    r.weights.assign(m, 0.0);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pm = (m == 1) ? z : p1;
            double pm1 = (m == 1) ? 1.0 : p0;
            dp = m * (z * pm - pm1) / (z * z - 1.0);
            double dz = pm / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.nodes[i] = -z;
        r.nodes[m - 1 - i] = z;
        r.weights[i] = w;
        r.weights[m - 1 - i] = w;
    }
    if (m % 2 == 1) r.nodes[m / 2] = 0.0;
    return r;
}

QuadratureRule gauss_legendre(int m, double a, double b) {
    QuadratureRule r = gauss_legendre(m);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < m; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

std::vector<double> bessel_j_sequence(double x, int lmax) {
    if (lmax < 0) throw InputError("lmax must be nonnegative");
    std::vector<double> out(lmax + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    const double top = std::max<double>(lmax, ax);
    int start = 2 * ((static_cast<int>(top) + 20 + static_cast<int>(std::sqrt(60.0 * top))) / 2);
    std::vector<double> j(start + 2, 0.0);
    j[start + 1] = 0.0;
    j[start] = 1e-300;
    for (int n = start; n >= 1; --n) {
        j[n - 1] = (2.0 * n / ax) * j[n] - j[n + 1];
        if (std::abs(j[n - 1]) > 1e250) {
            for (int k = n - 1; k <= start + 1; ++k) j[k] *= 1e-250;
        }
    }
    double norm = j[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * j[k];
    for (int l = 0; l <= lmax; ++l) {
        double v = j[l] / norm;
        out[l] = (x < 0 && (l % 2 == 1)) ? -v : v;
    }
    return out;
}

int jacobi_anger_degree(double theta, double eps) {
    if (!(eps > 0 && eps < 1)) throw InputError("epsilon must lie in (0, 1)");
    const double a = std::abs(theta);
    int lmax = static_cast<int>(a + 10.0 * std::log(1.0 / eps) + 30.0 + std::sqrt(40.0 * a));
    std::vector<double> j = bessel_j_sequence(a, lmax);
    double tail = 0.0;
    for (int l = lmax; l >= 1; --l) {
        tail += 2.0 * std::abs(j[l]);
        if (tail > eps) return l;
    }
    return 0;
}

}  // namespace fpflux
