#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fpflux/types.hpp"

namespace fpflux {

enum class PotentialKind { PolynomialPair, DoubleWell1D, Quadratic, CosinePlusQuadratic, Augmented };

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string &name);

// Axis-aligned box [lo, hi] or Euclidean ball (center, radius) in configuration space.
struct Region {
    enum class Shape { Box, Ball };
    Shape shape = Shape::Box;
    Vec lo, hi;
    Vec center;
    double radius = 0.0;

    static Region box(Vec lo, Vec hi);
    static Region interval(double lo, double hi);
    static Region ball(Vec center, double radius);

    int dim() const;
    bool contains(const Vec &x) const;
    // Closest point of the closed region to x (x itself when inside).
    Vec project(const Vec &x) const;
    double distance(const Vec &x) const;
    Vec centroid() const;
};

// Coefficient conventions, per kind:
//   PolynomialPair       V(r) = sum_i a_i r^(2i) + b cos(w r);  coefficients = {a_0, a_1, ...},
//                        cos_amplitude = b, cos_frequency = w.
//   DoubleWell1D         V(x) = a x^4 - b x^2 per coordinate;   coefficients = {a, b}.
//   Quadratic            V(x) = (k/2) |x|^2;                    coefficients = {k}.
//   CosinePlusQuadratic  V(x) = a cos(2 pi f x) + b x^2 per coordinate; coefficients = {a, f, b}.
//   Augmented            base(x) + kappa dist(x, R)^2 outside R.
class Potential {
public:
    static Potential polynomial_pair(std::vector<double> even_coeffs, int dim, int particles,
                                     double cos_amplitude = 0.0, double cos_frequency = 1.0);
    static Potential double_well(double a = 1.0, double b = 1.0, int dim = 1);
    static Potential quadratic(double k = 1.0, int dim = 1, int particles = 1);
    static Potential cosine_plus_quadratic(double a = 1.0, double f = 1.0, double b = 1.0, int dim = 1);
    static Potential augmented(const Potential &base, Region region, double kappa);

    PotentialKind kind() const { return kind_; }
    const std::vector<double> &coefficients() const { return coeffs_; }
    int pair_degree() const;
    int dim() const { return dim_; }
    int particles() const { return eta_; }
    int config_dim() const { return dim_ * eta_; }
    double cos_amplitude() const { return cos_amp_; }
    double cos_frequency() const { return cos_freq_; }
    const Potential &base() const;
    const Region &region() const;
    double kappa() const { return kappa_; }

    double eval(const Vec &x) const;
    Vec gradient(const Vec &x) const;
    Mat hessian(const Vec &x) const;
    double laplacian(const Vec &x) const;
    // dV/dx for potentials with a single coordinate; avoids the vector interface in hot loops.
    double derivative_1d(double x) const;

    // Radial profile of a pair potential and its derivatives; the ratio V'(r)/r is evaluated
    // in closed form so that r = 0 returns the analytic limit.
    double pair_value(double r) const;
    double pair_d1(double r) const;
    double pair_d2(double r) const;
    double pair_d1_over_r(double r) const;

    std::string describe() const;

private:
    PotentialKind kind_ = PotentialKind::Quadratic;
    std::vector<double> coeffs_;
    int dim_ = 1;
    int eta_ = 1;
    double cos_amp_ = 0.0;
    double cos_freq_ = 1.0;
    std::shared_ptr<const Potential> base_;
    std::shared_ptr<const Region> region_;
    double kappa_ = 0.0;

    void check_dim(const Vec &x) const;
    double separable_value(double x) const;
    double separable_d1(double x) const;
    double separable_d2(double x) const;
};

// U_beta(x) = -(beta/4)|grad V|^2 + (1/2) Laplacian V.
double witten_u(const Potential &v, double beta, const Vec &x);

// max |V'(r)/r| over r in [0, r_max] by a uniform scan with `points` samples.
double alpha_v_scan(const Potential &pair, double r_max, int points = 4001);

// max |V''(r)| over [r_lo, r_hi]; also reports the maximiser.
struct CurvatureScan {
    double gamma = 0.0;
    double r_at_max = 0.0;
};
CurvatureScan pair_curvature_scan(const Potential &pair, double r_lo, double r_hi, int points = 4001);

}  // namespace fpflux
