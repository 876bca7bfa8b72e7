#include "fpflux/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fpflux {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double z) {
    if (std::abs(z) < 1e-4) {
        double z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

}  // namespace

std::string to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::PolynomialPair: return "polynomial-pair";
        case PotentialKind::DoubleWell1D: return "double-well-1d";
        case PotentialKind::Quadratic: return "quadratic";
        case PotentialKind::CosinePlusQuadratic: return "cosine-plus-quadratic";
        case PotentialKind::Augmented: return "augmented";
    }
    return "unknown";
}

PotentialKind potential_kind_from_string(const std::string &name) {
    if (name == "polynomial-pair") return PotentialKind::PolynomialPair;
    if (name == "double-well-1d") return PotentialKind::DoubleWell1D;
    if (name == "quadratic") return PotentialKind::Quadratic;
    if (name == "cosine-plus-quadratic") return PotentialKind::CosinePlusQuadratic;
    if (name == "augmented") return PotentialKind::Augmented;
    throw InputError("unknown potential kind '" + name + "'");
}

// ---------------------------------------------------------------------------------------------
// Region

Region Region::box(Vec lo, Vec hi) {
    if (lo.size() != hi.size() || lo.size() == 0) throw InputError("box bounds must have equal, nonzero length");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= hi[i])) throw InputError("box lower bound exceeds upper bound");
    }
    Region r;
    r.shape = Shape::Box;
    r.lo = std::move(lo);
    r.hi = std::move(hi);
    return r;
}

Region Region::interval(double lo, double hi) { return box(Vec::Constant(1, lo), Vec::Constant(1, hi)); }

Region Region::ball(Vec center, double radius) {
    if (!(radius > 0)) throw InputError("ball radius must be positive");
    Region r;
    r.shape = Shape::Ball;
    r.center = std::move(center);
    r.radius = radius;
    return r;
}

int Region::dim() const { return static_cast<int>(shape == Shape::Box ? lo.size() : center.size()); }

bool Region::contains(const Vec &x) const {
    if (shape == Shape::Box) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        }
        return true;
    }
    return (x - center).norm() <= radius;
}

Vec Region::project(const Vec &x) const {
    if (shape == Shape::Box) return x.cwiseMax(lo).cwiseMin(hi);
    Vec d = x - center;
    double n = d.norm();
    if (n <= radius) return x;
    return center + d * (radius / n);
}

double Region::distance(const Vec &x) const { return (x - project(x)).norm(); }

Vec Region::centroid() const { return shape == Shape::Box ? Vec(0.5 * (lo + hi)) : center; }

// ---------------------------------------------------------------------------------------------
// Potential construction

Potential Potential::polynomial_pair(std::vector<double> even_coeffs, int dim, int particles,
                                     double cos_amplitude, double cos_frequency) {
    if (dim < 1 || particles < 2) throw InputError("pair potential needs dim >= 1 and at least two particles");
    if (even_coeffs.empty()) even_coeffs.push_back(0.0);
    Potential p;
    p.kind_ = PotentialKind::PolynomialPair;
    p.coeffs_ = std::move(even_coeffs);
    p.dim_ = dim;
    p.eta_ = particles;
    p.cos_amp_ = cos_amplitude;
    p.cos_freq_ = cos_frequency;
    return p;
}

Potential Potential::double_well(double a, double b, int dim) {
    if (dim < 1) throw InputError("dimension must be positive");
    Potential p;
    p.kind_ = PotentialKind::DoubleWell1D;
    p.coeffs_ = {a, b};
    p.dim_ = dim;
    return p;
}

Potential Potential::quadratic(double k, int dim, int particles) {
    if (dim < 1 || particles < 1) throw InputError("dimension and particle count must be positive");
    Potential p;
    p.kind_ = PotentialKind::Quadratic;
    p.coeffs_ = {k};
    p.dim_ = dim;
    p.eta_ = particles;
    return p;
}

Potential Potential::cosine_plus_quadratic(double a, double f, double b, int dim) {
    if (dim < 1) throw InputError("dimension must be positive");
    Potential p;
    p.kind_ = PotentialKind::CosinePlusQuadratic;
    p.coeffs_ = {a, f, b};
    p.dim_ = dim;
    return p;
}

Potential Potential::augmented(const Potential &base, Region region, double kappa) {
    if (region.dim() != base.config_dim()) throw InputError("region dimension does not match configuration dimension");
    if (kappa < 0) throw InputError("stiffness kappa must be nonnegative");
    Potential p;
    p.kind_ = PotentialKind::Augmented;
    p.dim_ = base.dim_;
    p.eta_ = base.eta_;
    p.base_ = std::make_shared<const Potential>(base);
    p.region_ = std::make_shared<const Region>(std::move(region));
    p.kappa_ = kappa;
    return p;
}

int Potential::pair_degree() const {
    if (kind_ != PotentialKind::PolynomialPair) return 0;
    int deg = 0;
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] != 0.0) deg = static_cast<int>(2 * i);
    }
    return deg;
}

const Potential &Potential::base() const {
    if (!base_) throw InputError("potential has no base");
    return *base_;
}

const Region &Potential::region() const {
    if (!region_) throw InputError("potential has no region");
    return *region_;
}

void Potential::check_dim(const Vec &x) const {
    if (x.size() != config_dim()) {
        std::ostringstream os;
        os << "configuration has length " << x.size() << ", expected eta*d = " << config_dim();
        throw InputError(os.str());
    }
}

// ---------------------------------------------------------------------------------------------
// Radial pair profile

double Potential::pair_value(double r) const {
    double v = 0.0, r2 = r * r, p = 1.0;
    for (double a : coeffs_) {
        v += a * p;
        p *= r2;
    }
    return v + cos_amp_ * std::cos(cos_freq_ * r);
}

double Potential::pair_d1(double r) const { return r * pair_d1_over_r(r); }

double Potential::pair_d1_over_r(double r) const {
    // sum_i 2i a_i r^(2i-2) - b w^2 sinc(w r)
    double v = 0.0, r2 = r * r, p = 1.0;
    for (size_t i = 1; i < coeffs_.size(); ++i) {
        v += 2.0 * static_cast<double>(i) * coeffs_[i] * p;
        p *= r2;
    }
    return v - cos_amp_ * cos_freq_ * cos_freq_ * sinc(cos_freq_ * r);
}

double Potential::pair_d2(double r) const {
    double v = 0.0, r2 = r * r, p = 1.0;
    for (size_t i = 1; i < coeffs_.size(); ++i) {
        double k = 2.0 * static_cast<double>(i);
        v += k * (k - 1.0) * coeffs_[i] * p;
        p *= r2;
    }
    return v - cos_amp_ * cos_freq_ * cos_freq_ * std::cos(cos_freq_ * r);
}

// ---------------------------------------------------------------------------------------------
// Separable single-coordinate profiles

double Potential::separable_value(double x) const {
    switch (kind_) {
        case PotentialKind::DoubleWell1D: return coeffs_[0] * x * x * x * x - coeffs_[1] * x * x;
        case PotentialKind::Quadratic: return 0.5 * coeffs_[0] * x * x;
        case PotentialKind::CosinePlusQuadratic:
            return coeffs_[0] * std::cos(2 * kPi * coeffs_[1] * x) + coeffs_[2] * x * x;
        default: return 0.0;
    }
}

double Potential::separable_d1(double x) const {
    switch (kind_) {
        case PotentialKind::DoubleWell1D: return 4 * coeffs_[0] * x * x * x - 2 * coeffs_[1] * x;
        case PotentialKind::Quadratic: return coeffs_[0] * x;
        case PotentialKind::CosinePlusQuadratic: {
            double w = 2 * kPi * coeffs_[1];
            return -coeffs_[0] * w * std::sin(w * x) + 2 * coeffs_[2] * x;
        }
        default: return 0.0;
    }
}

double Potential::separable_d2(double x) const {
    switch (kind_) {
        case PotentialKind::DoubleWell1D: return 12 * coeffs_[0] * x * x - 2 * coeffs_[1];
        case PotentialKind::Quadratic: return coeffs_[0];
        case PotentialKind::CosinePlusQuadratic: {
            double w = 2 * kPi * coeffs_[1];
            return -coeffs_[0] * w * w * std::cos(w * x) + 2 * coeffs_[2];
        }
        default: return 0.0;
    }
}

// ---------------------------------------------------------------------------------------------
// Evaluation

double Potential::eval(const Vec &x) const {
    check_dim(x);
    switch (kind_) {
        case PotentialKind::PolynomialPair: {
            double v = 0.0;
            for (int i = 0; i < eta_; ++i) {
                for (int j = i + 1; j < eta_; ++j) {
                    double r = (x.segment(i * dim_, dim_) - x.segment(j * dim_, dim_)).norm();
                    v += pair_value(r);
                }
            }
            return v;
        }
        case PotentialKind::Augmented: {
            double d = region_->distance(x);
            return base_->eval(x) + kappa_ * d * d;
        }
        default: {
            double v = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) v += separable_value(x[i]);
            return v;
        }
    }
}

Vec Potential::gradient(const Vec &x) const {
    check_dim(x);
    Vec g = Vec::Zero(x.size());
    switch (kind_) {
        case PotentialKind::PolynomialPair:
            for (int i = 0; i < eta_; ++i) {
                for (int j = i + 1; j < eta_; ++j) {
                    Vec dx = x.segment(i * dim_, dim_) - x.segment(j * dim_, dim_);
                    Vec f = pair_d1_over_r(dx.norm()) * dx;
                    g.segment(i * dim_, dim_) += f;
                    g.segment(j * dim_, dim_) -= f;
                }
            }
            return g;
        case PotentialKind::Augmented:
            return base_->gradient(x) + 2.0 * kappa_ * (x - region_->project(x));
        default:
            for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = separable_d1(x[i]);
            return g;
    }
}

double Potential::derivative_1d(double x) const {
    if (config_dim() != 1) throw InputError("derivative_1d needs a one-coordinate potential");
    if (kind_ == PotentialKind::Augmented) {
        const double p = region_->shape == Region::Shape::Box
                             ? std::clamp(x, region_->lo[0], region_->hi[0])
                             : std::clamp(x, region_->center[0] - region_->radius, region_->center[0] + region_->radius);
        return base_->derivative_1d(x) + 2.0 * kappa_ * (x - p);
    }
    return separable_d1(x);
}

Mat Potential::hessian(const Vec &x) const {
    check_dim(x);
    const Eigen::Index n = x.size();
    Mat h = Mat::Zero(n, n);
    switch (kind_) {
        case PotentialKind::PolynomialPair:
            for (int i = 0; i < eta_; ++i) {
                for (int j = i + 1; j < eta_; ++j) {
                    Vec dx = x.segment(i * dim_, dim_) - x.segment(j * dim_, dim_);
                    double r = dx.norm();
                    double g = pair_d1_over_r(r);
                    Mat a = g * Mat::Identity(dim_, dim_);
                    if (r > 0.0) {
                        Vec u = dx / r;
                        a += (pair_d2(r) - g) * u * u.transpose();
                    }
                    h.block(i * dim_, i * dim_, dim_, dim_) += a;
                    h.block(j * dim_, j * dim_, dim_, dim_) += a;
                    h.block(i * dim_, j * dim_, dim_, dim_) -= a;
                    h.block(j * dim_, i * dim_, dim_, dim_) -= a;
                }
            }
            return h;
        case PotentialKind::Augmented: {
            h = base_->hessian(x);
            const Region &reg = *region_;
            if (reg.shape == Region::Shape::Box) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (x[i] < reg.lo[i] || x[i] > reg.hi[i]) h(i, i) += 2.0 * kappa_;
                }
            } else {
                Vec d = x - reg.center;
                double rn = d.norm();
                if (rn > reg.radius) {
                    Vec u = d / rn;
                    Mat uu = u * u.transpose();
                    h += 2.0 * kappa_ * (uu + (1.0 - reg.radius / rn) * (Mat::Identity(n, n) - uu));
                }
            }
            return h;
        }
        default:
            for (Eigen::Index i = 0; i < n; ++i) h(i, i) = separable_d2(x[i]);
            return h;
    }
}

double Potential::laplacian(const Vec &x) const { return hessian(x).trace(); }

std::string Potential::describe() const {
    std::ostringstream os;
    os << to_string(kind_) << "(d=" << dim_ << ", eta=" << eta_;
    if (kind_ == PotentialKind::Augmented) {
        os << ", kappa=" << kappa_ << ", base=" << base_->describe();
    } else {
        os << ", coeffs=[";
        for (size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
        os << "]";
        if (cos_amp_ != 0.0) os << ", cos=" << cos_amp_ << "*cos(" << cos_freq_ << " r)";
    }
    os << ")";
    return os.str();
}

double witten_u(const Potential &v, double beta, const Vec &x) {
    if (!(beta > 0)) throw InputError("beta must be positive");
    Vec g = v.gradient(x);
    return -0.25 * beta * g.squaredNorm() + 0.5 * v.laplacian(x);
}

double alpha_v_scan(const Potential &pair, double r_max, int points) {
    if (pair.kind() != PotentialKind::PolynomialPair) throw InputError("alpha_V is defined for pair potentials");
    if (points < 2 || !(r_max > 0)) throw InputError("alpha_V scan needs r_max > 0 and >= 2 points");
    double best = 0.0;
    for (int i = 0; i < points; ++i) {
        double r = r_max * static_cast<double>(i) / (points - 1);
        best = std::max(best, std::abs(pair.pair_d1_over_r(r)));
    }
    return best;
}

CurvatureScan pair_curvature_scan(const Potential &pair, double r_lo, double r_hi, int points) {
    if (pair.kind() != PotentialKind::PolynomialPair) throw InputError("curvature scan is defined for pair potentials");
    if (points < 2 || !(r_hi > r_lo)) throw InputError("curvature scan needs r_hi > r_lo and >= 2 points");
    CurvatureScan out;
    for (int i = 0; i < points; ++i) {
        double r = r_lo + (r_hi - r_lo) * static_cast<double>(i) / (points - 1);
        double c = std::abs(pair.pair_d2(r));
        if (c > out.gamma) {
            out.gamma = c;
            out.r_at_max = r;
        }
    }
    return out;
}

}  // namespace fpflux
