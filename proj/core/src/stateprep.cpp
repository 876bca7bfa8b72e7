#include "fpflux/stateprep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fpflux/special.hpp"

namespace fpflux {

void LocalPrepProblem::validate() const {
    if (base.config_dim() != 1) throw UnsupportedError("local state preparation is implemented for 1D potentials");
    if (region.shape != Region::Shape::Box || region.dim() != 1) throw InputError("region must be a 1D interval");
    if (!(m > 0) || !(beta > 0) || !(box > 0)) throw InputError("m, beta and box must be positive");
    if (!(eps > 0 && eps < 1)) throw InputError("eps must lie in (0, 1)");
    if (!(region.lo[0] > -box && region.hi[0] < box)) throw InputError("region must lie strictly inside the box");
    if (N < 8) throw InputError("grid needs at least 8 cells");
}

namespace {

double v1(const Potential &v, double x) { return v.eval(Vec::Constant(1, x)); }

double shift_of(const LocalPrepProblem &p) {
    double s = std::numeric_limits<double>::infinity();
    const double lo = p.region.lo[0], hi = p.region.hi[0];
    for (int i = 0; i <= 2000; ++i) s = std::min(s, v1(p.base, lo + (hi - lo) * i / 2000.0));
    return s;
}

// Integral over [a, b] split at geometrically spaced points away from `edge` (either a or b),
// so that a boundary layer of width `w` is resolved by the first panels.
template <class F>
double layered_integral(F &&f, double a, double b, bool edge_at_b, double w, double tol) {
    std::vector<double> cuts;
    for (double d = w; d < b - a; d *= 4.0) cuts.push_back(d);
    double sum = 0.0, prev = 0.0;
    for (double d : cuts) {
        sum += edge_at_b ? adaptive_integrate(f, b - d, b - prev, tol) : adaptive_integrate(f, a + prev, a + d, tol);
        prev = d;
    }
    sum += edge_at_b ? adaptive_integrate(f, a, b - prev, tol) : adaptive_integrate(f, a + prev, b, tol);
    return sum;
}

}  // namespace

GapTerms gap_terms(const LocalPrepProblem &p, double kappa, double tol) {
    p.validate();
    if (!(kappa >= 0)) throw InputError("kappa must be nonnegative");
    Potential vr = Potential::augmented(p.base, p.region, kappa);
    const double s = shift_of(p);
    const double lo = p.region.lo[0], hi = p.region.hi[0];
    auto wr = [&](double x) { return std::exp(-p.beta * (v1(vr, x) - s)); };
    auto w = [&](double x) { return std::exp(-p.beta * (v1(p.base, x) - s)); };
    GapTerms g;
    g.kappa = kappa;
    g.z_r = adaptive_integrate(w, lo, hi, tol);
    const double layer = 1.0 / std::sqrt(p.beta * std::max(kappa, 1e-12));
    const double z_out = layered_integral(wr, -p.box, lo, true, layer, tol) + layered_integral(wr, hi, p.box, false, layer, tol);
    g.z = g.z_r + z_out;
    g.formula = 2.0 * (1.0 - std::sqrt(g.z_r / g.z));
    const double a = 1.0 / std::sqrt(g.z), b = 1.0 / std::sqrt(g.z_r);
    auto inside = [&](double x) {
        const double e = std::exp(-0.5 * p.beta * (v1(p.base, x) - s));
        return (a * e - b * e) * (a * e - b * e);
    };
    auto outside = [&](double x) { return wr(x) / g.z; };
    g.direct = adaptive_integrate(inside, lo, hi, tol) + layered_integral(outside, -p.box, lo, true, layer, tol) +
               layered_integral(outside, hi, p.box, false, layer, tol);
    return g;
}

KappaChoice choose_kappa(const LocalPrepProblem &p, double rel_tol) {
    const double target = p.eps * p.eps;
    auto f = [&](double k) { return gap_terms(p, k).formula; };
    KappaChoice c;
    double lo = 1.0, hi = 1.0;
    if (f(1.0) <= target) {
        lo = 0.5;
        while (f(lo) <= target) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-12) {
                c.kappa = hi;
                c.gap_sq = f(hi);
                return c;
            }
        }
    } else {
        hi = 2.0;
        while (f(hi) > target) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e14) throw NumericError("no kappa up to 1e14 reaches the requested gap");
        }
    }
    while (hi / lo - 1.0 > rel_tol) {
        const double mid = std::sqrt(lo * hi);
        if (f(mid) <= target) hi = mid;
        else lo = mid;
        ++c.iterations;
    }
    c.kappa = hi;
    GapTerms g = gap_terms(p, hi);
    c.gap_sq = g.formula;
    // Z_R with the physical (unshifted) normalisation.
    const double z_r = g.z_r * std::exp(-p.beta * shift_of(p));
    c.kappa_big_o = 1.0 / (z_r * z_r * p.beta * std::pow(p.eps, 4));
    return c;
}

CVec default_warm_start(const LocalPrepProblem &p, const Basis &b) {
    const double c = p.region.centroid()[0];
    CVec u(b.dimension());
    for (long i = 0; i < b.dimension(); ++i) {
        const double x = b.point(i)[0];
        u(i) = std::exp(-p.beta * p.m * (x - c) * (x - c) / 4.0);
    }
    return u / u.norm();
}

namespace {

struct Spectral {
    Basis basis;
    Vec evals;
    Mat evecs;
    Vec target;
    CVec u0;
    Vec coef;   // coefficients of u0/<target|u0> - target in the eigenbasis
    double overlap = 0.0;
};

Spectral spectral_setup(const LocalPrepProblem &p, double kappa) {
    p.validate();
    if (!(kappa >= 0)) throw InputError("kappa must be nonnegative");
    Spectral s;
    s.basis = Basis::finite_difference(p.N, p.box, 1, 1, Boundary::Reflecting);
    Potential vr = Potential::augmented(p.base, p.region, kappa);
    Mat h = build_hbeta(vr, p.beta, s.basis);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    s.evals = es.eigenvalues();
    s.evecs = es.eigenvectors();
    Vec V = potential_on_grid(vr, s.basis);
    const double vmin = V.minCoeff();
    s.target = (-0.5 * p.beta * (V.array() - vmin)).exp().matrix();
    s.target /= s.target.norm();
    s.u0 = p.warm_start ? *p.warm_start : default_warm_start(p, s.basis);
    if (s.u0.size() != s.basis.dimension()) throw InputError("warm start dimension does not match the grid");
    s.u0 /= s.u0.norm();
    const cplx ov = s.target.cast<cplx>().dot(s.u0);
    s.overlap = std::abs(ov);
    if (s.overlap < 0.1) throw InputError("warm start overlap with the target is below 0.1");
    if (s.u0.imag().cwiseAbs().maxCoeff() > 0) throw UnsupportedError("warm start must be real");
    Vec diff = s.u0.real() / ov.real() - s.target;
    s.coef = s.evecs.transpose() * diff;
    // The top eigenvector is the target itself; drop the rounding residue along it.
    s.coef[s.coef.size() - 1] = 0.0;
    return s;
}

double distance_at(const Spectral &s, double t) {
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < s.coef.size(); ++i) d2 += std::exp(2.0 * s.evals[i] * t) * s.coef[i] * s.coef[i];
    return std::sqrt(d2);
}

}  // namespace

DynamicsResult prep_by_dynamics(const LocalPrepProblem &p, double kappa, double t) {
    if (!(t >= 0)) throw InputError("time must be nonnegative");
    Spectral s = spectral_setup(p, kappa);
    DynamicsResult r;
    r.t = t;
    r.kappa = kappa;
    r.target = s.target;
    r.overlap = s.overlap;
    r.gap = -s.evals[s.evals.size() - 2];
    r.initial_distance = distance_at(s, 0.0);
    r.distance = distance_at(s, t);
    Vec prop = s.coef;
    for (Eigen::Index i = 0; i < prop.size(); ++i) prop[i] *= std::exp(s.evals[i] * t);
    Vec u = s.target + s.evecs * prop;
    r.state = (u / u.norm()).cast<cplx>();
    Vec rho = Vec::Zero(u.size());
    const double shift = shift_of(p);
    for (long i = 0; i < s.basis.dimension(); ++i) {
        Vec x = s.basis.point(i);
        if (p.region.contains(x)) rho[i] = std::exp(-0.5 * p.beta * (v1(p.base, x[0]) - shift));
    }
    if (rho.norm() > 0) rho /= rho.norm();
    r.restricted_distance = (u / u.norm() - rho).norm();
    return r;
}

MixingTime mixing_time(const LocalPrepProblem &p, double kappa, double eps) {
    if (!(eps > 0)) throw InputError("eps must be positive");
    Spectral s = spectral_setup(p, kappa);
    MixingTime mt;
    mt.gap = -s.evals[s.evals.size() - 2];
    if (!(mt.gap > 0)) throw NumericError("generator has no spectral gap");
    mt.initial_distance = distance_at(s, 0.0);
    mt.bound = std::log(mt.initial_distance / eps) / mt.gap;
    if (mt.initial_distance <= eps) return mt;
    double lo = 0.0, hi = 1.0 / mt.gap;
    while (distance_at(s, hi) > eps) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw NumericError("distance does not reach eps");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (distance_at(s, mid) > eps) lo = mid;
        else hi = mid;
    }
    mt.t_eps = hi;
    return mt;
}

ConvexityReport verify_convexity(const LocalPrepProblem &p, double kappa, int grid, long pairs, std::uint64_t seed,
                                 double tol) {
    p.validate();
    if (!(kappa >= 0.5)) throw InputError("convexity check requires kappa >= 1/2");
    if (grid < 2) throw InputError("grid needs at least two points");
    Potential vr = Potential::augmented(p.base, p.region, kappa);
    ConvexityReport rep;
    rep.kappa = kappa;
    rep.min_hessian = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double x = -p.box + 2.0 * p.box * i / (grid - 1);
        const double h = vr.hessian(Vec::Constant(1, x))(0, 0);
        if (h < rep.min_hessian) {
            rep.min_hessian = h;
            rep.min_hessian_at = x;
        }
    }
    rep.hessian_ok = rep.min_hessian >= p.m - tol;

    std::mt19937_64 rng(seed);
    const double lo = p.region.lo[0], hi = p.region.hi[0];
    std::uniform_real_distribution<double> in(lo, hi), all(-p.box, p.box);
    rep.worst_stated_ratio = std::numeric_limits<double>::infinity();
    auto grad = [&](double x) { return vr.gradient(Vec::Constant(1, x))[0]; };
    for (long k = 0; k < pairs; ++k) {
        const double x = in(rng);
        double y;
        do y = all(rng);
        while (y >= lo && y <= hi);
        const double dx = x - y;
        const double lhs = (grad(x) - grad(y)) * dx;
        const double ratio = lhs / (dx * dx);
        rep.worst_stated_ratio = std::min(rep.worst_stated_ratio, ratio);
        if (ratio < p.m - tol) {
            ++rep.monotone_violations;
            if (!rep.monotone_counterexample) rep.monotone_counterexample = std::make_pair(x, y);
        }
        if (ratio < p.m + 2.0 * kappa - 1.0 - tol) {
            ++rep.stated_violations;
            if (!rep.stated_counterexample) rep.stated_counterexample = std::make_pair(x, y);
        }
        ++rep.pairs;
    }
    return rep;
}

PotentialCurves potential_curves(const Potential &base, const Region &R, const Region &P, double kappa, double box,
                                 int points) {
    if (points < 2) throw InputError("need at least two points");
    Potential vr = Potential::augmented(base, R, kappa);
    Potential vp = Potential::augmented(base, P, kappa);
    PotentialCurves c;
    for (int i = 0; i < points; ++i) {
        const double x = -box + 2.0 * box * i / (points - 1);
        c.x.push_back(x);
        c.v.push_back(v1(base, x));
        c.v_r.push_back(v1(vr, x));
        c.v_p.push_back(v1(vp, x));
    }
    return c;
}

}  // namespace fpflux
