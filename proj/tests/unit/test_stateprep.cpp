#include <cmath>

#include <gtest/gtest.h>

#include "fpflux/special.hpp"
#include "fpflux/stateprep.hpp"

using namespace fpflux;

namespace {

LocalPrepProblem default_problem() {
    LocalPrepProblem p;
    p.N = 256;
    return p;
}

// Z and Z_R by plain composite Simpson on a fine grid, independent of the layered quadrature.
double simpson(const std::function<double(double)> &f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
    return s * h / 3;
}

}  // namespace

TEST(Stateprep, GapIdentityAtModerateKappa) {
    LocalPrepProblem p = default_problem();
    GapTerms g = gap_terms(p, 20.0);
    EXPECT_NEAR(g.formula, g.direct, 1e-10);
    Potential aug = Potential::augmented(p.base, p.region, 20.0);
    auto e = [&](double x) { return std::exp(-p.beta * aug.eval(Vec::Constant(1, x))); };
    auto eb = [&](double x) { return std::exp(-p.beta * p.base.eval(Vec::Constant(1, x))); };
    // Z and Z_R share an arbitrary energy shift; their ratio does not.
    const double ratio = simpson(eb, -0.75, -0.25, 20000) / simpson(e, -p.box, p.box, 400000);
    EXPECT_NEAR(g.z_r / g.z, ratio, 1e-9 * ratio);
    EXPECT_NEAR(g.formula, 2 * (1 - std::sqrt(ratio)), 1e-9);
}

TEST(Stateprep, GapDecreasesInKappa) {
    LocalPrepProblem p = default_problem();
    double prev = 1e300;
    for (double k : {1.0, 10.0, 100.0, 1e3, 1e4, 1e5}) {
        const double g = gap_terms(p, k).formula;
        EXPECT_LT(g, prev) << "kappa=" << k;
        EXPECT_GT(g, 0.0);
        prev = g;
    }
}

TEST(Stateprep, ConfiningBaseNeedsLittleKappa) {
    // Base rising steeply off R: already Z close to Z_R.
    LocalPrepProblem p;
    p.base = Potential::quadratic(400.0);
    p.region = Region::interval(-1.0, 1.0);
    p.beta = 1.0;
    p.eps = 1e-3;
    GapTerms g = gap_terms(p, 1.0);
    EXPECT_LE(std::sqrt(g.formula), p.eps);
}

TEST(Stateprep, EpsilonHalvingGrowsKappaSixteenfold) {
    LocalPrepProblem p = default_problem();
    p.eps = 1e-3;
    KappaChoice a = choose_kappa(p);
    p.eps = 5e-4;
    KappaChoice b = choose_kappa(p);
    EXPECT_LE(a.gap_sq, 1e-6 * (1 + 1e-6));
    EXPECT_NEAR(b.kappa / a.kappa, 16.0, 1.0);
}

TEST(Stateprep, ConvexityOnQuadraticBase) {
    LocalPrepProblem p;
    p.base = Potential::quadratic(2.0);
    p.m = 2.0;
    for (double kappa : {0.5, 1.0, 5.0, 20.0}) {
        ConvexityReport r = verify_convexity(p, kappa, 4001, 500);
        EXPECT_TRUE(r.hessian_ok) << "kappa=" << kappa;
        EXPECT_NEAR(r.min_hessian, 2.0, 1e-9);
        EXPECT_EQ(r.monotone_violations, 0);
    }
    EXPECT_THROW(verify_convexity(p, 0.4), InputError);
}

TEST(Stateprep, OrnsteinUhlenbeckDecayRate) {
    LocalPrepProblem p;
    p.base = Potential::quadratic(1.0);
    p.beta = 1.0;
    p.box = 8.0;
    p.region = Region::interval(-7.9, 7.9);
    p.N = 512;
    p.m = 1.0;
    DynamicsResult a = prep_by_dynamics(p, 0.0, 1.0), b = prep_by_dynamics(p, 0.0, 2.0);
    EXPECT_NEAR(a.gap, 1.0, 1e-3);
    const double slope = std::log(a.distance / b.distance);
    EXPECT_GE(slope, 0.95 * a.gap);
}

TEST(Stateprep, MixingTimeReachesTarget) {
    LocalPrepProblem p = default_problem();
    MixingTime mt = mixing_time(p, 20.0, p.eps);
    DynamicsResult d = prep_by_dynamics(p, 20.0, mt.t_eps);
    EXPECT_LE(d.distance, p.eps * (1 + 1e-6));
    EXPECT_LE(mt.t_eps, 1.1 * mt.bound);
    DynamicsResult later = prep_by_dynamics(p, 20.0, 2 * mt.t_eps);
    EXPECT_LT(later.distance, d.distance);
}

TEST(Stateprep, PotentialCurves) {
    LocalPrepProblem p = default_problem();
    PotentialCurves c = potential_curves(p.base, p.region, Region::interval(0.25, 0.75), 20.0, 2.0, 101);
    ASSERT_EQ(c.x.size(), 101u);
    for (size_t i = 0; i < c.x.size(); ++i) {
        EXPECT_GE(c.v_r[i], c.v[i] - 1e-15);
        EXPECT_GE(c.v_p[i], c.v[i] - 1e-15);
        if (p.region.contains(Vec::Constant(1, c.x[i]))) EXPECT_DOUBLE_EQ(c.v_r[i], c.v[i]);
    }
}

TEST(Stateprep, InvalidProblemsRejected) {
    LocalPrepProblem p;
    p.m = -1.0;
    EXPECT_THROW(p.validate(), Error);
    LocalPrepProblem q;
    q.region = Region::box(Vec::Zero(2), Vec::Ones(2));
    EXPECT_THROW(q.validate(), Error);
}
