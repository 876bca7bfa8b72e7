#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fpflux/potentials.hpp"

using namespace fpflux;

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec x(static_cast<long>(v.size()));
    long i = 0;
    for (double e : v) x[i++] = e;
    return x;
}

// Central differences of V, used as an independent check of the analytic gradient and Hessian.
Vec numeric_gradient(const Potential &v, const Vec &x, double h = 1e-6) {
    Vec g(x.size());
    for (long i = 0; i < x.size(); ++i) {
        Vec a = x, b = x;
        a[i] += h;
        b[i] -= h;
        g[i] = (v.eval(a) - v.eval(b)) / (2 * h);
    }
    return g;
}

Mat numeric_hessian(const Potential &v, const Vec &x, double h = 1e-5) {
    Mat m(x.size(), x.size());
    for (long i = 0; i < x.size(); ++i) {
        Vec a = x, b = x;
        a[i] += h;
        b[i] -= h;
        m.col(i) = (v.gradient(a) - v.gradient(b)) / (2 * h);
    }
    return m;
}

}  // namespace

TEST(Potentials, EvalExamples) {
    EXPECT_DOUBLE_EQ(Potential::double_well(1.0, 1.0).eval(vec({0.0})), 0.0);
    EXPECT_DOUBLE_EQ(Potential::polynomial_pair({0.0, 0.5}, 1, 2).eval(vec({0.0, 2.0})), 2.0);
    EXPECT_NEAR(Potential::cosine_plus_quadratic(1.0, 1.0, 1.0).eval(vec({0.5})), std::cos(std::numbers::pi) + 0.25,
                1e-15);
}

TEST(Potentials, GradientExamples) {
    EXPECT_DOUBLE_EQ(Potential::double_well().gradient(vec({1.0}))[0], 2.0);
    Vec g = Potential::polynomial_pair({0.0, 0.5}, 2, 2).gradient(vec({0, 0, 1, 0}));
    EXPECT_NEAR((g - vec({-1, 0, 1, 0})).norm(), 0.0, 1e-15);
    Potential aug = Potential::augmented(Potential::quadratic(0.0), Region::interval(-1, 1), 20.0);
    EXPECT_NEAR(aug.gradient(vec({2.0}))[0], 40.0, 1e-12);
}

TEST(Potentials, HessianExamples) {
    Mat h = Potential::polynomial_pair({0.0, 0.5}, 1, 2).hessian(vec({0.3, 1.7}));
    Mat expected(2, 2);
    expected << 1, -1, -1, 1;
    EXPECT_NEAR((h - expected).norm(), 0.0, 1e-14);
    Mat h3 = Potential::polynomial_pair({0.0, 0.5}, 1, 3).hessian(vec({-0.4, 0.2, 1.1}));
    Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(h3).eigenvalues();
    EXPECT_NEAR(ev[0], 0.0, 1e-12);
    EXPECT_NEAR(ev[1], 3.0, 1e-12);
    EXPECT_NEAR(ev[2], 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(Potential::double_well().hessian(vec({0.0}))(0, 0), -2.0);
}

TEST(Potentials, WittenExamples) {
    EXPECT_NEAR(witten_u(Potential::quadratic(1.0), 1.0, vec({0.0})), 0.5, 1e-15);
    EXPECT_NEAR(witten_u(Potential::quadratic(1.0), 4.0, vec({1.0})), -0.5, 1e-15);
    EXPECT_NEAR(witten_u(Potential::double_well(), 2.0, vec({1.0})), 3.0, 1e-14);
}

TEST(Potentials, DerivativesMatchFiniteDifferences) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const std::vector<Potential> cases = {
        Potential::double_well(1.0, 1.0, 2),
        Potential::cosine_plus_quadratic(1.0, 1.0, 1.0, 2),
        Potential::quadratic(3.0, 2, 2),
        Potential::polynomial_pair({0.0, 0.5, 0.1}, 2, 3, 0.7, 1.3),
        Potential::augmented(Potential::cosine_plus_quadratic(), Region::interval(-0.75, -0.25), 20.0),
    };
    for (const auto &v : cases) {
        for (int trial = 0; trial < 5; ++trial) {
            Vec x(v.config_dim());
            for (long i = 0; i < x.size(); ++i) x[i] = u(rng);
            const double scale = 1.0 + v.gradient(x).norm();
            EXPECT_LT((v.gradient(x) - numeric_gradient(v, x)).norm() / scale, 1e-7) << v.describe();
            const double hs = 1.0 + v.hessian(x).norm();
            EXPECT_LT((v.hessian(x) - numeric_hessian(v, x)).norm() / hs, 1e-6) << v.describe();
            EXPECT_NEAR(v.laplacian(x), v.hessian(x).trace(), 1e-10 * hs) << v.describe();
        }
    }
}

TEST(Potentials, HessianIsSymmetric) {
    Potential v = Potential::polynomial_pair({0.0, 0.5, 0.1}, 3, 4, 1.0, 1.0);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 10; ++trial) {
        Vec x(v.config_dim());
        for (long i = 0; i < x.size(); ++i) x[i] = n(rng);
        Mat h = v.hessian(x);
        EXPECT_LT((h - h.transpose()).norm(), 1e-13);
    }
}

TEST(Potentials, PairRadialLimitAtZero) {
    Potential v = Potential::polynomial_pair({0.0, 0.5, 0.25}, 1, 2, 1.0, 2.0);
    // V'(r)/r -> V''(0) as r -> 0.
    EXPECT_NEAR(v.pair_d1_over_r(0.0), v.pair_d2(0.0), 1e-12);
    EXPECT_NEAR(v.pair_d1_over_r(1e-4), v.pair_d1(1e-4) / 1e-4, 1e-8);
}

TEST(Potentials, AugmentedMatchesBaseInsideRegion) {
    Potential base = Potential::cosine_plus_quadratic();
    Region r = Region::interval(-0.75, -0.25);
    Potential aug = Potential::augmented(base, r, 7.0);
    for (double x : {-0.7, -0.5, -0.3}) EXPECT_DOUBLE_EQ(aug.eval(vec({x})), base.eval(vec({x})));
    for (double x : {-1.5, 0.0, 1.0})
        EXPECT_NEAR(aug.eval(vec({x})), base.eval(vec({x})) + 7.0 * std::pow(r.distance(vec({x})), 2), 1e-14);
}

TEST(Potentials, RegionGeometry) {
    Region b = Region::box(vec({0, 0}), vec({1, 2}));
    EXPECT_TRUE(b.contains(vec({0.5, 1.5})));
    EXPECT_FALSE(b.contains(vec({1.5, 1.5})));
    EXPECT_NEAR((b.project(vec({3, -1})) - vec({1, 0})).norm(), 0.0, 0.0);
    EXPECT_NEAR(b.distance(vec({3, 2})), 2.0, 1e-15);
    Region s = Region::ball(vec({0, 0}), 1.0);
    EXPECT_NEAR(s.distance(vec({3, 4})), 4.0, 1e-15);
    EXPECT_NEAR(s.project(vec({3, 4})).norm(), 1.0, 1e-15);
}

TEST(Potentials, KindNamesRoundTrip) {
    for (auto k : {PotentialKind::PolynomialPair, PotentialKind::DoubleWell1D, PotentialKind::Quadratic,
                   PotentialKind::CosinePlusQuadratic})
        EXPECT_EQ(potential_kind_from_string(to_string(k)), k);
    EXPECT_THROW(potential_kind_from_string("sextic"), Error);
}

TEST(Potentials, CurvatureScanFindsCosineExtremum) {
    Potential v = Potential::polynomial_pair({0.0}, 1, 2, 1.0, 1.0);
    CurvatureScan c = pair_curvature_scan(v, 0.5, 4.0);
    EXPECT_NEAR(c.gamma, 1.0, 1e-6);
    EXPECT_NEAR(c.r_at_max, std::numbers::pi, 1e-3);
    EXPECT_NEAR(alpha_v_scan(Potential::polynomial_pair({0.0, 0.5}, 1, 2), 3.0), 1.0, 1e-12);
}
