#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fpflux/discretize.hpp"
#include "fpflux/resources.hpp"

using namespace fpflux;

namespace {

CostModel zero_o_constants() {
    CostModel m;
    m.set("c_log", 0.0);
    m.set("c_d", 0.0);
    return m;
}

}  // namespace

TEST(Resources, AlphaAExamples) {
    EXPECT_DOUBLE_EQ(alpha_A(1, 1, 1, 1, 1, 1), 2.0);
    // Second term at unit inputs is sqrt(eta).
    const double first = alpha_A(1, 1, 1, 1, 1, 1) - 1.0, doubled = alpha_A(2, 1, 1, 1, 1, 1) - std::sqrt(2.0);
    EXPECT_NEAR(doubled / first, std::pow(2.0, 1.5), 1e-14);
    EXPECT_DOUBLE_EQ(alpha_F(1, 1, 1, 1), 1.0);
}

TEST(Resources, ToffoliDistanceEncoding) {
    const CostModel m = zero_o_constants();
    EXPECT_EQ(toffoli_be_r(6, 3, 1e-3, m), 2 * 3 * 36 + 4 * 6 * 3 + 4 * 6 + 2 * 2);
    EXPECT_EQ(toffoli_be_r(6, 3, 1e-3, m), 316);
    EXPECT_EQ(toffoli_be_r(1, 1, 1e-3, m), 10);
    // Leading 2 d n^2 term quadruples.
    const long lead = 2 * 3 * 36;
    EXPECT_EQ(toffoli_be_r(12, 3, 1e-3, m) - (4 * 12 * 3 + 4 * 12 + 4), 4 * lead);
}

TEST(Resources, ToffoliGradientAndTotal) {
    EXPECT_EQ(toffoli_grad_v(1, 1, 1, 1), 3);
    ToffoliBreakdown t = toffoli_a(6, 3, 2, 10);
    EXPECT_EQ(t.particle_term, 10 * 3 * 6);
    EXPECT_EQ(t.potential_term, 2 * 2 * 3 * 36);
    EXPECT_EQ(t.kinetic_term, 18 * 18);
    EXPECT_EQ(t.total, t.particle_term + t.potential_term + t.kinetic_term);
    ToffoliBreakdown k2 = toffoli_a(6, 3, 4, 10);
    EXPECT_EQ(k2.potential_term, 2 * t.potential_term);
    EXPECT_EQ(k2.particle_term, t.particle_term);
    EXPECT_EQ(k2.kinetic_term, t.kinetic_term);
}

TEST(Resources, QueryCountScaling) {
    const double eps = 1e-6;
    CostModel m;
    const double lead1 = d_max_formula(1.0, eps, 10.0) - std::log(1 / eps);
    const double lead4 = d_max_formula(4.0, eps, 10.0) - std::log(1 / eps);
    EXPECT_NEAR(lead4 / lead1, 2.0, 1e-12);
    const double d = d_max_formula(1.0, eps, 10.0), dh = d_max_formula(1.0, eps / 2, 10.0);
    EXPECT_LE(dh / d - 1, std::sqrt(std::log(2.0) / std::log(1 / eps)) + 1e-12);
    EXPECT_GT(dh, d);
}

TEST(Resources, MultiplexedNeverExceedsNaive) {
    for (double t : {0.1, 1.0, 10.0})
        for (double a : {1.0, 10.0}) {
            QueryCounts q = query_counts(t, 1e-6, a);
            EXPECT_LE(q.multiplexed_total, q.naive_total);
            if (q.M_q > 1) EXPECT_LT(q.multiplexed_total, q.naive_total);
            EXPECT_DOUBLE_EQ(q.flux_queries, 2.0 * q.d_max_formula / 1e-6);
        }
    QueryCounts q = query_counts(1.0, 1e-6, 10.0);
    EXPECT_GE(q.naive_ratio, q.M_q / 4.0);
    QueryCounts noqae = query_counts(1.0, 1e-6, 10.0, CostModel{}, false);
    EXPECT_DOUBLE_EQ(noqae.qae_factor, 1.0);
}

TEST(Resources, StateprepCost) {
    EXPECT_NEAR(stateprep_cost(1, 1, 1, 1, 1, 1, 0, 1, 0.5), std::sqrt(0.5) * 2.0, 1e-15);
    const double eta = 3, d = 2, n = 7;
    EXPECT_NEAR(stateprep_cost(eta, d, 1, 1, 1, n, 0, 1, 0.5), std::sqrt(eta * d / 2) * (eta + n), 1e-12);
    EXPECT_NEAR(stateprep_cost(2, 1, 4, 3, 1.5, 16, 2, 1.2, 1e-3) / stateprep_cost(2, 1, 1, 3, 1.5, 16, 2, 1.2, 1e-3), 0.5,
                1e-14);
    // Composition with the kappa choice: kappa ~ eps^{-4} dominates at small eps.
    const double k1 = kappa_big_o(0.5, 1.0, 1e-2), k2 = kappa_big_o(0.5, 1.0, 5e-3);
    EXPECT_NEAR(k2 / k1, 16.0, 1e-12);
    EXPECT_GT(stateprep_cost(1, 1, 1, 1, 1, 1, k2, 1, 5e-3), 10 * stateprep_cost(1, 1, 1, 1, 1, 1, k1, 1, 1e-2));
}

TEST(Resources, FormulasAreMonotone) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.5, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        double args[6];
        for (double &a : args) a = u(rng);
        const double base = alpha_A(args[0], args[1], args[2], args[3], args[4], args[5]);
        // beta and L trade one term against the other, so only the remaining arguments are monotone.
        for (int i : {0, 1, 4, 5}) {
            double b[6];
            std::copy(args, args + 6, b);
            b[i] *= 1.5;
            EXPECT_GE(alpha_A(b[0], b[1], b[2], b[3], b[4], b[5]), base) << "argument " << i;
        }
        const int n = 1 + trial % 8, d = 1 + trial % 3, k = 1 + trial % 4, eta = 1 + trial % 5;
        EXPECT_GE(toffoli_be_r(n + 1, d, 1e-3), toffoli_be_r(n, d, 1e-3));
        EXPECT_GE(toffoli_be_r(n, d + 1, 1e-3), toffoli_be_r(n, d, 1e-3));
        EXPECT_GE(toffoli_be_r(n, d, 1e-4), toffoli_be_r(n, d, 1e-3));
        EXPECT_GE(toffoli_u_f(n + 1, d, 1e-3), toffoli_u_f(n, d, 1e-3));
        EXPECT_GE(toffoli_grad_v(n, d, k + 1, eta), toffoli_grad_v(n, d, k, eta));
        EXPECT_GE(toffoli_a(n, d, k, eta + 1).total, toffoli_a(n, d, k, eta).total);
        EXPECT_GE(d_max_formula(args[0] * 2, 1e-4, args[1]), d_max_formula(args[0], 1e-4, args[1]));
        EXPECT_GE(stateprep_cost(args[0], args[1], 1, args[2], args[3], args[4], 1, args[5], 1e-3),
                  stateprep_cost(args[0], args[1], 1, args[2], args[3], args[4], 0, args[5], 1e-3));
    }
}

TEST(Resources, DenseNormBelowAlphaA) {
    // One-dimensional OU. The Nyquist wavenumber is pi N / (2L), so the kinetic constant is frozen at pi/2.
    CostModel m;
    m.set("c_alpha_kinetic", std::numbers::pi / 2);
    for (double beta : {1.0, 4.0})
        for (double l : {4.0, 6.0, 8.0})
            for (int n : {16, 32, 64, 128, 256}) {
                auto a = build_sos(Potential::quadratic(1.0), beta, Basis::plane_wave(n, l));
                const double norm = Eigen::SelfAdjointEigenSolver<CMat>(build_dilated_sqrt(a), Eigen::EigenvaluesOnly)
                                        .eigenvalues()
                                        .cwiseAbs()
                                        .maxCoeff();
                EXPECT_LE(norm, alpha_A(1, 1, beta, l, n, 1.0, m)) << "beta=" << beta << " L=" << l << " N=" << n;
            }
}

TEST(Resources, CostModelRegistry) {
    CostModel m;
    for (const auto &[name, value] : m.constants()) EXPECT_DOUBLE_EQ(value, 1.0) << name;
    EXPECT_THROW(m.set("c_unknown", 2.0), Error);
    for (const auto &f : CostModel::registry()) {
        EXPECT_FALSE(f.expression.empty());
        for (const auto &c : f.constants) EXPECT_NO_THROW(m.get(c)) << f.name;
    }
}
