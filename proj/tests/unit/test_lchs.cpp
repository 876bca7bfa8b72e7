#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fpflux/discretize.hpp"
#include "fpflux/lchs.hpp"

using namespace fpflux;

namespace {

// e^{-A^2 t} for Hermitian A through an independent eigendecomposition.
CMat gaussian_of(const CMat &a, double t) {
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    Vec f = (-t * es.eigenvalues().array().square()).exp();
    return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST(Lchs, TruncationWavenumberExamples) {
    EXPECT_NEAR(truncation_wavenumber(1.0, 1e-3), 5.5575, 1e-4);
    EXPECT_NEAR(truncation_wavenumber(0.25, 1e-3), 0.5 * truncation_wavenumber(1.0, 1e-3), 1e-12);
    for (double t : {0.1, 1.0, 10.0})
        for (double eps : {1e-3, 1e-6}) {
            const double k = truncation_wavenumber(t, eps);
            EXPECT_GT(k, 2 * std::sqrt(t));
            EXPECT_LE(std::erfc(k / (2 * std::sqrt(t))), eps);
        }
}

TEST(Lchs, KernelIntegratesToOne) {
    for (double t : {0.1, 1.0, 7.0}) {
        double s = 0.0;
        const double h = 1e-3 * std::sqrt(t);
        for (double k = -40 * std::sqrt(t); k <= 40 * std::sqrt(t); k += h) s += h * gaussian_kernel(k, t);
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
}

TEST(Lchs, PlanCertificateAndSubnormalisation) {
    LchsPlan p = build_plan(1.0, 1e-6, 1.0);
    EXPECT_LE(p.certificate, p.eps_quad);
    EXPECT_GE(p.alpha_g, 1 - 1e-6);
    EXPECT_LE(p.alpha_g, 1 + 1e-5);
    // Independent grid check at points the certificate grid does not use.
    double worst = 0.0;
    for (int i = 0; i <= 777; ++i) {
        const double x = -1.0 + 2.0 * i / 777.0;
        cplx s = 0.0;
        for (int j = 0; j < p.M_q; ++j) s += p.coeffs[j] * std::exp(cplx(0, -p.nodes[j] * x));
        worst = std::max(worst, std::abs(s - std::exp(-x * x)));
    }
    EXPECT_LE(worst, p.eps);
}

TEST(Lchs, SmallTimePlanCertifiesWithFewNodes) {
    LchsPlan p = build_plan(1e-6, 1e-3, 1.0);
    EXPECT_LE(p.M_q, 16);
    EXPECT_LE(p.certificate, p.eps_quad);
    // Two nodes cannot resolve the kernel on [-K, K]: K / (2 sqrt t) stays near 2.8 for every t.
    EXPECT_GT(scalar_certificate(plan_with_nodes(1e-6, 1e-3, 1.0, 2)), 0.5);
}

TEST(Lchs, PlanInvariants) {
    for (double t : {0.1, 1.0, 10.0})
        for (double eps : {1e-3, 1e-6})
            for (double a : {1.0, 5.0}) {
                LchsPlan p = build_plan(t, eps, a);
                EXPECT_EQ(static_cast<int>(p.nodes.size()), p.M_q);
                double sum_w = 0.0;
                for (int j = 0; j < p.M_q; ++j) {
                    EXPECT_GT(p.weights[j], 0.0);
                    EXPECT_LE(std::abs(p.nodes[j]), p.K);
                    EXPECT_LE(p.eps_j[j], 0.1);
                    sum_w += p.coeffs[j];
                }
                EXPECT_NEAR(sum_w, p.alpha_g, 1e-14);
                EXPECT_LE(p.alpha_g, 1 + 10 * eps);
                EXPECT_LE(p.certificate, eps);
                // Symmetric nodes around zero.
                EXPECT_NEAR(p.nodes.front(), -p.nodes.back(), 1e-12 * p.K);
            }
}

TEST(Lchs, PlanIsDeterministicAndSerialises) {
    LchsPlan a = build_plan(2.0, 1e-4, 3.0), b = build_plan(2.0, 1e-4, 3.0);
    EXPECT_EQ(serialize_plan(a), serialize_plan(b));
    LchsPlan c = parse_plan(serialize_plan(a));
    ASSERT_EQ(c.M_q, a.M_q);
    for (int j = 0; j < a.M_q; ++j) {
        EXPECT_EQ(c.nodes[j], a.nodes[j]);
        EXPECT_EQ(c.coeffs[j], a.coeffs[j]);
        EXPECT_EQ(c.degrees[j], a.degrees[j]);
    }
}

TEST(Lchs, ApplyPlanScalarZero) {
    LchsPlan p = build_plan(1.0, 1e-6, 1.0);
    CMat r = apply_plan_exact(p, CMat::Zero(1, 1));
    EXPECT_NEAR(std::abs(r(0, 0) - 1.0), 0.0, 1e-6);
}

TEST(Lchs, ApplyPlanOnInvolution) {
    CMat x(2, 2);
    x << 0, 1, 1, 0;
    LchsPlan p = build_plan(1.0, 1e-6, 1.0 + 1e-12);
    CMat r = apply_plan_exact(p, x);
    EXPECT_LE((r - std::exp(-1.0) * CMat::Identity(2, 2)).norm(), 2e-6);
}

TEST(Lchs, ApplyPlanMatchesMatrixGaussianOnDilation) {
    Basis b = Basis::plane_wave(32, 4.0);
    auto a = build_sos(Potential::quadratic(1.0), 1.0, b);
    CMat s = build_dilated_sqrt(a);
    const double norm = Eigen::SelfAdjointEigenSolver<CMat>(s, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    const double eps = 1e-6;
    LchsPlan p = build_plan(1.0, eps, norm * (1 + 1e-9));
    CMat r = apply_plan_exact(p, s);
    CMat oracle = gaussian_of(s, 1.0);
    EXPECT_LE((r - oracle).norm() / std::sqrt(double(r.rows())), eps);
    // Off-diagonal blocks of e^{-script_A^2 t} between |0> and the rest vanish.
    const long n = a[0].rows();
    EXPECT_LE(r.topRightCorner(n, r.cols() - n).cwiseAbs().maxCoeff(), eps);
    CMat top = r.topLeftCorner(n, n);
    CMat prop = gaussian_of(build_dilated_sqrt(a), 1.0).topLeftCorner(n, n);
    EXPECT_LE((top - prop).cwiseAbs().maxCoeff(), eps);
}

TEST(Lchs, NodeVectorsSumToPlan) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    CMat h = CMat::Zero(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j <= i; ++j) {
            cplx z(g(rng), i == j ? 0.0 : g(rng));
            h(i, j) = z;
            h(j, i) = std::conj(z);
        }
    const double norm = Eigen::SelfAdjointEigenSolver<CMat>(h, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    LchsPlan p = build_plan(0.5, 1e-5, norm * 1.001);
    CVec v = CVec::Random(6).normalized();
    CMat cols = apply_nodes_to_vector(p, h, v);
    CVec sum = CVec::Zero(6);
    for (int j = 0; j < p.M_q; ++j) {
        EXPECT_NEAR(cols.col(j).norm(), 1.0, 1e-12);
        sum += p.coeffs[j] * cols.col(j);
    }
    EXPECT_LT((sum - apply_plan_exact(p, h) * v).norm(), 1e-12);
}

TEST(Lchs, NodeCountScalesWithRootTime) {
    // Leading term of the constructive bound grows as sqrt(t).
    const double a = node_count_bound(100.0, 1e-6, 5.0) / node_count_bound(400.0, 1e-6, 5.0);
    EXPECT_GT(a, 0.45);
    EXPECT_LT(a, 0.55);
}
