#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fpflux/blockenc_qsp.hpp"
#include "fpflux/discretize.hpp"

using namespace fpflux;

namespace {

constexpr double kPi = std::numbers::pi;

CMat random_hermitian(int n, double norm, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    CMat h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            cplx z(g(rng), i == j ? 0.0 : g(rng));
            h(i, j) = z;
            h(j, i) = std::conj(z);
        }
    const double s = Eigen::SelfAdjointEigenSolver<CMat>(h, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    return h * (norm / s);
}

// T_d(H) by the three-term recurrence on matrices.
CMat chebyshev_matrix(const CMat &h, int d) {
    CMat t0 = CMat::Identity(h.rows(), h.cols()), t1 = h;
    if (d == 0) return t0;
    for (int k = 1; k < d; ++k) {
        CMat t2 = 2 * h * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    return t1;
}

// Top-left entry of e^{i p0 Z} prod [O(x) e^{i pj Z}] written out with 2x2 matrices.
cplx qsp_oracle(const std::vector<double> &phi, double x) {
    using M2 = Eigen::Matrix2cd;
    const double s = std::sqrt(1 - x * x);
    M2 o;
    o << x, -s, s, x;
    auto rz = [](double p) {
        M2 r = M2::Zero();
        r(0, 0) = std::exp(cplx(0, p));
        r(1, 1) = std::exp(cplx(0, -p));
        return r;
    };
    M2 u = rz(phi[0]);
    for (size_t j = 1; j < phi.size(); ++j) u = u * o * rz(phi[j]);
    return u(0, 0);
}

}  // namespace

TEST(BlockEncoding, DilateExamples) {
    BlockEncoding z = dilate(CMat::Zero(3, 3), 1.0);
    EXPECT_LT(z.corner().norm(), 1e-15);
    EXPECT_LT(z.unitarity_error(), 1e-13);
    BlockEncoding id = dilate(CMat::Identity(3, 3), 1.0);
    EXPECT_LT((id.corner() - CMat::Identity(3, 3)).norm(), 1e-13);
    EXPECT_LT(id.U.topRightCorner(3, 3).norm(), 1e-7);
    std::mt19937_64 rng(1);
    CMat a = CMat::Random(8, 8);
    const double na = Eigen::JacobiSVD<CMat>(a).singularValues()[0];
    BlockEncoding be = dilate(a, 2 * na);
    EXPECT_LT(be.corner_error(), 1e-12);
    EXPECT_LT(be.unitarity_error(), 1e-12);
}

TEST(BlockEncoding, DilatedHermitianIsHermitianUnitary) {
    std::mt19937_64 rng(2);
    BlockEncoding be = dilate(random_hermitian(6, 0.9, rng), 1.0);
    EXPECT_TRUE(be.hermitian_unitary());
}

TEST(BlockEncoding, LcuExamples) {
    BlockEncoding i2 = dilate(CMat::Identity(2, 2), 1.0);
    BlockEncoding half = lcu_combine({i2, i2}, {0.5, 0.5});
    EXPECT_NEAR(half.alpha, 1.0, 1e-15);
    EXPECT_LT((half.corner() * half.alpha - CMat::Identity(2, 2)).norm(), 1e-12);

    CMat x(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    BlockEncoding sum = lcu_combine({dilate(x, 1.0), dilate(z, 1.0)}, {1.0, 1.0});
    EXPECT_NEAR(sum.alpha, 2.0, 1e-15);
    EXPECT_LT((sum.corner() - (x + z) / 2.0).norm(), 1e-12);
    EXPECT_LT(sum.unitarity_error(), 1e-12);
}

TEST(BlockEncoding, DilatedSquareRootEncoding) {
    auto a = build_sos(Potential::double_well(), 2.0, Basis::plane_wave(8, 2.0));
    BlockEncoding be = dilated_sqrt_encoding(a);
    CMat s = be.corner() * be.alpha;
    EXPECT_LT((s - build_dilated_sqrt(a)).norm(), 1e-10 * s.norm());
    const long n = a[0].rows();
    EXPECT_LT((-(s * s).topLeftCorner(n, n) - h_disc(a)).norm(), 1e-9 * (s * s).norm());
}

TEST(BlockEncoding, SubnormalisationRoutesOnHarmonicFamily) {
    for (int n : {16, 32, 64}) {
        auto a = build_sos(Potential::quadratic(1.0), 1.0, Basis::plane_wave(n, 4.0));
        SubnormalizationRoutes r = subnormalization_routes(a);
        EXPECT_LE(r.norm_script_A, r.alpha_script_A * (1 + 1e-12));
        EXPECT_LE(r.norm_H, r.alpha_H * (1 + 1e-12));
        EXPECT_NEAR(r.alpha_H, r.alpha_script_A * r.alpha_script_A, 1e-9 * r.alpha_H);
    }
}

TEST(Qsp, ZeroPhasesGiveChebyshev) {
    std::mt19937_64 rng(4);
    CMat h = random_hermitian(5, 0.95, rng);
    BlockEncoding be = dilate(h, 1.0);
    for (int d = 1; d <= 20; ++d) {
        PhaseSequence phi{std::vector<double>(d + 1, 0.0)};
        EXPECT_LT((qsp_eval(be, phi) - chebyshev_matrix(h, d)).cwiseAbs().maxCoeff(), 1e-10) << "d=" << d;
        for (double x : {-0.9, 0.1, 0.7}) EXPECT_NEAR(qsp_poly(phi, x).real(), std::cos(d * std::acos(x)), 1e-12);
    }
}

TEST(Qsp, ScalarPolynomialMatchesMatrixProduct) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> p(7);
        for (auto &e : p) e = u(rng);
        for (double x : {-0.8, 0.0, 0.33, 0.99}) EXPECT_LT(std::abs(qsp_poly({p}, x) - qsp_oracle(p, x)), 1e-13);
    }
}

TEST(Qsp, MatrixEvalAgreesWithScalarOnEigenbasis) {
    std::mt19937_64 rng(6);
    CMat h = random_hermitian(6, 0.9, rng);
    BlockEncoding be = dilate(h, 1.0);
    PhaseSequence phi{{0.3, -1.1, 0.5, 0.2, 0.9}};
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    CVec poly(6);
    for (int i = 0; i < 6; ++i) poly[i] = qsp_poly(phi, es.eigenvalues()[i]);
    CMat oracle = es.eigenvectors() * poly.asDiagonal() * es.eigenvectors().adjoint();
    EXPECT_LT((qsp_eval(be, phi) - oracle).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Qsp, PaddingPairLeavesCornerUnchanged) {
    std::mt19937_64 rng(12);
    CMat h = random_hermitian(4, 0.8, rng);
    BlockEncoding be = dilate(h, 1.0);
    PhaseSequence phi{{0.4, -0.2, 1.3}};
    PhaseSequence padded = phi;
    padded.phases.push_back(-kPi / 2);
    padded.phases.push_back(kPi / 2);
    EXPECT_LT((qsp_eval(be, padded) - qsp_eval(be, phi)).cwiseAbs().maxCoeff(), 1e-13);
    // The pair itself: O e^{-i pi/2 Z} O e^{i pi/2 Z} = I for any x.
    for (double x : {-0.6, 0.0, 0.5}) {
        std::vector<double> id_seq = {0.0, -kPi / 2, kPi / 2};
        EXPECT_LT(std::abs(qsp_oracle(id_seq, x) - 1.0), 1e-14);
    }
}

TEST(Qsp, NonHermitianBlockRejected) {
    BlockEncoding be = dilate(CMat::Random(4, 4) * 0.1, 1.0);
    EXPECT_THROW(qsp_eval(be, PhaseSequence{{0.0, 0.0}}), UnsupportedError);
}

TEST(JacobiAnger, Examples) {
    ChebySeries s0 = jacobi_anger(0.0, 1e-10);
    EXPECT_EQ(s0.degree(), 0);
    EXPECT_NEAR(std::abs(s0.coeffs[0] - 1.0), 0.0, 1e-15);
    ChebySeries s1 = jacobi_anger(1.0, 1e-14);
    EXPECT_NEAR(s1.coeffs[0].real(), 0.765198, 1e-6);
    EXPECT_NEAR(s1.even_part().eval(1.0).real(), std::cos(1.0), 1e-13);
    EXPECT_NEAR(s1.odd_part().eval(1.0).imag(), std::sin(1.0), 1e-13);
    ChebySeries s = jacobi_anger(5.5575, 1e-6);
    EXPECT_GE(s.degree(), 5);
    EXPECT_LE(s.degree(), 5.5575 + 40);
    EXPECT_LE(jacobi_anger_certificate(s, 5.5575), 1e-6);
}

TEST(JacobiAnger, CertificatesAcrossWavenumbers) {
    for (double k : {-6.0, -2.5, 0.5, 1.0, 3.0, 6.0})
        for (double eps : {1e-3, 1e-8}) {
            ChebySeries s = jacobi_anger(k, eps);
            EXPECT_LE(jacobi_anger_certificate(s, k), eps) << "k=" << k;
            EXPECT_EQ(s.even_part().parity(), 0);
            if (s.degree() > 0) EXPECT_EQ(s.odd_part().parity(), 1);
        }
}

TEST(SolvePhases, TrivialTargets) {
    ChebySeries t1{{0.0, 1.0}}, t3{{0.0, 0.0, 0.0, 1.0}};
    PhaseSequence p1 = solve_phases(t1), p3 = solve_phases(t3);
    ASSERT_EQ(p1.phases.size(), 2u);
    ASSERT_EQ(p3.phases.size(), 4u);
    for (double x : {-0.7, 0.2, 0.9}) {
        EXPECT_NEAR(qsp_poly(p1, x).real(), x, 1e-10);
        EXPECT_NEAR(qsp_poly(p3, x).real(), 4 * x * x * x - 3 * x, 1e-10);
    }
}

TEST(SolvePhases, JacobiAngerRealPart) {
    ChebySeries target = jacobi_anger(2.0, 1e-12).even_part().real_part().scaled(0.9);
    PhaseSequence p = solve_phases(target);
    double worst = 0.0;
    for (int i = 0; i <= 500; ++i) {
        const double x = std::cos(kPi * i / 500);
        worst = std::max(worst, std::abs(qsp_poly(p, x).real() - target.eval(x).real()));
    }
    EXPECT_LE(worst, 1e-8);
    EXPECT_THROW(solve_phases(ChebySeries{{0.5, 0.5}}), Error);
}

TEST(SolvePhases, SerialisationRoundTrip) {
    PhaseSequence p{{0.1, -0.25, 1e-17, 3.0}};
    PhaseSequence q = parse_phases(serialize_phases(p));
    EXPECT_EQ(p.phases, q.phases);
    ChebySeries s = jacobi_anger(1.5, 1e-9);
    ChebySeries r = parse_series(serialize_series(s));
    ASSERT_EQ(r.coeffs.size(), s.coeffs.size());
    for (size_t i = 0; i < s.coeffs.size(); ++i) EXPECT_EQ(r.coeffs[i], s.coeffs[i]);
}

TEST(Multiplexed, SingleMemberReducesToQspEval) {
    std::mt19937_64 rng(14);
    CMat h = random_hermitian(4, 0.9, rng);
    BlockEncoding be = dilate(h, 1.0);
    CVec psi = CVec::Random(4).normalized();
    QueryCounter qc;
    MultiplexedResult r = multiplexed_qsp(be, {PhaseSequence{{0.0, 0.0}}}, {1.0}, psi, &qc);
    EXPECT_LT((r.sector(0) - h * psi).norm(), 1e-12);
    EXPECT_EQ(qc.count, 1);
}

TEST(Multiplexed, SectorsMatchChebyshevPerEigenvalue) {
    CMat a = CMat::Zero(2, 2);
    a(0, 0) = 0.3;
    a(1, 1) = 0.7;
    BlockEncoding be = dilate(a, 1.0);
    CVec psi(2);
    psi << std::sqrt(0.4), std::sqrt(0.6);
    const double c = 1 / std::sqrt(2.0);
    QueryCounter qc;
    MultiplexedResult r = multiplexed_qsp(be, {PhaseSequence{{0, 0}}, PhaseSequence{{0, 0, 0, 0}}}, {c, c}, psi, &qc);
    for (int i = 0; i < 2; ++i) {
        const double x = a(i, i).real();
        EXPECT_NEAR(std::abs(r.sector(0)[i] - c * x * psi[i]), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(r.sector(1)[i] - c * (4 * x * x * x - 3 * x) * psi[i]), 0.0, 1e-12);
    }
    EXPECT_EQ(qc.count, 3);
    EXPECT_EQ(r.queries, 3);
    EXPECT_EQ(r.d_max, 3);
    EXPECT_NEAR(r.state.norm(), 1.0, 1e-12);
}

TEST(Multiplexed, ChebyshevSumMatchesDirectSeries) {
    std::mt19937_64 rng(15);
    CMat h = random_hermitian(5, 0.9, rng);
    BlockEncoding be = dilate(h, 1.0);
    CVec psi = CVec::Random(5).normalized();
    std::vector<ChebySeries> members = {jacobi_anger(1.0, 1e-10).scaled(0.9), jacobi_anger(-2.0, 1e-10).scaled(0.9)};
    const double c = 1 / std::sqrt(2.0);
    QueryCounter qc;
    MultiplexedResult r = multiplexed_chebyshev(be, members, {c, c}, psi, &qc);
    for (int j = 0; j < 2; ++j) {
        CVec direct = CVec::Zero(5);
        for (int l = 0; l <= members[j].degree(); ++l) direct += members[j].coeffs[l] * (chebyshev_matrix(h, l) * psi);
        EXPECT_LT((r.sector(j) - c * direct).norm(), 1e-11);
    }
    EXPECT_EQ(qc.count, std::max(members[0].degree(), members[1].degree()));
    EXPECT_NEAR(r.state.norm(), 1.0, 1e-10);
}
