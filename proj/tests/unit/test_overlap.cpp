#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fpflux/overlap.hpp"
#include "fpflux/special.hpp"

using namespace fpflux;

namespace {

CMat diag2(double a, double b) {
    CMat m = CMat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

CVec basis_vec(int n, int i) {
    CVec v = CVec::Zero(n);
    v[i] = 1.0;
    return v;
}

}  // namespace

TEST(Overlap, HadamardTestExamples) {
    CVec e0 = basis_vec(2, 0), e1 = basis_vec(2, 1);
    EXPECT_NEAR(hadamard_overlap({CMat::Identity(2, 2)}, {1.0}, e0, e0, OverlapPart::Real), 1.0, 1e-14);
    EXPECT_NEAR(hadamard_overlap({diag2(1, -1)}, {1.0}, e1, e1, OverlapPart::Real), 0.0, 1e-14);
    const std::vector<CMat> iz = {CMat::Identity(2, 2), diag2(1, -1)};
    EXPECT_NEAR(hadamard_overlap(iz, {0.5, 0.5}, e0, e0, OverlapPart::Real), 1.0, 1e-14);
    EXPECT_NEAR(hadamard_overlap(iz, {0.5, 0.5}, e1, e1, OverlapPart::Real), 0.5, 1e-14);
}

TEST(Overlap, HadamardTestMatchesDirectFormula) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    const int n = 4;
    std::vector<CMat> us;
    std::vector<cplx> cs;
    for (int j = 0; j < 3; ++j) {
        CMat a(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) a(r, c) = cplx(g(rng), g(rng));
        us.push_back(Eigen::HouseholderQR<CMat>(a).householderQ());
        cs.push_back(cplx(std::abs(g(rng)) + 0.1, 0.0));
    }
    CVec psi(n), phi(n);
    for (int i = 0; i < n; ++i) {
        psi[i] = cplx(g(rng), g(rng));
        phi[i] = cplx(g(rng), g(rng));
    }
    psi.normalize();
    phi.normalize();
    double alpha = 0.0;
    CMat h = CMat::Zero(n, n);
    for (int j = 0; j < 3; ++j) {
        alpha += std::abs(cs[j]);
        h += cs[j] * us[j];
    }
    const cplx ov = phi.dot(h * psi);
    EXPECT_NEAR(hadamard_overlap(us, cs, psi, phi, OverlapPart::Real), 0.5 * (1 + ov.real() / alpha), 1e-13);
    EXPECT_NEAR(hadamard_overlap(us, cs, psi, phi, OverlapPart::Imag), 0.5 * (1 + ov.imag() / alpha), 1e-13);
}

TEST(Overlap, RegionStateExamples) {
    Basis b = Basis::finite_difference(4, 1.0, 1, 1, Boundary::Periodic);
    RegionState r = region_state(Potential::quadratic(0.0), 1.0, b, Region::interval(-1e300, -0.1));
    EXPECT_EQ(r.support, 2);
    EXPECT_NEAR(r.p_bar, 0.5, 1e-15);
    EXPECT_NEAR(std::abs(r.amplitudes[0]), 1 / std::sqrt(2.0), 1e-15);

    // Cell-centred reflecting grid: symmetric about 0, and x = -0.5 falls on a cell edge, so the grid
    // mass is a midpoint rule for the region integral.
    Basis fd = Basis::finite_difference(2048, 2.0, 1, 1, Boundary::Reflecting);
    Potential v = Potential::double_well();
    EXPECT_NEAR(region_state(v, 5.0, fd, Region::interval(-1e300, 0.0)).p_bar, 0.5, 1e-12);
    auto w = [&](double x) { return std::exp(-5.0 * (x * x * x * x - x * x)); };
    const double q = adaptive_integrate(w, -2.0, -0.5, 1e-13) / adaptive_integrate(w, -2.0, 2.0, 1e-13);
    EXPECT_NEAR(region_state(v, 5.0, fd, Region::interval(-1e300, -0.5)).p_bar, q, 1e-5 * q);
}

TEST(Overlap, ExactOverlapLimits) {
    Basis b = Basis::plane_wave(128, 8.0);
    OperatorSet ops = build_operator_set(Potential::quadratic(1.0), 1.0, b);
    RegionState all = region_state(Potential::quadratic(1.0), 1.0, b, Region::interval(-1e300, 1e300));
    CMat h = h_disc(ops.A);
    for (double t : {0.0, 0.5, 3.0}) EXPECT_NEAR(exact_overlap(h, all.amplitudes, all.amplitudes, t).real(), 1.0, 1e-8);
    RegionState r = region_state(Potential::quadratic(1.0), 1.0, b, Region::interval(-1e300, -0.5));
    EXPECT_NEAR(exact_overlap(h, r.amplitudes, r.amplitudes, 0.0).real(), 1.0, 1e-14);
}

TEST(Overlap, FluxAtTimeZero) {
    Potential v = Potential::double_well();
    Basis b = Basis::plane_wave(32, 2.0);
    OperatorSet ops = build_operator_set(v, 5.0, b);
    RegionState r = region_state(v, 5.0, b, Region::interval(-1e300, -0.3));
    RegionState p = region_state(v, 5.0, b, Region::interval(0.3, 1e300));
    const double norm = Eigen::SelfAdjointEigenSolver<CMat>(ops.script_A, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    FluxOptions o;
    OverlapEstimate same = estimate_flux(identity_plan(norm * 1.01), ops, r, r, o);
    EXPECT_NEAR(same.value.real(), 1.0, 1e-12);
    OverlapEstimate disjoint = estimate_flux(identity_plan(norm * 1.01), ops, r, p, o);
    EXPECT_NEAR(disjoint.value.real(), 0.0, 1e-12);
    o.shots = 100000;
    o.seed = 4;
    OverlapEstimate noisy = estimate_flux(identity_plan(norm * 1.01), ops, r, r, o);
    EXPECT_NEAR(noisy.value.real(), 1.0, 5 * noisy.stderr_re + 1e-12);
}

TEST(Overlap, AnalyticProbabilityReproducesExactFlux) {
    Potential v = Potential::double_well();
    Basis b = Basis::plane_wave(32, 2.0);
    OperatorSet ops = build_operator_set(v, 5.0, b);
    RegionState r = region_state(v, 5.0, b, Region::interval(-1e300, -0.3));
    RegionState p = region_state(v, 5.0, b, Region::interval(0.3, 1e300));
    const double norm = Eigen::SelfAdjointEigenSolver<CMat>(ops.script_A, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    const double eps = 1e-4;
    LchsPlan plan = build_plan(1.0, eps, norm * (1 + 1e-9));
    FluxOptions o;
    o.imag = true;
    OverlapEstimate e = estimate_flux(plan, ops, r, p, o);
    EXPECT_NEAR(e.value.real(), e.exact.real(), eps);
    EXPECT_NEAR(e.value.imag(), 0.0, eps);
    EXPECT_NEAR(e.value.real(), e.alpha * (2 * e.p0_re - 1), 1e-12);
}

TEST(Overlap, SamplingIsDeterministicAndUnbiased) {
    EXPECT_EQ(sample_zero_count(0.3, 1000, 99), sample_zero_count(0.3, 1000, 99));
    EXPECT_EQ(sample_zero_count(0.0, 1000, 1), 0);
    EXPECT_EQ(sample_zero_count(1.0, 1000, 1), 1000);
    double mean = 0.0;
    const int reps = 400;
    for (int s = 0; s < reps; ++s) mean += sample_zero_count(0.3, 10000, derive_seed(7, s));
    mean /= reps * 10000.0;
    EXPECT_NEAR(mean, 0.3, 5 * std::sqrt(0.21 / (reps * 10000.0)));
}

TEST(Overlap, DerivedSeedsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(42, s));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Overlap, RateAndHitting) {
    std::vector<FluxPoint> scan = {{0.5, 0.01, 0.001}, {1.0, 0.05, 0.001}, {2.0, 0.12, 0.001}};
    RateResult r = rate_and_hitting(scan, 0.4, 0.4, 0.04);
    ASSERT_EQ(r.rates.size(), 3u);
    EXPECT_NEAR(r.rates[1], 0.05, 1e-15);
    EXPECT_NEAR(r.rates[2], 0.06, 1e-15);
    ASSERT_TRUE(r.hitting_time.has_value());
    EXPECT_DOUBLE_EQ(*r.hitting_time, 1.0);
    RateResult low = rate_and_hitting(scan, 0.4, 0.4, 0.5);
    EXPECT_FALSE(low.hitting_time.has_value());
    RateResult asym = rate_and_hitting(scan, 0.9, 0.1, 0.04);
    EXPECT_NEAR(asym.rates[0], 3 * 0.01 / 0.5, 1e-14);
    EXPECT_NEAR(rate_and_hitting(scan, 0.4, 0.4).threshold, 0.003, 1e-15);
}
