#include <benchmark/benchmark.h>

#include "fpflux/baselines.hpp"
#include "fpflux/blockenc_qsp.hpp"
#include "fpflux/discretize.hpp"
#include "fpflux/lchs.hpp"
#include "fpflux/overlap.hpp"

using namespace fpflux;

static void BM_BuildPlan(benchmark::State &state) {
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_plan(t, 1e-6, 5.0));
}
BENCHMARK(BM_BuildPlan)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_OperatorSet(benchmark::State &state) {
    Basis b = Basis::plane_wave(static_cast<int>(state.range(0)), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(build_operator_set(Potential::double_well(), 5.0, b));
}
BENCHMARK(BM_OperatorSet)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_QspEval(benchmark::State &state) {
    const int n = 32, d = static_cast<int>(state.range(0));
    CMat h = CMat::Random(n, n);
    h = (h + h.adjoint()).eval();
    h /= 1.01 * h.norm();
    BlockEncoding be = dilate(h, 1.0);
    PhaseSequence phi{std::vector<double>(d + 1, 0.1)};
    for (auto _ : state) benchmark::DoNotOptimize(qsp_eval(be, phi));
}
BENCHMARK(BM_QspEval)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SolvePhases(benchmark::State &state) {
    ChebySeries target = jacobi_anger(static_cast<double>(state.range(0)), 1e-10).even_part().real_part().scaled(0.85);
    for (auto _ : state) benchmark::DoNotOptimize(solve_phases(target));
}
BENCHMARK(BM_SolvePhases)->Arg(2)->Arg(8)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_MultiplexedChebyshev(benchmark::State &state) {
    const int n = 32, members = static_cast<int>(state.range(0));
    CMat h = CMat::Random(n, n);
    h = (h + h.adjoint()).eval();
    h /= 1.01 * h.norm();
    BlockEncoding be = dilate(h, 1.0);
    std::vector<ChebySeries> series;
    std::vector<cplx> amps;
    for (int j = 0; j < members; ++j) {
        series.push_back(jacobi_anger(-8.0 + 16.0 * j / members, 1e-8).scaled(0.9));
        amps.push_back(1.0 / std::sqrt(double(members)));
    }
    CVec psi = CVec::Ones(n).normalized();
    for (auto _ : state) benchmark::DoNotOptimize(multiplexed_chebyshev(be, series, amps, psi));
}
BENCHMARK(BM_MultiplexedChebyshev)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_EstimateFlux(benchmark::State &state) {
    Potential v = Potential::double_well();
    Basis b = Basis::plane_wave(64, 2.0);
    OperatorSet ops = build_operator_set(v, 5.0, b);
    RegionState r = region_state(v, 5.0, b, Region::interval(-1e300, -0.3));
    RegionState p = region_state(v, 5.0, b, Region::interval(0.3, 1e300));
    const double norm = Eigen::SelfAdjointEigenSolver<CMat>(ops.script_A, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    LchsPlan plan = build_plan(1.0, 1e-3, norm * 1.001);
    FluxOptions o;
    o.shots = 1000000;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_flux(plan, ops, r, p, o));
}
BENCHMARK(BM_EstimateFlux)->Unit(benchmark::kMillisecond);

static void BM_RateMatrixCondition(benchmark::State &state) {
    Basis b = Basis::finite_difference(static_cast<int>(state.range(0)), 4.0, 1, 1, Boundary::Reflecting);
    Mat k = kappa_generator(Potential::double_well(), 40.0, b, KappaGenerator::CenteredBackward);
    for (auto _ : state) benchmark::DoNotOptimize(condition_number_rate_matrix(k));
}
BENCHMARK(BM_RateMatrixCondition)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_LangevinTrajectories(benchmark::State &state) {
    LangevinConfig c;
    c.beta = 5.0;
    c.T = 1.0;
    c.dt = 1e-3;
    c.trajectories = state.range(0);
    c.box = 2.5;
    const Region R = Region::interval(-1e300, -0.3), P = Region::interval(0.3, 1e300);
    for (auto _ : state) benchmark::DoNotOptimize(langevin_flux(c, R, P));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_LangevinTrajectories)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
