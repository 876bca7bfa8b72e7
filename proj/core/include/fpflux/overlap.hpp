#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpflux/blockenc_qsp.hpp"
#include "fpflux/discretize.hpp"
#include "fpflux/lchs.hpp"
#include "fpflux/potentials.hpp"

namespace fpflux {

// Thermal indicator state 1_R e^{-beta V/2}, normalised, on the grid of `basis`.
struct RegionState {
    Region region;
    CVec amplitudes;
    double p_bar = 0.0;  // equilibrium mass of R on the grid
    long support = 0;    // number of grid points inside R
};

RegionState region_state(const Potential &v, double beta, const Basis &basis, const Region &region);

enum class OverlapPart { Real, Imag };

// Exact P(0) of the overlap circuit, simulated gate by gate on top qubit (x) LCU index (x) system:
// H, PREP, controlled phase, controlled O_R / O_P, controlled SEL, optional S, H.
// Equals (1 + Re<phi|H|psi>/alpha)/2, or the Im version when part is Imag.
double hadamard_overlap(const std::vector<CMat> &unitaries, const std::vector<cplx> &coeffs, const CVec &psi,
                        const CVec &phi, OverlapPart part);

// P(0) = |b0 + b1|^2 / 4 (or |b0 + i b1|^2 / 4) for the two branch vectors just before the final
// Hadamard. Used when the select stage has already been applied to form b0.
double branch_overlap_probability(const CVec &b0, const CVec &b1, OverlapPart part);

enum class FluxMode { ExactUnitary, Qsp };

struct FluxOptions {
    long shots = 0;                // 0 gives the analytic probability
    std::uint64_t seed = 0;
    FluxMode mode = FluxMode::ExactUnitary;
    QspRoute route = QspRoute::Auto;
    bool imag = false;             // run the second (S-gate) pass
};

struct OverlapEstimate {
    cplx value;
    long shots = 0;
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    double alpha = 0.0;            // effective subnormalisation of the sampled circuit
    double alpha_g = 0.0;
    cplx exact;                    // <P| e^{t H_disc} |R>
    double p0_re = 0.0;            // exact circuit probabilities
    double p0_im = 0.0;
    long queries = 0;
    int d_max = 0;
    double t = 0.0;
    double plan_eps = 0.0;
    std::string mode;
    std::string route;
    std::uint64_t seed = 0;
};

// Plan with t = 0: one node at k = 0 with unit weight.
LchsPlan identity_plan(double alpha_A);

// <P| e^{tH}|R> for a Hermitian H by full eigendecomposition; t = 0 returns <P|R>.
cplx exact_overlap(const CMat &h, const CVec &r, const CVec &p, double t);

// Samples the overlap circuit on the dilated square root of `ops` with |0>_blk |R> and |0>_blk |P>.
// The plan's alpha_A must bound ||script_A||.
OverlapEstimate estimate_flux(const LchsPlan &plan, const OperatorSet &ops, const RegionState &R,
                              const RegionState &P, const FluxOptions &opts);

// Binomial draw of `shots` Bernoulli(p) outcomes with a 64-bit seed.
long sample_zero_count(double p, long shots, std::uint64_t seed);

// splitmix64 step; derives independent stream seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct FluxPoint {
    double t = 0.0;
    double nu = 0.0;
    double stderr = 0.0;
};

struct RateResult {
    std::vector<double> times;
    std::vector<double> rates;       // k_RP(T) = sqrt(p_R/p_P) nu(T) / T
    std::optional<double> hitting_time;
    double threshold = 0.0;
    std::vector<std::string> notes;
};

// theta <= 0 uses three times the largest standard error in the scan.
RateResult rate_and_hitting(const std::vector<FluxPoint> &scan, double p_R, double p_P, double theta = 0.0);

}  // namespace fpflux
