#include "fpflux/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fpflux {

RegionState region_state(const Potential &v, double beta, const Basis &basis, const Region &region) {
    if (!(beta > 0)) throw InputError("beta must be positive");
    if (region.dim() != basis.dofs()) throw InputError("region dimension does not match the basis");
    const long dim = basis.dimension();
    Vec V = potential_on_grid(v, basis);
    const double vmin = V.minCoeff();
    RegionState st;
    st.region = region;
    st.amplitudes = CVec::Zero(dim);
    double z = 0.0, zr = 0.0;
    for (long i = 0; i < dim; ++i) {
        const double w = std::exp(-beta * (V[i] - vmin));
        z += w;
        if (region.contains(basis.point(i))) {
            st.amplitudes(i) = std::sqrt(w);
            zr += w;
            ++st.support;
        }
    }
    if (st.support == 0) throw InputError("region contains no grid points");
    st.amplitudes /= st.amplitudes.norm();
    st.p_bar = zr / z;
    return st;
}

double branch_overlap_probability(const CVec &b0, const CVec &b1, OverlapPart part) {
    if (b0.size() != b1.size()) throw InputError("branch vectors differ in size");
    const cplx f = part == OverlapPart::Real ? cplx(1.0) : cplx(0.0, 1.0);
    return 0.25 * (b0 + f * b1).squaredNorm();
}

double hadamard_overlap(const std::vector<CMat> &unitaries, const std::vector<cplx> &coeffs, const CVec &psi,
                        const CVec &phi, OverlapPart part) {
    if (unitaries.empty() || unitaries.size() != coeffs.size()) throw InputError("LCU terms and coefficients must match");
    const long n = psi.size();
    if (phi.size() != n) throw InputError("states differ in dimension");
    if (std::abs(psi.norm() - 1.0) > 1e-10 || std::abs(phi.norm() - 1.0) > 1e-10)
        throw InputError("states must be normalized");
    for (const auto &u : unitaries) {
        if (u.rows() != n || u.cols() != n) throw InputError("LCU term dimension mismatch");
        if ((u.adjoint() * u - CMat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
            throw InputError("LCU term is not unitary");
    }
    const long m = static_cast<long>(unitaries.size());
    double alpha = 0.0;
    for (auto c : coeffs) alpha += std::abs(c);
    if (!(alpha > 0)) throw InputError("LCU coefficients are all zero");

    const long half = m * n;
    CVec s = CVec::Zero(2 * half);
    s(0) = 1.0;
    // Hadamard on the top qubit.
    s.segment(half, half) = s.segment(0, half);
    s *= 1.0 / std::sqrt(2.0);
    // PREP on the index register in both branches.
    CVec amp(m);
    for (long l = 0; l < m; ++l) amp(l) = std::sqrt(std::abs(coeffs[l]) / alpha);
    CMat prep = unitary_with_first_column(amp);
    for (int b = 0; b < 2; ++b) {
        Eigen::Map<CMat> blk(s.data() + b * half, n, m);
        blk = (blk * prep.transpose()).eval();
    }
    // Controlled phase e^{-i arg c_l} on the top = 1 branch.
    for (long l = 0; l < m; ++l) {
        const cplx ph = std::abs(coeffs[l]) > 0 ? std::conj(coeffs[l]) / std::abs(coeffs[l]) : cplx(1.0);
        s.segment(half + l * n, n) *= ph;
    }
    // Controlled state preparation: O_R when top = 0, O_P when top = 1.
    CMat o_r = unitary_with_first_column(psi);
    CMat o_p = unitary_with_first_column(phi);
    for (long l = 0; l < m; ++l) {
        s.segment(l * n, n) = (o_r * s.segment(l * n, n)).eval();
        s.segment(half + l * n, n) = (o_p * s.segment(half + l * n, n)).eval();
    }
    // Controlled SEL on the top = 0 branch.
    for (long l = 0; l < m; ++l) s.segment(l * n, n) = (unitaries[l] * s.segment(l * n, n)).eval();
    if (part == OverlapPart::Imag) s.segment(half, half) *= cplx(0.0, 1.0);
    // Final Hadamard; P(0) is the norm of the resulting top = 0 branch.
    CVec zero = (s.segment(0, half) + s.segment(half, half)) / std::sqrt(2.0);
    return zero.squaredNorm();
}

LchsPlan identity_plan(double alpha_A) {
    if (!(alpha_A > 0)) throw InputError("alpha_A must be positive");
    LchsPlan p;
    p.t = 0.0;
    p.eps = 0.0;
    p.alpha_A = alpha_A;
    p.K = 0.0;
    p.M_q = 1;
    p.nodes = {0.0};
    p.weights = {1.0};
    p.coeffs = {1.0};
    p.eps_j = {0.1};
    p.degrees = {0};
    p.alpha_g = 1.0;
    p.certificate = 0.0;
    return p;
}

cplx exact_overlap(const CMat &h, const CVec &r, const CVec &p, double t) {
    if (h.rows() != h.cols() || r.size() != h.rows() || p.size() != h.rows())
        throw InputError("dimension mismatch in exact overlap");
    if (t == 0.0) return p.dot(r);
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    const CMat &v = es.eigenvectors();
    CVec a = v.adjoint() * r, b = v.adjoint() * p;
    cplx s = 0.0;
    for (long i = 0; i < a.size(); ++i) s += std::conj(b(i)) * std::exp(t * es.eigenvalues()(i)) * a(i);
    return s;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

long sample_zero_count(double p, long shots, std::uint64_t seed) {
    if (shots < 0) throw InputError("shots must be nonnegative");
    if (shots == 0) return 0;
    p = std::clamp(p, 0.0, 1.0);
    std::mt19937_64 rng(seed);
    std::binomial_distribution<long> dist(shots, p);
    return dist(rng);
}

OverlapEstimate estimate_flux(const LchsPlan &plan, const OperatorSet &ops, const RegionState &R,
                              const RegionState &P, const FluxOptions &opts) {
    if (ops.A.empty() || ops.script_A.size() == 0)
        throw UnsupportedError("flux estimation needs the plane-wave sum-of-squares operators");
    const long n = ops.A[0].rows();
    const long na = ops.script_A.rows();
    if (R.amplitudes.size() != n || P.amplitudes.size() != n) throw InputError("region state dimension mismatch");
    if (opts.shots < 0) throw InputError("shots must be nonnegative");
    CVec psi = CVec::Zero(na), phi = CVec::Zero(na);
    psi.head(n) = R.amplitudes;
    phi.head(n) = P.amplitudes;

    BlockEncoding be = dilate(ops.script_A, plan.alpha_A);
    LchsState st = gaussian_lchs_state(plan, be, psi,
                                       opts.mode == FluxMode::ExactUnitary ? LchsMode::ExactUnitary : LchsMode::Qsp,
                                       opts.route);
    const long block = st.ancilla_dim * st.system_dim;
    CVec b1 = CVec::Zero(st.state.size());
    for (int j = 0; j < st.members; ++j) b1.segment(static_cast<long>(j) * block, na) = std::conj(st.weights[j]) * phi;

    OverlapEstimate est;
    est.t = plan.t;
    est.plan_eps = plan.eps;
    est.alpha = st.alpha_eff;
    est.alpha_g = st.alpha_g;
    est.queries = st.queries;
    est.d_max = st.d_max;
    est.mode = opts.mode == FluxMode::ExactUnitary ? "exact-unitary" : "qsp";
    est.route = st.route;
    est.shots = opts.shots;
    est.seed = opts.seed;
    est.exact = exact_overlap(h_disc(ops.A), R.amplitudes, P.amplitudes, plan.t);

    auto pass = [&](OverlapPart part, std::uint64_t stream, double &p0, double &se) {
        p0 = branch_overlap_probability(st.state, b1, part);
        double phat = p0;
        se = 0.0;
        if (opts.shots > 0) {
            phat = static_cast<double>(sample_zero_count(p0, opts.shots, derive_seed(opts.seed, stream))) / opts.shots;
            se = 2.0 * st.alpha_eff * std::sqrt(phat * (1.0 - phat) / opts.shots);
        }
        return st.alpha_eff * (2.0 * phat - 1.0);
    };
    const double re = pass(OverlapPart::Real, 0, est.p0_re, est.stderr_re);
    double im = 0.0;
    if (opts.imag) im = pass(OverlapPart::Imag, 1, est.p0_im, est.stderr_im);
    est.value = cplx(re, im);
    return est;
}

RateResult rate_and_hitting(const std::vector<FluxPoint> &scan, double p_R, double p_P, double theta) {
    if (!(p_R > 0) || !(p_P > 0)) throw InputError("region masses must be positive");
    for (size_t i = 1; i < scan.size(); ++i)
        if (!(scan[i].t > scan[i - 1].t)) throw InputError("scan times must be increasing");
    RateResult out;
    double max_se = 0.0;
    for (const auto &pt : scan) max_se = std::max(max_se, pt.stderr);
    out.threshold = theta > 0 ? theta : 3.0 * max_se;
    const double pref = std::sqrt(p_R / p_P);
    for (const auto &pt : scan) {
        if (pt.t == 0.0) {
            out.notes.push_back("T = 0 skipped in the rate series");
        } else {
            out.times.push_back(pt.t);
            out.rates.push_back(pref * pt.nu / pt.t);
        }
        if (!out.hitting_time && pt.t > 0 && pt.nu > out.threshold) out.hitting_time = pt.t;
    }
    if (!out.hitting_time) out.notes.push_back("hitting threshold not reached");
    return out;
}

}  // namespace fpflux
