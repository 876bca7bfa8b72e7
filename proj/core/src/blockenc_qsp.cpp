#include "fpflux/blockenc_qsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "fpflux/special.hpp"

namespace fpflux {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

cplx i_pow(int l) {
    switch (l & 3) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

double spectral_norm(const CMat &m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<CMat> svd(m);
    return svd.singularValues()(0);
}

bool is_hermitian(const CMat &m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

// Phase pattern of e^{i phi Z_Pi}: e^{i phi} on the first n rows, e^{-i phi} elsewhere.
template <class Derived>
void apply_phase(Eigen::MatrixBase<Derived> &&s, long n, double phi) {
    const cplx up = std::exp(kI * phi), dn = std::conj(up);
    s.topRows(n) *= up;
    s.bottomRows(s.rows() - n) *= dn;
}
template <class Derived>
void apply_phase(Eigen::MatrixBase<Derived> &s, long n, double phi) {
    apply_phase(std::move(s), n, phi);
}

}  // namespace

double BlockEncoding::unitarity_error() const {
    CMat e = U.adjoint() * U - CMat::Identity(U.rows(), U.cols());
    return e.cwiseAbs().maxCoeff();
}

double BlockEncoding::corner_error() const {
    return (corner() - A / alpha).cwiseAbs().maxCoeff();
}

bool BlockEncoding::hermitian_unitary(double tol) const { return is_hermitian(U, tol); }

BlockEncoding dilate(const CMat &A, double alpha) {
    if (A.rows() != A.cols()) throw InputError("block encoding requires a square matrix");
    if (!(alpha > 0)) throw SubnormalizationError("subnormalization must be positive");
    const long n = A.rows();
    CMat B = A / alpha;
    CMat s_left, s_right;
    if (is_hermitian(B, 1e-13)) {
        CMat Bh = 0.5 * (B + B.adjoint());
        Eigen::SelfAdjointEigenSolver<CMat> es(Bh);
        const Vec &lam = es.eigenvalues();
        if (lam.size() && lam.cwiseAbs().maxCoeff() > 1.0 + 1e-12)
            throw SubnormalizationError("||A/alpha|| exceeds 1");
        Vec r(n);
        for (long i = 0; i < n; ++i) r(i) = std::sqrt(std::max(0.0, 1.0 - lam(i) * lam(i)));
        s_left = es.eigenvectors() * r.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
        s_left = 0.5 * (s_left + s_left.adjoint());
        s_right = s_left;
        B = Bh;
    } else {
        Eigen::BDCSVD<CMat> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vec &sv = svd.singularValues();
        if (sv.size() && sv(0) > 1.0 + 1e-12) throw SubnormalizationError("||A/alpha|| exceeds 1");
        Vec r(n);
        for (long i = 0; i < n; ++i) r(i) = std::sqrt(std::max(0.0, 1.0 - sv(i) * sv(i)));
        s_left = svd.matrixU() * r.cast<cplx>().asDiagonal() * svd.matrixU().adjoint();
        s_right = svd.matrixV() * r.cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
    }
    BlockEncoding be;
    be.A = A;
    be.alpha = alpha;
    be.ancilla_dim = 2;
    be.U.resize(2 * n, 2 * n);
    be.U.topLeftCorner(n, n) = B;
    be.U.topRightCorner(n, n) = s_left;
    be.U.bottomLeftCorner(n, n) = s_right;
    be.U.bottomRightCorner(n, n) = -B.adjoint();
    return be;
}

CMat unitary_with_first_column(const CVec &v) {
    const long m = v.size();
    if (m == 0) throw InputError("empty vector");
    if (std::abs(v.norm() - 1.0) > 1e-10) throw InputError("first column must be a unit vector");
    CVec e0 = CVec::Zero(m);
    e0(0) = 1.0;
    // A Householder reflector is Hermitian; it maps e0 to v when v_0 is real.
    const cplx ph = std::abs(v(0)) > 0 ? v(0) / std::abs(v(0)) : cplx(1.0);
    CVec target = v / ph;
    CVec w = e0 - target;
    CMat h = CMat::Identity(m, m);
    if (w.norm() > 1e-15) h -= 2.0 * w * w.adjoint() / w.squaredNorm();
    if (ph != cplx(1.0)) h.col(0) *= ph;
    return h;
}

BlockEncoding lcu_combine(const std::vector<BlockEncoding> &encs, const std::vector<cplx> &coeffs) {
    if (encs.empty()) throw InputError("LCU needs at least one encoding");
    if (coeffs.size() != encs.size()) throw InputError("LCU coefficient count mismatch");
    const long n = encs[0].system_dim();
    int amax = 0;
    double alpha = 0.0;
    for (size_t i = 0; i < encs.size(); ++i) {
        if (encs[i].system_dim() != n) throw InputError("LCU members must share the system dimension");
        amax = std::max(amax, encs[i].ancilla_dim);
        alpha += std::abs(coeffs[i]) * encs[i].alpha;
    }
    if (!(alpha > 0)) throw InputError("LCU coefficients are all zero");
    const long m = static_cast<long>(encs.size());
    const long block = amax * n;
    CVec amp(m);
    for (long i = 0; i < m; ++i) amp(i) = std::sqrt(std::abs(coeffs[i]) * encs[i].alpha / alpha);
    CMat prep = unitary_with_first_column(amp);

    CMat sel = CMat::Zero(m * block, m * block);
    CMat a_sum = CMat::Zero(n, n);
    for (long i = 0; i < m; ++i) {
        const cplx ph = std::abs(coeffs[i]) > 0 ? coeffs[i] / std::abs(coeffs[i]) : cplx(1.0);
        const long sz = encs[i].U.rows();
        auto blk = sel.block(i * block, i * block, block, block);
        blk.topLeftCorner(sz, sz) = ph * encs[i].U;
        if (sz < block) blk.bottomRightCorner(block - sz, block - sz).setIdentity();
        a_sum += coeffs[i] * encs[i].A;
    }
    // (PREP (x) I) as a Kronecker product with the member block.
    CMat prep_full = CMat::Zero(m * block, m * block);
    for (long r = 0; r < m; ++r)
        for (long c = 0; c < m; ++c)
            if (prep(r, c) != cplx(0.0))
                prep_full.block(r * block, c * block, block, block) = prep(r, c) * CMat::Identity(block, block);
    BlockEncoding be;
    be.A = a_sum;
    be.alpha = alpha;
    be.ancilla_dim = static_cast<int>(m * amax);
    be.U = prep_full.adjoint() * sel * prep_full;
    return be;
}

CMat dilated_term(const std::vector<CMat> &a_list, int j) {
    if (a_list.empty()) throw InputError("empty A list");
    const long n = a_list[0].rows();
    const long m = static_cast<long>(a_list.size());
    if (j < 0 || j >= m) throw InputError("term index out of range");
    CMat x = CMat::Zero((m + 1) * n, (m + 1) * n);
    x.block((j + 1) * n, 0, n, n) = a_list[j];
    x.block(0, (j + 1) * n, n, n) = a_list[j].adjoint();
    return x;
}

BlockEncoding dilated_sqrt_encoding(const std::vector<CMat> &a_list) {
    if (a_list.empty()) throw InputError("empty A list");
    const long n = a_list[0].rows();
    for (const auto &a : a_list)
        if (a.rows() != n || a.cols() != n) throw InputError("ragged A list");
    std::vector<BlockEncoding> encs;
    std::vector<cplx> coeffs;
    for (size_t j = 0; j < a_list.size(); ++j) {
        const double aj = std::max(spectral_norm(a_list[j]), 1e-300);
        encs.push_back(dilate(dilated_term(a_list, static_cast<int>(j)), aj));
        coeffs.emplace_back(1.0);
    }
    return lcu_combine(encs, coeffs);
}

SubnormalizationRoutes subnormalization_routes(const std::vector<CMat> &a_list) {
    if (a_list.empty()) throw InputError("empty A list");
    SubnormalizationRoutes r;
    const long n = a_list[0].rows();
    CMat h = CMat::Zero(n, n);
    CMat script = CMat::Zero((a_list.size() + 1) * n, (a_list.size() + 1) * n);
    for (size_t j = 0; j < a_list.size(); ++j) {
        const double aj = spectral_norm(a_list[j]);
        r.alpha_script_A += aj;
        r.alpha_H += aj * aj;
        h += a_list[j].adjoint() * a_list[j];
        script += dilated_term(a_list, static_cast<int>(j));
    }
    r.norm_script_A = spectral_norm(script);
    r.norm_H = spectral_norm(h);
    return r;
}

int ChebySeries::parity(double tol) const {
    bool even = false, odd = false;
    for (size_t l = 0; l < coeffs.size(); ++l) {
        if (std::abs(coeffs[l]) <= tol) continue;
        (l % 2 ? odd : even) = true;
    }
    if (even && odd) return -1;
    return odd ? 1 : 0;
}

cplx ChebySeries::eval(double x) const {
    // Clenshaw recurrence.
    cplx b1 = 0.0, b2 = 0.0;
    for (int l = degree(); l >= 1; --l) {
        cplx b0 = coeffs[l] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    if (coeffs.empty()) return 0.0;
    return coeffs[0] + x * b1 - b2;
}

ChebySeries ChebySeries::even_part() const {
    ChebySeries s = *this;
    for (size_t l = 1; l < s.coeffs.size(); l += 2) s.coeffs[l] = 0.0;
    while (s.coeffs.size() > 1 && s.coeffs.back() == cplx(0.0)) s.coeffs.pop_back();
    return s;
}

ChebySeries ChebySeries::odd_part() const {
    ChebySeries s = *this;
    for (size_t l = 0; l < s.coeffs.size(); l += 2) s.coeffs[l] = 0.0;
    while (s.coeffs.size() > 1 && s.coeffs.back() == cplx(0.0)) s.coeffs.pop_back();
    return s;
}

ChebySeries ChebySeries::scaled(cplx f) const {
    ChebySeries s = *this;
    for (auto &c : s.coeffs) c *= f;
    return s;
}

ChebySeries ChebySeries::real_part() const {
    ChebySeries s = *this;
    for (auto &c : s.coeffs) c = c.real();
    return s;
}

ChebySeries ChebySeries::imag_part() const {
    ChebySeries s = *this;
    for (auto &c : s.coeffs) c = c.imag();
    return s;
}

ChebySeries jacobi_anger(double k, double eps) {
    const int d = jacobi_anger_degree(k, eps);
    std::vector<double> j = bessel_j_sequence(k, d);
    ChebySeries s;
    s.coeffs.resize(d + 1);
    s.coeffs[0] = j[0];
    for (int l = 1; l <= d; ++l) s.coeffs[l] = 2.0 * i_pow(l) * j[l];
    return s;
}

double jacobi_anger_certificate(const ChebySeries &s, double k, int grid) {
    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double x = std::cos(kPi * (i + 0.5) / grid);
        worst = std::max(worst, std::abs(s.eval(x) - std::exp(kI * (k * x))));
    }
    return worst;
}

PhaseSequence PhaseSequence::negated() const {
    PhaseSequence p = *this;
    for (auto &v : p.phases) v = -v;
    return p;
}

cplx qsp_poly(const PhaseSequence &phi, double x) {
    if (phi.phases.empty()) throw InputError("empty phase sequence");
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    Eigen::Matrix2cd o;
    o << x, -s, s, x;
    Eigen::RowVector2cd row(std::exp(kI * phi.phases[0]), 0.0);
    for (size_t j = 1; j < phi.phases.size(); ++j) {
        row = row * o;
        row(0) *= std::exp(kI * phi.phases[j]);
        row(1) *= std::exp(-kI * phi.phases[j]);
    }
    return row(0);
}

CMat qsp_eval(const BlockEncoding &be, const PhaseSequence &phi) {
    if (!is_hermitian(be.A, 1e-12)) throw UnsupportedError("QSP evaluation requires a Hermitian block");
    if (!be.hermitian_unitary(1e-10))
        throw UnsupportedError("qubitization requires a Hermitian block-encoding unitary");
    if (phi.phases.empty()) throw InputError("empty phase sequence");
    const long n = be.system_dim();
    const long dim = be.U.rows();
    CMat m = CMat::Identity(dim, dim);
    apply_phase(m, n, phi.phases[0]);
    // m <- m * (U Z e^{i p Z}) for each layer; column scaling applies the diagonal factors.
    for (size_t j = 1; j < phi.phases.size(); ++j) {
        m = m * be.U;
        const cplx up = std::exp(kI * phi.phases[j]), dn = -std::exp(-kI * phi.phases[j]);
        m.leftCols(n) *= up;
        m.rightCols(dim - n) *= dn;
    }
    return m.topLeftCorner(n, n);
}

namespace {

// Wx-convention polynomial and its gradient with respect to the full phase vector.
struct WxEval {
    cplx p;
    std::vector<cplx> grad;
};

WxEval wx_eval(const std::vector<double> &phi, double x) {
    const size_t d = phi.size() - 1;
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    Eigen::Matrix2cd w;
    w << x, kI * s, kI * s, x;
    auto g = [&](double p) {
        Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
        m(0, 0) = std::exp(kI * p);
        m(1, 1) = std::exp(-kI * p);
        return m;
    };
    // prefix rows l_j = e0^T G_0 W G_1 ... W (before G_j); suffix cols r_j = W G_{j+1} ... G_d e0.
    std::vector<Eigen::RowVector2cd> pre(d + 1);
    std::vector<Eigen::Vector2cd> suf(d + 1);
    pre[0] = Eigen::RowVector2cd(1.0, 0.0);
    for (size_t j = 1; j <= d; ++j) pre[j] = pre[j - 1] * g(phi[j - 1]) * w;
    suf[d] = Eigen::Vector2cd(1.0, 0.0);
    for (size_t j = d; j-- > 0;) suf[j] = w * g(phi[j + 1]) * suf[j + 1];
    WxEval out;
    out.p = (pre[0] * g(phi[0]) * suf[0])(0);
    out.grad.resize(d + 1);
    Eigen::Matrix2cd z = Eigen::Matrix2cd::Zero();
    z(0, 0) = kI;
    z(1, 1) = -kI;
    for (size_t j = 0; j <= d; ++j) out.grad[j] = (pre[j] * z * g(phi[j]) * suf[j])(0);
    return out;
}

}  // namespace

PhaseSequence solve_phases(const ChebySeries &target, const SolveOptions &opts) {
    ChebySeries f = target.real_part();
    while (f.coeffs.size() > 1 && std::abs(f.coeffs.back()) < 1e-300) f.coeffs.pop_back();
    if (f.coeffs.empty()) throw InputError("empty target series");
    const int d = f.degree();
    if (d > opts.max_degree)
        throw SolverError("target degree " + std::to_string(d) + " exceeds the phase-solver cap " +
                          std::to_string(opts.max_degree));
    for (int l = (d + 1) % 2; l <= d; l += 2)
        if (std::abs(f.coeffs[l]) > 1e-14) throw InputError("target polynomial must have definite parity");
    PhaseSequence out;
    // Exact +/- T_d targets.
    bool single = true;
    for (int l = 0; l < d; ++l)
        if (f.coeffs[l] != cplx(0.0)) single = false;
    if (single && std::abs(std::abs(f.coeffs[d].real()) - 1.0) < 1e-15) {
        out.phases.assign(d + 1, 0.0);
        if (f.coeffs[d].real() < 0) {
            if (d == 0) out.phases[0] = kPi;
            else out.phases.front() = out.phases.back() = kPi / 2;
        }
        return out;
    }
    double sup = 0.0;
    for (int i = 0; i < 2048; ++i) sup = std::max(sup, std::abs(f.eval(std::cos(kPi * (i + 0.5) / 2048))));
    if (sup > 1.0 - 1e-4) throw InputError("target sup-norm must be at most 1 - 1e-4");
    if (d == 0) {
        out.phases = {std::acos(f.coeffs[0].real())};
        return out;
    }

    // Newton iteration on symmetric Wx phases, matching Re P at positive Chebyshev nodes.
    const int nr = (d + 2) / 2;
    std::vector<double> xs(nr), fx(nr);
    for (int k = 0; k < nr; ++k) {
        xs[k] = std::cos((2.0 * k + 1.0) * kPi / (4.0 * nr));
        fx[k] = f.eval(xs[k]).real();
    }
    Vec theta = Vec::Zero(nr);
    theta(0) = kPi / 4;
    auto full = [&](const Vec &th) {
        std::vector<double> phi(d + 1);
        for (int j = 0; j <= d; ++j) phi[j] = th(std::min(j, d - j));
        return phi;
    };
    auto residual = [&](const Vec &th, Mat *jac) {
        std::vector<double> phi = full(th);
        Vec r(nr);
        if (jac) jac->setZero(nr, nr);
        for (int k = 0; k < nr; ++k) {
            WxEval e = wx_eval(phi, xs[k]);
            r(k) = e.p.real() - fx[k];
            if (jac)
                for (int j = 0; j <= d; ++j) (*jac)(k, std::min(j, d - j)) += e.grad[j].real();
        }
        return r;
    };
    Mat jac;
    Vec r = residual(theta, &jac);
    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (r.cwiseAbs().maxCoeff() < 1e-14) {
            converged = true;
            break;
        }
        Vec step = jac.colPivHouseholderQr().solve(-r);
        double lambda = 1.0;
        Vec trial, rt;
        Mat jt;
        for (int ls = 0; ls < 30; ++ls) {
            trial = theta + lambda * step;
            rt = residual(trial, &jt);
            if (rt.norm() < r.norm() || ls == 29) break;
            lambda *= 0.5;
        }
        const double before = r.norm();
        theta = trial;
        r = rt;
        jac = jt;
        if (std::abs(before - r.norm()) < 1e-16 && r.cwiseAbs().maxCoeff() < 1e-12) {
            converged = true;
            break;
        }
    }
    if (!converged && r.cwiseAbs().maxCoeff() > 1e-11)
        throw SolverError("phase solver did not converge (residual " + std::to_string(r.cwiseAbs().maxCoeff()) + ")");

    out.phases = full(theta);
    out.phases.front() -= kPi / 4;
    out.phases.back() += kPi / 4;
    double worst = 0.0;
    for (int i = 0; i < 4096; ++i) {
        const double x = std::cos(kPi * (i + 0.5) / 4096);
        worst = std::max(worst, std::abs(qsp_poly(out, x).real() - f.eval(x).real()));
    }
    if (worst > opts.tolerance)
        throw SolverError("phase solver residual " + std::to_string(worst) + " above tolerance");
    return out;
}

CVec MultiplexedResult::sector(int j) const {
    if (j < 0 || j >= members) throw InputError("member index out of range");
    return state.segment(static_cast<long>(j) * ancilla_dim * system_dim, system_dim);
}

namespace {

struct Schedule {
    std::vector<double> pre;   // phase applied before each layer
    std::vector<char> active;  // whether the layer applies the iterate
    double last = 0.0;         // phase applied after the final layer
};

// Application-order schedule for phases p_0..p_d padded to `layers` iterate applications.
// Padding pairs come first; a skipped final layer absorbs an odd difference.
Schedule make_schedule(const PhaseSequence &p, int layers) {
    const int d = p.degree();
    Schedule s;
    int gap = layers - d;
    const bool skip = gap % 2 != 0;
    if (skip) --gap;
    for (int i = 0; i < gap; i += 2) {
        s.pre.push_back(kPi / 2);
        s.active.push_back(1);
        s.pre.push_back(-kPi / 2);
        s.active.push_back(1);
    }
    for (int j = d; j >= 1; --j) {
        s.pre.push_back(p.phases[j]);
        s.active.push_back(1);
    }
    if (skip) {
        s.pre.push_back(p.phases[0]);
        s.active.push_back(0);
        s.last = 0.0;
    } else {
        s.last = p.phases[0];
    }
    return s;
}

void check_amplitudes(const std::vector<cplx> &amps, size_t members) {
    if (amps.size() != members) throw InputError("amplitude count must match the member count");
    double norm = 0.0;
    for (auto a : amps) norm += std::norm(a);
    if (std::abs(norm - 1.0) > 1e-10) throw InputError("member amplitudes must have unit 2-norm");
}

MultiplexedResult run_engine(const BlockEncoding &be, const std::vector<PhaseSequence> &members,
                             const std::vector<cplx> &amps, const CVec &psi, QueryCounter *counter,
                             bool allow_mixed) {
    if (members.empty()) throw InputError("no member polynomials");
    check_amplitudes(amps, members.size());
    if (!is_hermitian(be.A, 1e-12)) throw UnsupportedError("QSP evaluation requires a Hermitian block");
    if (!be.hermitian_unitary(1e-10))
        throw UnsupportedError("qubitization requires a Hermitian block-encoding unitary");
    const long n = be.system_dim();
    if (psi.size() != n) throw InputError("state dimension does not match the block encoding");
    int dmax = 0;
    for (const auto &m : members) {
        if (m.phases.empty()) throw InputError("empty phase sequence");
        dmax = std::max(dmax, m.degree());
    }
    for (const auto &m : members)
        if (!allow_mixed && (dmax - m.degree()) % 2 != 0)
            throw InputError("multiplexed QSP members must share parity");

    const long dim = be.U.rows();
    const int mcount = static_cast<int>(members.size());
    std::vector<Schedule> sched;
    for (const auto &m : members) sched.push_back(make_schedule(m, dmax));
    CMat s = CMat::Zero(dim, mcount);
    for (int j = 0; j < mcount; ++j) s.col(j).head(n) = amps[j] * psi;

    QueryCounter local;
    for (int layer = 0; layer < dmax; ++layer) {
        bool all_active = true;
        for (int j = 0; j < mcount; ++j) {
            apply_phase(s.col(j), n, sched[j].pre[layer]);
            all_active = all_active && sched[j].active[layer];
        }
        CMat z = s;
        z.bottomRows(dim - n) *= -1.0;
        CMat next = be.U * z;
        if (!all_active)
            for (int j = 0; j < mcount; ++j)
                if (!sched[j].active[layer]) next.col(j) = s.col(j);
        s.swap(next);
        local.tick();
    }
    for (int j = 0; j < mcount; ++j) apply_phase(s.col(j), n, sched[j].last);

    MultiplexedResult out;
    out.members = mcount;
    out.ancilla_dim = dim / n;
    out.system_dim = n;
    out.queries = local.count;
    out.d_max = dmax;
    out.state = Eigen::Map<CVec>(s.data(), s.size());
    if (counter) counter->tick(local.count);
    return out;
}

}  // namespace

MultiplexedResult multiplexed_qsp(const BlockEncoding &be, const std::vector<PhaseSequence> &members,
                                  const std::vector<cplx> &amplitudes, const CVec &psi,
                                  QueryCounter *counter) {
    return run_engine(be, members, amplitudes, psi, counter, false);
}

MultiplexedResult multiplexed_qsp_mixed(const BlockEncoding &be, const std::vector<PhaseSequence> &members,
                                        const std::vector<cplx> &amplitudes, const CVec &psi,
                                        QueryCounter *counter) {
    return run_engine(be, members, amplitudes, psi, counter, true);
}

MultiplexedResult multiplexed_chebyshev(const BlockEncoding &be, const std::vector<ChebySeries> &members,
                                        const std::vector<cplx> &amplitudes, const CVec &psi,
                                        QueryCounter *counter) {
    if (members.empty()) throw InputError("no member polynomials");
    check_amplitudes(amplitudes, members.size());
    if (!be.hermitian_unitary(1e-10))
        throw UnsupportedError("qubitization requires a Hermitian block-encoding unitary");
    const long n = be.system_dim();
    if (psi.size() != n) throw InputError("state dimension does not match the block encoding");
    if (be.ancilla_dim < 2) throw InputError("Chebyshev-sum mode needs an ancilla sector for the remainder");
    int dmax = 0;
    for (const auto &m : members) dmax = std::max(dmax, m.degree());
    const long dim = be.U.rows();

    CMat corners(n, dmax + 1);
    CVec w = CVec::Zero(dim);
    w.head(n) = psi;
    corners.col(0) = psi;
    QueryCounter local;
    for (int l = 1; l <= dmax; ++l) {
        w.tail(dim - n) *= -1.0;
        w = be.U * w;
        local.tick();
        corners.col(l) = w.head(n);
    }

    const int mcount = static_cast<int>(members.size());
    MultiplexedResult out;
    out.members = mcount;
    out.ancilla_dim = dim / n;
    out.system_dim = n;
    out.d_max = dmax;
    out.queries = local.count;
    out.state = CVec::Zero(static_cast<long>(mcount) * dim);
    const double pnorm = psi.norm();
    for (int j = 0; j < mcount; ++j) {
        const auto &c = members[j].coeffs;
        CVec g = CVec::Zero(n);
        for (size_t l = 0; l < c.size(); ++l)
            if (c[l] != cplx(0.0)) g += c[l] * corners.col(static_cast<long>(l));
        const double rem = pnorm * pnorm - g.squaredNorm();
        if (rem < -1e-10) throw SubnormalizationError("member polynomial exceeds 1 on the input state");
        const long base = static_cast<long>(j) * dim;
        out.state.segment(base, n) = amplitudes[j] * g;
        if (pnorm > 0)
            out.state.segment(base + n, n) = amplitudes[j] * std::sqrt(std::max(0.0, rem)) / pnorm * psi;
    }
    if (counter) counter->tick(local.count);
    return out;
}

CVec LchsState::contract() const {
    CVec out = CVec::Zero(system_dim);
    const long block = ancilla_dim * system_dim;
    for (int j = 0; j < members; ++j) out += weights[j] * state.segment(static_cast<long>(j) * block, system_dim);
    return out;
}

LchsState gaussian_lchs_state(const LchsPlan &plan, const BlockEncoding &be, const CVec &psi, LchsMode mode,
                              QspRoute route, double scale) {
    const long n = be.system_dim();
    if (psi.size() != n) throw InputError("state dimension does not match the block encoding");
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw InputError("input state must be normalized");
    if (plan.M_q < 1 || plan.alpha_g <= 0) throw InputError("plan is empty");
    for (double c : plan.coeffs)
        if (c < 0) throw InputError("Gaussian-LCHS coefficients must be nonnegative");
    LchsState st;
    st.alpha_g = plan.alpha_g;
    st.system_dim = n;

    if (mode == LchsMode::ExactUnitary) {
        CMat cols = apply_nodes_to_vector(plan, be.A, psi);
        const long dim = be.U.rows();
        st.ancilla_dim = dim / n;
        st.members = plan.M_q;
        st.state = CVec::Zero(static_cast<long>(plan.M_q) * dim);
        for (int j = 0; j < plan.M_q; ++j) {
            const double a = std::sqrt(plan.coeffs[j] / plan.alpha_g);
            st.state.segment(static_cast<long>(j) * dim, n) = a * cols.col(j);
            st.weights.emplace_back(a);
        }
        st.alpha_eff = plan.alpha_g;
        st.route = "exact-unitary";
        return st;
    }

    if (be.alpha > plan.alpha_A * (1.0 + 1e-12))
        throw InputError("block-encoding subnormalization exceeds the plan's alpha_A");
    std::vector<ChebySeries> series(plan.M_q);
    double max_eps = 0.0;
    for (int j = 0; j < plan.M_q; ++j) {
        series[j] = jacobi_anger(-plan.nodes[j] * be.alpha, plan.eps_j[j]);
        max_eps = std::max(max_eps, plan.eps_j[j]);
    }
    if (route == QspRoute::Auto) route = plan.max_degree() <= 64 ? QspRoute::Phases : QspRoute::ChebyshevSum;

    if (route == QspRoute::Phases) {
        const double s = scale > 0 ? scale : 0.85;
        if (s * (1.0 + max_eps) > 1.0 - 1e-4) throw InputError("scale too large for the phase solver");
        std::vector<PhaseSequence> members;
        std::vector<cplx> gammas;
        std::vector<double> node_coeff;
        for (int j = 0; j < plan.M_q; ++j) {
            ChebySeries cpart = series[j].even_part().real_part().scaled(s);
            ChebySeries spart = series[j].odd_part().imag_part().scaled(s);
            const std::pair<ChebySeries *, cplx> parts[2] = {{&cpart, cplx(0.5)}, {&spart, cplx(0.0, 0.5)}};
            for (const auto &[part, g] : parts) {
                bool zero = true;
                for (auto c : part->coeffs) zero = zero && std::abs(c) < 1e-300;
                if (zero) continue;
                PhaseSequence ph = solve_phases(*part);
                members.push_back(ph);
                members.push_back(ph.negated());
                gammas.push_back(g);
                gammas.push_back(g);
                node_coeff.push_back(plan.coeffs[j]);
                node_coeff.push_back(plan.coeffs[j]);
            }
        }
        double lambda = 0.0;
        for (size_t m = 0; m < members.size(); ++m) lambda += node_coeff[m] * std::abs(gammas[m]);
        std::vector<cplx> amps;
        for (size_t m = 0; m < members.size(); ++m) {
            const double a = std::sqrt(node_coeff[m] * std::abs(gammas[m]) / lambda);
            amps.emplace_back(a);
            st.weights.push_back(a * gammas[m] / std::abs(gammas[m]));
        }
        QueryCounter qc;
        MultiplexedResult r = multiplexed_qsp_mixed(be, members, amps, psi, &qc);
        st.state = std::move(r.state);
        st.members = r.members;
        st.ancilla_dim = r.ancilla_dim;
        st.queries = qc.count;
        st.d_max = r.d_max;
        st.alpha_eff = lambda / s;
        st.route = "qsp-phases";
        return st;
    }

    const double s = scale > 0 ? scale : 1.0 / (1.0 + max_eps);
    std::vector<ChebySeries> members;
    std::vector<cplx> amps;
    for (int j = 0; j < plan.M_q; ++j) {
        members.push_back(series[j].scaled(s));
        const double a = std::sqrt(plan.coeffs[j] / plan.alpha_g);
        amps.emplace_back(a);
        st.weights.emplace_back(a);
    }
    QueryCounter qc;
    MultiplexedResult r = multiplexed_chebyshev(be, members, amps, psi, &qc);
    st.state = std::move(r.state);
    st.members = r.members;
    st.ancilla_dim = r.ancilla_dim;
    st.queries = qc.count;
    st.d_max = r.d_max;
    st.alpha_eff = plan.alpha_g / s;
    st.route = "qsp-chebyshev-sum";
    return st;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string serialize_phases(const PhaseSequence &p) {
    std::ostringstream os;
    os << "fpflux-phases " << p.phases.size();
    for (double v : p.phases) os << ' ' << fmt17(v);
    os << '\n';
    return os.str();
}

PhaseSequence parse_phases(const std::string &text) {
    std::istringstream is(text);
    std::string tag;
    size_t count = 0;
    if (!(is >> tag >> count) || tag != "fpflux-phases") throw InputError("not a phase-sequence record");
    PhaseSequence p;
    p.phases.resize(count);
    for (auto &v : p.phases)
        if (!(is >> v)) throw InputError("truncated phase-sequence record");
    return p;
}

std::string serialize_series(const ChebySeries &s) {
    std::ostringstream os;
    os << "fpflux-chebyshev " << s.coeffs.size() << '\n';
    for (auto c : s.coeffs) os << fmt17(c.real()) << ' ' << fmt17(c.imag()) << '\n';
    return os.str();
}

ChebySeries parse_series(const std::string &text) {
    std::istringstream is(text);
    std::string tag;
    size_t count = 0;
    if (!(is >> tag >> count) || tag != "fpflux-chebyshev") throw InputError("not a Chebyshev-series record");
    ChebySeries s;
    s.coeffs.resize(count);
    for (auto &c : s.coeffs) {
        double re, im;
        if (!(is >> re >> im)) throw InputError("truncated Chebyshev-series record");
        c = cplx(re, im);
    }
    return s;
}

}  // namespace fpflux
