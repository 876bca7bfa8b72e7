#include "fpflux/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

#include "fpflux/overlap.hpp"
#include "fpflux/special.hpp"
#include "parallel.hpp"

namespace fpflux {

namespace {

template <class M>
cplx propagator_overlap(const M &h, const CVec &r, const CVec &p, double t, long cap) {
    if (h.rows() != h.cols()) throw InputError("generator must be square");
    if (r.size() != h.rows() || p.size() != h.rows()) throw InputError("state dimension does not match the generator");
    if (h.rows() > cap)
        throw ResourceError("dense eigendecomposition of dimension " + std::to_string(h.rows()) +
                            " exceeds the cap " + std::to_string(cap));
    if (!(t >= 0)) throw InputError("propagation time must be nonnegative");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw InputError("generator must be Hermitian");
    if (t == 0.0) return p.dot(r);
    Eigen::SelfAdjointEigenSolver<M> es(h);
    CVec a = es.eigenvectors().adjoint().template cast<cplx>() * r;
    CVec b = es.eigenvectors().adjoint().template cast<cplx>() * p;
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += std::conj(b(i)) * std::exp(t * es.eigenvalues()(i)) * a(i);
    return s;
}

struct ProposalBox {
    Vec lo, hi;
};

ProposalBox proposal_box(const Region &R, int n, double box) {
    if (R.dim() != n) throw InputError("region dimension does not match the potential");
    ProposalBox b{Vec::Constant(n, -box), Vec::Constant(n, box)};
    for (int i = 0; i < n; ++i) {
        double lo = R.shape == Region::Shape::Box ? R.lo[i] : R.center[i] - R.radius;
        double hi = R.shape == Region::Shape::Box ? R.hi[i] : R.center[i] + R.radius;
        b.lo[i] = std::max(b.lo[i], lo);
        b.hi[i] = std::min(b.hi[i], hi);
        if (!(b.lo[i] < b.hi[i])) throw InputError("region does not intersect the sampling box");
    }
    return b;
}

// Minimum of V on a scan of the box: a uniform grid in 1D, random points otherwise.
double scan_min(const Potential &v, const ProposalBox &b, std::mt19937_64 &rng) {
    const int n = static_cast<int>(b.lo.size());
    double vmin = std::numeric_limits<double>::infinity();
    if (n == 1) {
        for (int i = 0; i <= 4000; ++i) {
            Vec x = b.lo + (b.hi - b.lo) * (i / 4000.0);
            vmin = std::min(vmin, v.eval(x));
        }
        return vmin;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 20000; ++s) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * u(rng);
        vmin = std::min(vmin, v.eval(x));
    }
    return vmin;
}

double estimate_gamma(const Potential &v, double box) {
    const int n = v.config_dim();
    double g = 0.0;
    auto norm_at = [&](const Vec &x) {
        Eigen::SelfAdjointEigenSolver<Mat> es(v.hessian(x), Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    };
    if (n == 1) {
        for (int i = 0; i <= 4000; ++i) g = std::max(g, norm_at(Vec::Constant(1, -box + 2.0 * box * i / 4000.0)));
        return g;
    }
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-box, box);
    for (int s = 0; s < 2000; ++s) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = u(rng);
        g = std::max(g, norm_at(x));
    }
    return g;
}

double wrap(double x, double box) {
    const double w = 2.0 * box;
    x = std::fmod(x + box, w);
    if (x < 0) x += w;
    return x - box;
}

}  // namespace

cplx exact_propagator_overlap(const Mat &h, const CVec &r, const CVec &p, double t, long cap) {
    return propagator_overlap(h, r, p, t, cap);
}

cplx exact_propagator_overlap(const CMat &h, const CVec &r, const CVec &p, double t, long cap) {
    return propagator_overlap(h, r, p, t, cap);
}

double langevin_step_size(double eps, double gamma, double radius, int eta) {
    if (!(eps > 0) || !(radius > 0) || eta < 1 || !(gamma >= 0))
        throw InputError("step-size rule needs eps > 0, R > 0, gamma >= 0 and eta >= 1");
    return eps * eps * std::exp(-gamma * radius * radius) / (1024.0 * radius * radius * eta);
}

std::vector<Vec> sample_restricted_boltzmann(const Potential &v, double beta, const Region &R, double box,
                                             long count, std::uint64_t seed, double *acceptance) {
    if (!(beta > 0)) throw InputError("beta must be positive");
    if (count < 0) throw InputError("sample count must be nonnegative");
    const int n = v.config_dim();
    ProposalBox b = proposal_box(R, n, box);
    std::mt19937_64 rng(seed);
    double vmin = scan_min(v, b, rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec> out;
    out.reserve(count);
    long proposals = 0;
    while (static_cast<long>(out.size()) < count) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * u(rng);
        const double a = u(rng);
        ++proposals;
        if (R.contains(x)) {
            const double vx = v.eval(x);
            if (vx < vmin) {
                // The scan missed the minimum; restart so the accepted set stays exact.
                vmin = vx;
                out.clear();
                proposals = 0;
                continue;
            }
            if (a < std::exp(-beta * (vx - vmin))) out.push_back(std::move(x));
        }
        if (proposals == 100000 && static_cast<double>(out.size()) / proposals < 1e-4)
            throw SamplerError("rejection sampler acceptance below 1e-4; use a tighter proposal box");
    }
    if (acceptance) *acceptance = proposals > 0 ? static_cast<double>(out.size()) / proposals : 1.0;
    if (proposals > 0 && proposals >= 1000 && static_cast<double>(out.size()) / proposals < 1e-4)
        throw SamplerError("rejection sampler acceptance below 1e-4; use a tighter proposal box");
    return out;
}

double region_mass(const Potential &v, double beta, const Region &R, double box) {
    const int n = v.config_dim();
    ProposalBox whole{Vec::Constant(n, -box), Vec::Constant(n, box)};
    ProposalBox part = proposal_box(R, n, box);
    std::mt19937_64 rng(5);
    const double vmin = scan_min(v, whole, rng);
    if (n == 1) {
        auto f = [&](double x) { return std::exp(-beta * (v.eval(Vec::Constant(1, x)) - vmin)); };
        const double z = adaptive_integrate(f, -box, box, 1e-13);
        const double zr = adaptive_integrate(f, part.lo[0], part.hi[0], 1e-13);
        return zr / z;
    }
    const long per = std::max(8L, static_cast<long>(std::pow(1L << 22, 1.0 / n)));
    const double h = 2.0 * box / per;
    long total = 1;
    for (int i = 0; i < n; ++i) total *= per;
    double z = 0.0, zr = 0.0;
    Vec x(n);
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        for (int i = 0; i < n; ++i) {
            x[i] = -box + (rem % per + 0.5) * h;
            rem /= per;
        }
        const double w = std::exp(-beta * (v.eval(x) - vmin));
        z += w;
        if (R.contains(x)) zr += w;
    }
    return zr / z;
}

LangevinResult langevin_flux(const LangevinConfig &cfg, const Region &R, const Region &P) {
    if (!(cfg.beta > 0) || !(cfg.T > 0) || cfg.trajectories < 1)
        throw InputError("Langevin run needs beta > 0, T > 0 and at least one trajectory");
    const int n = cfg.potential.config_dim();
    if (P.dim() != n) throw InputError("product region dimension does not match the potential");
    LangevinResult res;
    res.gamma = cfg.gamma_lip > 0 ? cfg.gamma_lip : estimate_gamma(cfg.potential, cfg.box);
    res.dt_rule = langevin_step_size(cfg.eps_target, res.gamma, cfg.radius, cfg.potential.particles());
    const double dt_req = cfg.dt > 0 ? cfg.dt : res.dt_rule;
    const double steps_d = std::ceil(cfg.T / dt_req - 1e-9);
    if (steps_d * static_cast<double>(cfg.trajectories) > static_cast<double>(cfg.max_steps))
        throw ResourceError("Langevin run needs " + std::to_string(steps_d) + " steps per trajectory; " +
                            "trajectories * steps exceeds the cap (set dt to override the step-size rule)");
    res.steps = static_cast<long>(steps_d);
    res.dt = cfg.T / res.steps;
    res.trajectories = cfg.trajectories;
    if (cfg.dt > 0) res.notes.push_back("step size overridden; the rule gives " + std::to_string(res.dt_rule));

    std::vector<Vec> x0 = sample_restricted_boltzmann(cfg.potential, cfg.beta, R, cfg.box, cfg.trajectories,
                                                      derive_seed(cfg.seed, 0), &res.acceptance);
    std::vector<char> hit(cfg.trajectories, 0);
    const double noise = std::sqrt(2.0 * res.dt / cfg.beta);
    detail::parallel_for(cfg.trajectories, cfg.threads, [&](long i) {
        std::mt19937_64 rng(derive_seed(cfg.seed, 1 + static_cast<std::uint64_t>(i)));
        std::normal_distribution<double> g(0.0, 1.0);
        if (n == 1) {
            double x = x0[i][0];
            for (long s = 0; s < res.steps; ++s) {
                x += -cfg.potential.derivative_1d(x) * res.dt + noise * g(rng);
                if (cfg.periodic) x = wrap(x, cfg.box);
            }
            hit[i] = P.contains(Vec::Constant(1, x)) ? 1 : 0;
            return;
        }
        Vec x = x0[i];
        for (long s = 0; s < res.steps; ++s) {
            Vec grad = cfg.potential.gradient(x);
            for (int q = 0; q < n; ++q) x[q] += -grad[q] * res.dt + noise * g(rng);
            if (cfg.periodic)
                for (int q = 0; q < n; ++q) x[q] = wrap(x[q], cfg.box);
        }
        hit[i] = P.contains(x) ? 1 : 0;
    });
    long count = 0;
    for (char h : hit) count += h;
    res.fraction = static_cast<double>(count) / cfg.trajectories;
    res.fraction_stderr = std::sqrt(res.fraction * (1.0 - res.fraction) / cfg.trajectories);
    res.p_R = region_mass(cfg.potential, cfg.beta, R, cfg.box);
    res.p_P = region_mass(cfg.potential, cfg.beta, P, cfg.box);
    const double pref = std::sqrt(res.p_R / res.p_P);
    res.nu = pref * res.fraction;
    res.nu_stderr = pref * res.fraction_stderr;
    return res;
}

HalvingStudy langevin_halving_study(const LangevinConfig &cfg, const Region &R, const Region &P, double dt0,
                                    int levels) {
    if (levels < 3 || levels > 32) throw InputError("halving study needs between 3 and 32 levels");
    if (!(dt0 > 0)) throw InputError("coarsest step must be positive");
    const double fine = dt0 / std::ldexp(1.0, levels - 1);
    const double nf_d = cfg.T / fine;
    const long nf = std::lround(nf_d);
    if (std::abs(nf_d - nf) > 1e-9 * nf_d || nf % (1L << (levels - 1)) != 0)
        throw InputError("T must be an integer multiple of the coarsest step");
    if (static_cast<double>(nf) * 2.0 * cfg.trajectories > static_cast<double>(cfg.max_steps))
        throw ResourceError("halving study exceeds the step cap");
    const int n = cfg.potential.config_dim();

    std::vector<Vec> x0 = sample_restricted_boltzmann(cfg.potential, cfg.beta, R, cfg.box, cfg.trajectories,
                                                      derive_seed(cfg.seed, 0));
    const long m = cfg.trajectories;
    // Per trajectory and level: indicator and |x|^2.
    std::vector<double> ind(static_cast<size_t>(m) * levels), mom(static_cast<size_t>(m) * levels);
    detail::parallel_for(m, cfg.threads, [&](long i) {
        std::mt19937_64 rng(derive_seed(cfg.seed, 1 + static_cast<std::uint64_t>(i)));
        std::normal_distribution<double> g(0.0, 1.0);
        const double sq = std::sqrt(fine);
        const double amp = std::sqrt(2.0 / cfg.beta);
        if (n == 1) {
            double x[32], dw[32];
            for (int l = 0; l < levels; ++l) {
                x[l] = x0[i][0];
                dw[l] = 0.0;
            }
            for (long k = 0; k < nf; ++k) {
                const double inc = sq * g(rng);
                for (int l = 0; l < levels; ++l) {
                    dw[l] += inc;
                    const long stride = 1L << (levels - 1 - l);
                    if ((k + 1) % stride == 0) {
                        x[l] += -cfg.potential.derivative_1d(x[l]) * (fine * stride) + amp * dw[l];
                        dw[l] = 0.0;
                    }
                }
            }
            for (int l = 0; l < levels; ++l) {
                ind[static_cast<size_t>(i) * levels + l] = P.contains(Vec::Constant(1, x[l])) ? 1.0 : 0.0;
                mom[static_cast<size_t>(i) * levels + l] = x[l] * x[l];
            }
            return;
        }
        std::vector<Vec> x(levels, x0[i]);
        std::vector<Vec> dw(levels, Vec::Zero(n));
        for (long k = 0; k < nf; ++k) {
            Vec inc(n);
            for (int q = 0; q < n; ++q) inc[q] = sq * g(rng);
            for (int l = 0; l < levels; ++l) {
                dw[l] += inc;
                const long stride = 1L << (levels - 1 - l);
                if ((k + 1) % stride == 0) {
                    const double h = fine * stride;
                    x[l] += -cfg.potential.gradient(x[l]) * h + amp * dw[l];
                    dw[l].setZero();
                }
            }
        }
        for (int l = 0; l < levels; ++l) {
            ind[static_cast<size_t>(i) * levels + l] = P.contains(x[l]) ? 1.0 : 0.0;
            mom[static_cast<size_t>(i) * levels + l] = x[l].squaredNorm();
        }
    });

    auto mean_se = [&](auto &&value) {
        double s = 0.0, s2 = 0.0;
        for (long i = 0; i < m; ++i) {
            const double v = value(i);
            s += v;
            s2 += v * v;
        }
        const double mu = s / m;
        const double var = std::max(0.0, s2 / m - mu * mu);
        return std::pair<double, double>(mu, std::sqrt(var / m));
    };

    HalvingStudy st;
    st.trajectories = m;
    for (int l = 0; l < levels; ++l) {
        HalvingLevel lv;
        lv.dt = fine * (1L << (levels - 1 - l));
        std::tie(lv.fraction, lv.fraction_stderr) = mean_se([&](long i) { return ind[i * levels + l]; });
        std::tie(lv.second_moment, lv.second_moment_stderr) = mean_se([&](long i) { return mom[i * levels + l]; });
        st.levels.push_back(lv);
    }
    std::vector<double> hs, absdiff;
    for (int l = 0; l + 1 < levels; ++l) {
        auto [fd, fse] = mean_se([&](long i) { return ind[i * levels + l] - ind[i * levels + l + 1]; });
        auto [md, mse] = mean_se([&](long i) { return mom[i * levels + l] - mom[i * levels + l + 1]; });
        st.fraction_diff.push_back(fd);
        st.fraction_diff_stderr.push_back(fse);
        st.moment_diff.push_back(md);
        st.moment_diff_stderr.push_back(mse);
        hs.push_back(st.levels[l].dt);
        absdiff.push_back(std::abs(md));
    }
    if (std::any_of(absdiff.begin(), absdiff.end(), [](double v) { return v == 0.0; }))
        throw NumericError("a level difference of the second moment is exactly zero; order undefined");
    st.order_fit = fit_scaling(hs, absdiff, FitModel::PowerLaw, 0);
    st.weak_order = st.order_fit.exponent;

    std::vector<double> dts, fr;
    for (const auto &lv : st.levels) {
        dts.push_back(lv.dt);
        fr.push_back(lv.fraction);
    }
    LinearFit lf = least_squares(dts, fr);
    st.bias_constant = lf.slope;
    st.extrapolated_fraction = lf.intercept;
    st.p_R = region_mass(cfg.potential, cfg.beta, R, cfg.box);
    st.p_P = region_mass(cfg.potential, cfg.beta, P, cfg.box);
    return st;
}

// ---------------------------------------------------------------------------------------------

std::string to_string(KappaGenerator g) {
    return g == KappaGenerator::CenteredBackward ? "centered-backward" : "sqra-self-adjoint";
}

ConditionNumber condition_number(const Mat &a, int deflate) {
    if (a.rows() == 0 || a.rows() != a.cols()) throw InputError("condition number needs a nonempty square matrix");
    if (deflate < 0 || deflate >= a.rows()) throw InputError("invalid deflation count");
    Eigen::BDCSVD<Mat> svd(a);
    const Vec &s = svd.singularValues();
    ConditionNumber c;
    const long n = s.size();
    c.sigma_max = s[0];
    c.sigma_min = s[n - 1 - deflate];
    c.deflated = deflate > 0;
    c.sigma_zero = deflate > 0 ? s[n - 1] : 0.0;
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * c.sigma_max;
    if (!(c.sigma_min > floor)) {
        c.notes.push_back("smallest retained singular value is at the rounding floor");
        if (!(c.sigma_min > 0)) throw SingularityError("matrix is singular beyond the deflated modes");
    }
    if (deflate > 0 && c.sigma_zero > 1e-6 * c.sigma_min)
        c.notes.push_back("deflated singular value is not small compared with the retained minimum");
    c.kappa = c.sigma_max / c.sigma_min;
    return c;
}

ConditionNumber condition_number_rate_matrix(const Mat &b, int max_iter, double tol) {
    if (b.rows() < 2 || b.rows() != b.cols()) throw InputError("rate matrix must be square with at least two rows");
    using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const long n = b.rows();
    const double scale = b.cwiseAbs().maxCoeff();
    for (long i = 0; i < n; ++i)
        if (std::abs(b.row(i).sum()) > 1e-8 * scale) throw InputError("rows of a rate matrix must sum to zero");

    // Bordered matrix [[B, e], [e^T, 0]] with the diagonal rebuilt so that B e = 0 holds in extended precision.
    LMat k = LMat::Zero(n + 1, n + 1);
    for (long i = 0; i < n; ++i) {
        long double diag = 0.0L;
        for (long j = 0; j < n; ++j) {
            if (j == i) continue;
            k(i, j) = b(i, j);
            diag -= static_cast<long double>(b(i, j));
        }
        k(i, i) = diag;
        k(i, n) = 1.0L;
        k(n, i) = 1.0L;
    }
    Eigen::PartialPivLU<LMat> lu(k);
    Eigen::PartialPivLU<LMat> lut(k.transpose());

    // Left null vector pi: B^T pi = 0, sum(pi) = 1.
    LVec rhs = LVec::Zero(n + 1);
    rhs[n] = 1.0L;
    LVec pi = lut.solve(rhs).head(n);
    const long double pipi = pi.squaredNorm();

    auto project_out = [](LVec &x, const LVec &u, long double uu) { x -= (u.dot(x) / uu) * u; };
    LVec ones = LVec::Ones(n);
    auto pinv = [&](const LVec &x) {  // B^+ x for x orthogonal to pi
        LVec r(n + 1);
        r.head(n) = x;
        r[n] = 0.0L;
        LVec y = lu.solve(r).head(n);
        project_out(y, ones, static_cast<long double>(n));
        return y;
    };
    auto pinv_t = [&](const LVec &x) {  // (B^T)^+ x for x orthogonal to e
        LVec r(n + 1);
        r.head(n) = x;
        r[n] = 0.0L;
        LVec z = lut.solve(r).head(n);
        project_out(z, pi, pipi);
        return z;
    };

    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    LVec x(n);
    for (long i = 0; i < n; ++i) x[i] = nd(rng);
    project_out(x, pi, pipi);
    x /= x.norm();
    long double lambda = 0.0L;
    ConditionNumber c;
    int it = 0;
    for (; it < max_iter; ++it) {
        LVec nx = pinv_t(pinv(x));
        project_out(nx, pi, pipi);
        const long double next = x.dot(nx);
        x = nx / nx.norm();
        if (it > 0 && std::abs(next - lambda) <= static_cast<long double>(tol) * next) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    if (it == max_iter) c.notes.push_back("inverse iteration for the smallest singular value did not converge");
    if (!(lambda > 0)) throw SingularityError("rate matrix has a null space beyond the constant vector");
    Eigen::BDCSVD<Mat> svd(b);
    c.sigma_max = svd.singularValues()[0];
    c.sigma_min = static_cast<double>(1.0L / std::sqrt(lambda));
    c.deflated = true;
    c.sigma_zero = 0.0;
    c.kappa = c.sigma_max / c.sigma_min;
    return c;
}

Mat kappa_generator(const Potential &v, double beta, const Basis &basis, KappaGenerator g) {
    return g == KappaGenerator::CenteredBackward ? build_bke_centered(v, beta, basis) : build_hbeta(v, beta, basis);
}

namespace {

ConditionNumber generator_condition(const Mat &a, KappaGenerator g) {
    return g == KappaGenerator::CenteredBackward ? condition_number_rate_matrix(a) : condition_number(a);
}

}  // namespace

KappaScan kappa_scan_n(const Potential &v, double beta, double L, const std::vector<int> &ns, KappaGenerator g,
                       int threads) {
    if (ns.size() < 2) throw InputError("N-sweep needs at least two sizes");
    KappaScan scan;
    scan.sweep = "N";
    scan.generator = g;
    scan.points.resize(ns.size());
    detail::parallel_for(static_cast<long>(ns.size()), threads, [&](long i) {
        Basis b = Basis::finite_difference(ns[i], L, v.dim(), v.particles(), Boundary::Reflecting);
        scan.points[i].parameter = ns[i];
        scan.points[i].cond = generator_condition(kappa_generator(v, beta, b, g), g);
    });
    std::vector<double> x, y;
    for (const auto &p : scan.points) {
        x.push_back(p.parameter);
        y.push_back(p.cond.kappa);
    }
    scan.fit = fit_scaling(x, y, FitModel::PowerLaw);
    return scan;
}

KappaScan kappa_scan_beta(const Potential &v, const std::vector<double> &betas, int N, double L, KappaGenerator g,
                          int threads) {
    if (betas.size() < 2) throw InputError("beta-sweep needs at least two temperatures");
    KappaScan scan;
    scan.sweep = "beta";
    scan.generator = g;
    scan.points.resize(betas.size());
    Basis b = Basis::finite_difference(N, L, v.dim(), v.particles(), Boundary::Reflecting);
    detail::parallel_for(static_cast<long>(betas.size()), threads, [&](long i) {
        scan.points[i].parameter = betas[i];
        scan.points[i].cond = generator_condition(kappa_generator(v, betas[i], b, g), g);
    });
    std::vector<double> x, y;
    for (const auto &p : scan.points) {
        x.push_back(p.parameter);
        y.push_back(p.cond.kappa);
    }
    scan.fit = fit_scaling(x, y, FitModel::Exponential);
    return scan;
}

// ---------------------------------------------------------------------------------------------

Potential with_particles(const Potential &pair, int eta, int d) {
    if (pair.kind() != PotentialKind::PolynomialPair) throw InputError("Lipschitz scan needs a pair potential");
    return Potential::polynomial_pair(pair.coefficients(), d, eta, pair.cos_amplitude(), pair.cos_frequency());
}

LipschitzScan lipschitz_scan(const Potential &pair, const std::vector<int> &etas, int d,
                             const LipschitzOptions &opts) {
    if (etas.size() < 2) throw InputError("Lipschitz scan needs at least two particle counts");
    if (d < 1) throw InputError("dimension must be positive");
    LipschitzScan out;
    out.d = d;
    out.gamma = pair_curvature_scan(pair, 0.0, opts.r_hi).gamma;
    CurvatureScan win = pair_curvature_scan(pair, opts.r_lo, opts.r_hi);
    out.r0 = win.r_at_max;
    if (!(win.gamma >= 0.5 * out.gamma) || !(out.gamma > 0))
        throw ConfigError("no r0 with |V''(r0)| >= gamma/2 in the scan window [" + std::to_string(opts.r_lo) + ", " +
                          std::to_string(opts.r_hi) + "]");
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(-opts.box, opts.box);
    auto spectral_norm = [](const Mat &h) {
        Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    };
    std::vector<double> xs, ys;
    for (int eta : etas) {
        if (eta < 2) throw InputError("particle counts must be at least 2");
        Potential v = with_particles(pair, eta, d);
        const int n = eta * d;
        Vec x = Vec::Zero(n), w = Vec::Zero(n);
        for (int i = 0; i < eta; ++i) {
            const bool far = i >= eta / 2;
            if (far) x[i * d] = out.r0;
            w[i * d] = far ? -1.0 : 1.0;
        }
        Mat h = v.hessian(x);
        LipschitzPoint pt;
        pt.eta = eta;
        pt.two_cluster_quotient = w.dot(h * w) / w.squaredNorm();
        pt.two_cluster_norm = spectral_norm(h);
        for (int c = 0; c < opts.random_configs; ++c) {
            Vec y(n);
            for (int i = 0; i < n; ++i) y[i] = u(rng);
            pt.random_max_norm = std::max(pt.random_max_norm, spectral_norm(v.hessian(y)));
        }
        pt.max_norm = std::max(pt.two_cluster_norm, pt.random_max_norm);
        pt.bound = out.gamma * eta / 4.0;
        out.points.push_back(pt);
        xs.push_back(eta);
        ys.push_back(pt.max_norm);
    }
    out.fit = fit_scaling(xs, ys, FitModel::Linear);
    out.slope_ok = out.fit.exponent >= 0.25 * out.gamma;
    return out;
}

// ---------------------------------------------------------------------------------------------

double classical_cost(double T, double eta, double eps, double gamma, double R) {
    if (!(T > 0) || !(eta >= 1) || !(eps > 0) || !(gamma >= 0) || !(R > 0))
        throw InputError("classical cost needs T, eps, R > 0, eta >= 1 and gamma >= 0");
    return 1024.0 * T * R * R * eta * eta * std::max(1.0, std::log(eta)) * std::exp(R * R * gamma) /
           std::pow(eps, 4);
}

double quantum_cost(double t, double eta, double eps, double beta, double N, double alpha_V) {
    if (!(t > 0) || !(eta >= 1) || !(eps > 0) || !(beta > 0) || !(N > 0) || !(alpha_V >= 0))
        throw InputError("quantum cost needs positive inputs");
    return (std::pow(eta, 2.5) * alpha_V * std::sqrt(t * beta) + std::pow(eta, 1.5) * std::sqrt(t / beta) * N) / eps;
}

CostComparison cost_comparison(const CostInputs &in, const std::vector<double> &etas) {
    CostComparison out;
    for (double eta : etas) {
        CostPoint p;
        p.eta = eta;
        p.gamma = in.gamma_fixed >= 0 ? in.gamma_fixed : eta * in.gamma_pair;
        p.classical = classical_cost(in.T, eta, in.eps, p.gamma, in.R);
        p.quantum = quantum_cost(in.T, eta, in.eps, in.beta, in.N, in.alpha_V);
        if (!out.crossover_eta && p.quantum < p.classical) out.crossover_eta = eta;
        out.curve.push_back(p);
    }
    return out;
}

}  // namespace fpflux
