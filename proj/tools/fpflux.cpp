// fpflux: batch front end. Every subcommand reads an optional sectioned config, writes CSV and
// JSON artifacts plus a manifest into the output directory, and maps library errors to exit codes.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpflux/acceptance.hpp"
#include "fpflux/baselines.hpp"
#include "fpflux/config.hpp"
#include "fpflux/discretize.hpp"
#include "fpflux/io.hpp"
#include "fpflux/lchs.hpp"
#include "fpflux/overlap.hpp"
#include "fpflux/resources.hpp"
#include "fpflux/stateprep.hpp"

#ifndef FPFLUX_VERSION
#define FPFLUX_VERSION "unknown"
#endif

using json = nlohmann::ordered_json;
using namespace fpflux;

namespace {

enum Exit : int {
    kOk = 0,
    kVerifyFailed = 1,
    kUsage = 2,
    kInput = 3,
    kConfig = 4,
    kResource = 5,
    kSingular = 6,
    kUnsupported = 7,
    kSubnormalization = 8,
    kSolver = 9,
    kCertificate = 10,
    kSampler = 11,
    kNumeric = 12,
    kIo = 13,
    kInternal = 70,
};

// Typed config access that remembers every resolved value for the manifest.
class Params {
public:
    explicit Params(const Config &c) : c_(c) {}

    double num(const std::string &s, const std::string &k, double d) {
        const double v = c_.get_double(s, k, d);
        resolved_[s][k] = v;
        return v;
    }
    long integer(const std::string &s, const std::string &k, long d) {
        const long v = c_.get_long(s, k, d);
        resolved_[s][k] = v;
        return v;
    }
    bool flag(const std::string &s, const std::string &k, bool d) {
        const bool v = c_.get_bool(s, k, d);
        resolved_[s][k] = v;
        return v;
    }
    std::string text(const std::string &s, const std::string &k, const std::string &d) {
        std::string v = c_.get_string(s, k, d);
        resolved_[s][k] = v;
        return v;
    }
    std::vector<double> list(const std::string &s, const std::string &k, const std::vector<double> &d) {
        auto v = c_.get_doubles(s, k, d);
        resolved_[s][k] = v;
        return v;
    }
    void note(const std::string &s, const std::string &k, const json &v) { resolved_[s][k] = v; }
    const json &resolved() const { return resolved_; }

private:
    const Config &c_;
    json resolved_ = json::object();
};

struct Context {
    std::string subcommand;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string config_path;
};

void write_text(const Context &ctx, const std::string &name, const std::string &content) {
    atomic_write((std::filesystem::path(ctx.out_dir) / name).string(), content);
}

void write_json(const Context &ctx, const std::string &name, const json &j) { write_text(ctx, name, j.dump(2) + "\n"); }

void write_manifest(const Context &ctx, const Params &p, const std::vector<std::string> &artifacts) {
    json m;
    m["tool"] = "fpflux";
    m["version"] = FPFLUX_VERSION;
    m["subcommand"] = ctx.subcommand;
    m["config_file"] = ctx.config_path;
    m["seed"] = ctx.seed;
    m["threads"] = ctx.threads;
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    m["resolved_config"] = p.resolved();
    m["artifacts"] = artifacts;
    write_json(ctx, ctx.subcommand + ".manifest.json", m);
}

// ---------------------------------------------------------------------------------------------
// Shared sections

const std::set<std::string> kPotentialKeys = {"kind", "coefficients", "dim", "particles", "cos_amplitude",
                                              "cos_frequency"};
const std::set<std::string> kBasisKeys = {"scheme", "N", "L", "boundary"};

Potential make_potential(Params &p, const std::string &sec, const std::string &dflt_kind,
                         const std::vector<double> &dflt_coeffs) {
    const std::string kind = p.text(sec, "kind", dflt_kind);
    const auto c = p.list(sec, "coefficients", dflt_coeffs);
    const int dim = static_cast<int>(p.integer(sec, "dim", 1));
    auto need = [&](size_t n) {
        if (c.size() != n)
            throw ConfigError("[" + sec + "] coefficients: kind '" + kind + "' takes " + std::to_string(n) +
                              " values");
    };
    switch (potential_kind_from_string(kind)) {
        case PotentialKind::DoubleWell1D: need(2); return Potential::double_well(c[0], c[1], dim);
        case PotentialKind::Quadratic:
            need(1);
            return Potential::quadratic(c[0], dim, static_cast<int>(p.integer(sec, "particles", 1)));
        case PotentialKind::CosinePlusQuadratic: need(3); return Potential::cosine_plus_quadratic(c[0], c[1], c[2], dim);
        case PotentialKind::PolynomialPair:
            return Potential::polynomial_pair(c, dim, static_cast<int>(p.integer(sec, "particles", 2)),
                                              p.num(sec, "cos_amplitude", 0.0), p.num(sec, "cos_frequency", 1.0));
        case PotentialKind::Augmented: break;
    }
    throw ConfigError("[" + sec + "] kind: augmented potentials are built by the stateprep subcommand");
}

Basis make_basis(Params &p, const Potential &v, const std::string &scheme, int N, double L) {
    const Scheme s = scheme_from_string(p.text("basis", "scheme", scheme));
    const int n = static_cast<int>(p.integer("basis", "N", N));
    const double l = p.num("basis", "L", L);
    if (s == Scheme::PlaneWave) return Basis::plane_wave(n, l, v.dim(), v.particles());
    return Basis::finite_difference(n, l, v.dim(), v.particles(),
                                    boundary_from_string(p.text("basis", "boundary", "reflecting")));
}

Region interval(Params &p, const std::string &sec, const std::string &prefix, double lo, double hi) {
    return Region::interval(p.num(sec, prefix + "_lo", lo), p.num(sec, prefix + "_hi", hi));
}

const double kInf = 1e300;  // open interval end

// ---------------------------------------------------------------------------------------------
// Subcommands

using Allowed = std::map<std::string, std::set<std::string>>;

std::vector<std::string> cmd_discretize(const Context &ctx, Params &p) {
    Potential v = make_potential(p, "potential", "double-well-1d", {1.0, 1.0});
    Basis b = make_basis(p, v, "plane-wave", 64, 2.0);
    const double beta = p.num("discretize", "beta", 5.0);
    const long top = p.integer("discretize", "eigenvalues", 8);
    const bool matrices = p.flag("discretize", "write_matrices", false);
    OperatorSet ops = build_operator_set(v, beta, b);
    Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(ops.Hbeta, Eigen::EigenvaluesOnly).eigenvalues();
    CsvTable t({"index", "eigenvalue"});
    for (long k = 0; k < std::min<long>(top, ev.size()); ++k)
        t.row({std::to_string(k), format_double(ev[ev.size() - 1 - k])});
    std::vector<std::string> out = {"discretize.csv", "discretize.json"};
    write_text(ctx, "discretize.csv", t.str());
    json j;
    j["dimension"] = b.dimension();
    j["scheme"] = to_string(b.scheme);
    j["potential"] = v.describe();
    j["top_eigenvalue"] = ev[ev.size() - 1];
    if (b.scheme == Scheme::PlaneWave) {
        auto routes = subnormalization_routes(ops.A);
        j["norm_script_A"] = routes.norm_script_A;
        j["alpha_script_A"] = routes.alpha_script_A;
        j["alpha_H"] = routes.alpha_H;
        j["norm_H"] = routes.norm_H;
    }
    write_json(ctx, "discretize.json", j);
    if (matrices) {
        write_text(ctx, "hbeta.mtx", matrix_market(ops.Hbeta));
        out.push_back("hbeta.mtx");
        if (b.scheme == Scheme::FiniteDifference) {
            write_text(ctx, "fke.mtx", matrix_market(ops.F));
            out.push_back("fke.mtx");
        } else {
            write_text(ctx, "script_a.mtx", matrix_market(ops.script_A));
            out.push_back("script_a.mtx");
        }
    }
    return out;
}

json plan_json(const LchsPlan &plan) {
    json j;
    j["t"] = plan.t;
    j["eps"] = plan.eps;
    j["alpha_A"] = plan.alpha_A;
    j["K"] = plan.K;
    j["M_q"] = plan.M_q;
    j["alpha_g"] = plan.alpha_g;
    j["certificate"] = plan.certificate;
    j["refinements"] = plan.refinements;
    j["max_degree"] = plan.max_degree();
    j["total_degree"] = plan.total_degree();
    return j;
}

std::vector<std::string> cmd_lchs(const Context &ctx, Params &p) {
    LchsPlan plan = build_plan(p.num("lchs", "t", 1.0), p.num("lchs", "eps", 1e-6), p.num("lchs", "alpha", 1.0));
    CsvTable t({"j", "k", "weight", "coefficient", "eps_j", "degree"});
    for (int j = 0; j < plan.M_q; ++j)
        t.row({std::to_string(j), format_double(plan.nodes[j]), format_double(plan.weights[j]),
               format_double(plan.coeffs[j]), format_double(plan.eps_j[j]), std::to_string(plan.degrees[j])});
    write_text(ctx, "lchs-certify.csv", t.str());
    write_json(ctx, "lchs-certify.json", plan_json(plan));
    return {"lchs-certify.csv", "lchs-certify.json"};
}

struct FluxSetup {
    Potential v;
    Basis basis;
    double beta = 0.0;
    double eps = 0.0;
    OperatorSet ops;
    RegionState R, P;
    double norm = 0.0;
    FluxOptions opts;
};

FluxSetup flux_setup(const Context &ctx, Params &p, const std::string &sec) {
    FluxSetup s;
    s.v = make_potential(p, "potential", "double-well-1d", {1.0, 1.0});
    s.basis = make_basis(p, s.v, "plane-wave", 128, 2.0);
    if (s.basis.scheme != Scheme::PlaneWave) throw ConfigError("[basis] scheme: flux estimation needs plane waves");
    s.beta = p.num(sec, "beta", 5.0);
    s.eps = p.num(sec, "eps", 1e-3);
    s.ops = build_operator_set(s.v, s.beta, s.basis);
    s.R = region_state(s.v, s.beta, s.basis, interval(p, sec, "r", -kInf, -0.3));
    s.P = region_state(s.v, s.beta, s.basis, interval(p, sec, "p", 0.3, kInf));
    s.norm = Eigen::SelfAdjointEigenSolver<CMat>(s.ops.script_A, Eigen::EigenvaluesOnly)
                 .eigenvalues()
                 .cwiseAbs()
                 .maxCoeff();
    s.opts.shots = p.integer(sec, "shots", 1000000);
    const std::string mode = p.text(sec, "mode", "exact-unitary");
    if (mode == "exact-unitary") s.opts.mode = FluxMode::ExactUnitary;
    else if (mode == "qsp") s.opts.mode = FluxMode::Qsp;
    else throw ConfigError("[" + sec + "] mode: expected exact-unitary or qsp");
    const std::string route = p.text(sec, "route", "auto");
    if (route == "auto") s.opts.route = QspRoute::Auto;
    else if (route == "phases") s.opts.route = QspRoute::Phases;
    else if (route == "chebyshev-sum") s.opts.route = QspRoute::ChebyshevSum;
    else throw ConfigError("[" + sec + "] route: expected auto, phases or chebyshev-sum");
    s.opts.imag = p.flag(sec, "imag", false);
    s.opts.seed = ctx.seed;
    return s;
}

const std::vector<std::string> kFluxHeader = {"t",      "value_re", "value_im", "stderr",  "stderr_im", "exact_re",
                                              "exact_im", "shots",  "seed",     "alpha",   "queries",   "mode",
                                              "route"};

std::vector<std::string> flux_row(const OverlapEstimate &e) {
    return {format_double(e.t),          format_double(e.value.real()), format_double(e.value.imag()),
            format_double(e.stderr_re),  format_double(e.stderr_im),    format_double(e.exact.real()),
            format_double(e.exact.imag()), std::to_string(e.shots),     std::to_string(e.seed),
            format_double(e.alpha),      std::to_string(e.queries),     e.mode,
            e.route};
}

std::vector<std::string> cmd_flux(const Context &ctx, Params &p) {
    FluxSetup s = flux_setup(ctx, p, "flux");
    const double t = p.num("flux", "t", 2.0);
    LchsPlan plan = t > 0 ? build_plan(t, s.eps, s.norm * (1.0 + 1e-9)) : identity_plan(s.norm * (1.0 + 1e-9));
    OverlapEstimate e = estimate_flux(plan, s.ops, s.R, s.P, s.opts);
    CsvTable table(kFluxHeader);
    table.row(flux_row(e));
    write_text(ctx, "flux.csv", table.str());
    json j;
    j["plan"] = plan_json(plan);
    j["p_R"] = s.R.p_bar;
    j["p_P"] = s.P.p_bar;
    j["p0_re"] = e.p0_re;
    j["p0_im"] = e.p0_im;
    j["abs_error"] = std::abs(e.value.real() - e.exact.real());
    write_json(ctx, "flux.json", j);
    return {"flux.csv", "flux.json"};
}

std::vector<std::string> cmd_flux_scan(const Context &ctx, Params &p) {
    FluxSetup s = flux_setup(ctx, p, "flux-scan");
    const auto times = p.list("flux-scan", "times", {0.5, 1.0, 2.0, 4.0});
    const double theta = p.num("flux-scan", "theta", 0.0);
    CsvTable table(kFluxHeader);
    std::vector<FluxPoint> scan;
    json plans = json::array();
    for (size_t i = 0; i < times.size(); ++i) {
        LchsPlan plan = build_plan(times[i], s.eps, s.norm * (1.0 + 1e-9));
        FluxOptions o = s.opts;
        o.seed = derive_seed(ctx.seed, i);
        OverlapEstimate e = estimate_flux(plan, s.ops, s.R, s.P, o);
        table.row(flux_row(e));
        scan.push_back({times[i], e.value.real(), e.stderr_re});
        plans.push_back(plan_json(plan));
    }
    RateResult rr = rate_and_hitting(scan, s.R.p_bar, s.P.p_bar, theta);
    CsvTable rates({"t", "rate"});
    for (size_t i = 0; i < rr.times.size(); ++i) rates.row_values({rr.times[i], rr.rates[i]});
    write_text(ctx, "flux-scan.csv", table.str());
    write_text(ctx, "flux-scan-rates.csv", rates.str());
    json j;
    j["plans"] = plans;
    j["p_R"] = s.R.p_bar;
    j["p_P"] = s.P.p_bar;
    j["threshold"] = rr.threshold;
    j["hitting_time"] = rr.hitting_time ? json(*rr.hitting_time) : json("not reached");
    j["notes"] = rr.notes;
    write_json(ctx, "flux-scan.json", j);
    return {"flux-scan.csv", "flux-scan-rates.csv", "flux-scan.json"};
}

std::vector<std::string> cmd_langevin(const Context &ctx, Params &p) {
    LangevinConfig cfg;
    cfg.potential = make_potential(p, "potential", "double-well-1d", {1.0, 1.0});
    cfg.beta = p.num("langevin", "beta", 5.0);
    cfg.T = p.num("langevin", "T", 2.0);
    cfg.trajectories = p.integer("langevin", "trajectories", 100000);
    cfg.eps_target = p.num("langevin", "eps_target", 0.1);
    cfg.radius = p.num("langevin", "radius", 1.0);
    cfg.gamma_lip = p.num("langevin", "gamma", 0.0);
    cfg.dt = p.num("langevin", "dt", 0.0);
    cfg.box = p.num("langevin", "box", 2.5);
    cfg.periodic = p.flag("langevin", "periodic", false);
    cfg.max_steps = p.integer("langevin", "max_steps", cfg.max_steps);
    cfg.seed = ctx.seed;
    cfg.threads = ctx.threads;
    const Region R = interval(p, "langevin", "r", -kInf, -0.3);
    const Region P = interval(p, "langevin", "p", 0.3, kInf);
    const long levels = p.integer("langevin", "halving_levels", 0);
    json j;
    if (levels > 0) {
        const double dt0 = p.num("langevin", "dt0", 0.04);
        HalvingStudy st = langevin_halving_study(cfg, R, P, dt0, static_cast<int>(levels));
        const double w = std::sqrt(st.p_R / st.p_P);
        CsvTable t({"dt", "fraction", "fraction_stderr", "nu", "second_moment", "second_moment_stderr"});
        for (const auto &l : st.levels)
            t.row_values({l.dt, l.fraction, l.fraction_stderr, w * l.fraction, l.second_moment,
                          l.second_moment_stderr});
        write_text(ctx, "langevin.csv", t.str());
        j["weak_order"] = st.weak_order;
        j["order_ci"] = {st.order_fit.ci_lo, st.order_fit.ci_hi};
        j["bias_constant"] = st.bias_constant;
        j["extrapolated_nu"] = w * st.extrapolated_fraction;
        j["p_R"] = st.p_R;
        j["p_P"] = st.p_P;
        j["trajectories"] = st.trajectories;
    } else {
        LangevinResult r = langevin_flux(cfg, R, P);
        CsvTable t({"dt", "dt_rule", "steps", "trajectories", "fraction", "fraction_stderr", "nu", "nu_stderr"});
        t.row({format_double(r.dt), format_double(r.dt_rule), std::to_string(r.steps), std::to_string(r.trajectories),
               format_double(r.fraction), format_double(r.fraction_stderr), format_double(r.nu),
               format_double(r.nu_stderr)});
        write_text(ctx, "langevin.csv", t.str());
        j["gamma"] = r.gamma;
        j["p_R"] = r.p_R;
        j["p_P"] = r.p_P;
        j["acceptance"] = r.acceptance;
        j["notes"] = r.notes;
    }
    write_json(ctx, "langevin.json", j);
    return {"langevin.csv", "langevin.json"};
}

json fit_json(const ScalingFit &f) {
    json j;
    j["model"] = to_string(f.model);
    j["exponent"] = f.exponent;
    j["prefactor"] = f.prefactor;
    j["r2"] = f.r2;
    j["ci"] = {f.ci_lo, f.ci_hi};
    j["notes"] = f.notes;
    return j;
}

std::vector<std::string> cmd_kappa(const Context &ctx, Params &p) {
    Potential v = make_potential(p, "potential", "double-well-1d", {1.0, 1.0});
    const std::string sweep = p.text("kappa-scan", "sweep", "N");
    const std::string gen = p.text("kappa-scan", "generator", "centered-backward");
    KappaGenerator g;
    if (gen == "centered-backward") g = KappaGenerator::CenteredBackward;
    else if (gen == "sqra-self-adjoint") g = KappaGenerator::SqraSelfAdjoint;
    else throw ConfigError("[kappa-scan] generator: expected centered-backward or sqra-self-adjoint");
    KappaScan s;
    if (sweep == "N") {
        std::vector<int> ns;
        for (double n : p.list("kappa-scan", "ns", {64, 128, 256, 512, 1024})) ns.push_back(static_cast<int>(n));
        s = kappa_scan_n(v, p.num("kappa-scan", "beta", 10.0), p.num("kappa-scan", "L", 1.5), ns, g, ctx.threads);
    } else if (sweep == "beta") {
        auto betas = p.list("kappa-scan", "betas", {10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
        s = kappa_scan_beta(v, betas, static_cast<int>(p.integer("kappa-scan", "N", 1024)),
                            p.num("kappa-scan", "L", 4.0), g, ctx.threads);
    } else {
        throw ConfigError("[kappa-scan] sweep: expected N or beta");
    }
    CsvTable t({s.sweep, "kappa", "sigma_max", "sigma_min"});
    for (const auto &pt : s.points)
        t.row_values({pt.parameter, pt.cond.kappa, pt.cond.sigma_max, pt.cond.sigma_min});
    write_text(ctx, "kappa-scan.csv", t.str());
    json j = fit_json(s.fit);
    j["sweep"] = s.sweep;
    j["generator"] = to_string(s.generator);
    write_json(ctx, "kappa-scan.json", j);
    return {"kappa-scan.csv", "kappa-scan.json"};
}

std::vector<std::string> cmd_lipschitz(const Context &ctx, Params &p) {
    const int d = static_cast<int>(p.integer("lipschitz-scan", "d", 1));
    Potential pair = Potential::polynomial_pair(p.list("lipschitz-scan", "coefficients", {0.0}), d, 2,
                                                p.num("lipschitz-scan", "cos_amplitude", 1.0),
                                                p.num("lipschitz-scan", "cos_frequency", 1.0));
    std::vector<int> etas;
    for (double e : p.list("lipschitz-scan", "etas", {4, 8, 12, 16, 20, 24, 28, 32})) etas.push_back(static_cast<int>(e));
    LipschitzOptions o;
    o.r_lo = p.num("lipschitz-scan", "r_lo", o.r_lo);
    o.r_hi = p.num("lipschitz-scan", "r_hi", o.r_hi);
    o.box = p.num("lipschitz-scan", "box", o.box);
    o.random_configs = static_cast<int>(p.integer("lipschitz-scan", "random_configs", o.random_configs));
    o.seed = ctx.seed;
    LipschitzScan s = lipschitz_scan(pair, etas, d, o);
    CsvTable t({"eta", "two_cluster_quotient", "two_cluster_norm", "random_max_norm", "max_norm", "bound"});
    for (const auto &pt : s.points)
        t.row_values({double(pt.eta), pt.two_cluster_quotient, pt.two_cluster_norm, pt.random_max_norm, pt.max_norm,
                      pt.bound});
    write_text(ctx, "lipschitz-scan.csv", t.str());
    json j = fit_json(s.fit);
    j["gamma"] = s.gamma;
    j["r0"] = s.r0;
    j["slope_ok"] = s.slope_ok;
    write_json(ctx, "lipschitz-scan.json", j);
    return {"lipschitz-scan.csv", "lipschitz-scan.json"};
}

std::vector<std::string> cmd_stateprep(const Context &ctx, Params &p) {
    LocalPrepProblem pr;
    pr.base = make_potential(p, "potential", "cosine-plus-quadratic", {1.0, 1.0, 1.0});
    pr.region = interval(p, "stateprep", "r", -0.75, -0.25);
    pr.m = p.num("stateprep", "m", pr.m);
    pr.beta = p.num("stateprep", "beta", pr.beta);
    pr.eps = p.num("stateprep", "eps", pr.eps);
    pr.box = p.num("stateprep", "box", pr.box);
    pr.N = static_cast<int>(p.integer("stateprep", "N", pr.N));
    double kappa = p.num("stateprep", "kappa", 20.0);
    json j;
    if (kappa <= 0) {
        KappaChoice kc = choose_kappa(pr);
        kappa = kc.kappa;
        j["kappa_choice"] = {{"kappa", kc.kappa}, {"gap_sq", kc.gap_sq}, {"iterations", kc.iterations},
                             {"kappa_big_o", kc.kappa_big_o}};
    }
    p.note("stateprep", "kappa_used", kappa);
    GapTerms g = gap_terms(pr, kappa);
    j["kappa"] = kappa;
    j["gap"] = {{"formula", g.formula}, {"quadrature", g.direct}, {"z", g.z}, {"z_r", g.z_r}};
    MixingTime mt = mixing_time(pr, kappa, pr.eps);
    double t = p.num("stateprep", "t", 0.0);
    if (t <= 0) t = mt.t_eps;
    DynamicsResult dr = prep_by_dynamics(pr, kappa, t);
    j["mixing"] = {{"t_eps", mt.t_eps}, {"gap", mt.gap}, {"initial_distance", mt.initial_distance},
                   {"bound", mt.bound}};
    j["dynamics"] = {{"t", dr.t}, {"distance", dr.distance}, {"restricted_distance", dr.restricted_distance},
                     {"overlap", dr.overlap}};
    if (kappa >= 0.5) {
        ConvexityReport c = verify_convexity(pr, kappa);
        j["convexity"] = {{"min_hessian", c.min_hessian},
                          {"min_hessian_at", c.min_hessian_at},
                          {"hessian_ok", c.hessian_ok},
                          {"pairs", c.pairs},
                          {"monotone_violations", c.monotone_violations},
                          {"cross_term_bound_violations", c.stated_violations},
                          {"worst_ratio", c.worst_stated_ratio}};
    }
    const Region prod = interval(p, "stateprep", "p", 0.25, 0.75);
    PotentialCurves pc = potential_curves(pr.base, pr.region, prod, kappa, pr.box,
                                          static_cast<int>(p.integer("stateprep", "curve_points", 801)));
    CsvTable curves({"x", "V", "V_R", "V_P"});
    for (size_t i = 0; i < pc.x.size(); ++i) curves.row_values({pc.x[i], pc.v[i], pc.v_r[i], pc.v_p[i]});
    CsvTable state({"x", "u"});
    Basis b = Basis::finite_difference(pr.N, pr.box, 1, 1, Boundary::Reflecting);
    for (long i = 0; i < b.dimension(); ++i) state.row_values({b.point(i)[0], dr.state[i].real()});
    write_text(ctx, "stateprep-curves.csv", curves.str());
    write_text(ctx, "stateprep-state.csv", state.str());
    write_json(ctx, "stateprep.json", j);
    return {"stateprep-curves.csv", "stateprep-state.csv", "stateprep.json"};
}

std::vector<std::string> cmd_resources(const Context &ctx, Params &p, const Config &cfg) {
    CostModel cm;
    if (auto it = cfg.sections().find("constants"); it != cfg.sections().end())
        for (const auto &[k, e] : it->second) cm.set(k, cfg.get_double("constants", k, 1.0));
    for (const auto &[k, v] : cm.constants()) p.note("constants", k, v);
    const std::string s = "resources";
    const double eta = p.num(s, "eta", 1), d = p.num(s, "d", 1), beta = p.num(s, "beta", 1), L = p.num(s, "L", 1);
    const double N = p.num(s, "N", 1), alpha_v = p.num(s, "alpha_V", 1), eps = p.num(s, "eps", 0.5);
    const double t = p.num(s, "t", 1), m = p.num(s, "m", 1), kappa = p.num(s, "kappa", 0);
    const int n = static_cast<int>(p.integer(s, "n", 1)), k = static_cast<int>(p.integer(s, "k", 1));
    const bool qae = p.flag(s, "qae_squaring", true);

    json j;
    j["constants"] = cm.constants();
    j["alpha_A"] = alpha_A(eta, d, beta, L, N, alpha_v, cm);
    j["alpha_F"] = alpha_F(eta, d, L, alpha_v);
    j["toffoli_be_r"] = toffoli_be_r(n, int(d), eps, cm);
    j["toffoli_u_f"] = toffoli_u_f(n, int(d), eps, cm);
    j["toffoli_grad_v"] = toffoli_grad_v(n, int(d), k, int(eta), cm);
    ToffoliBreakdown tb = toffoli_a(n, int(d), k, int(eta), cm);
    j["toffoli_a"] = {{"particle", tb.particle_term}, {"potential", tb.potential_term}, {"kinetic", tb.kinetic_term},
                      {"total", tb.total}};
    QueryCounts q = query_counts(t, eps, j["alpha_A"].get<double>(), cm, qae);
    j["queries"] = {{"d_max_formula", q.d_max_formula}, {"M_q", q.M_q},
                    {"plan_max_degree", q.plan_max_degree}, {"multiplexed_total", q.multiplexed_total},
                    {"naive_total", q.naive_total}, {"naive_ratio", q.naive_ratio},
                    {"qae_factor", q.qae_factor}, {"flux_queries", q.flux_queries}};
    j["stateprep_cost"] = stateprep_cost(eta, d, m, beta, L, N, kappa, alpha_v, eps, cm);
    j["flux_gate_cost"] = flux_gate_cost(t, eps, n, int(d), k, int(eta), beta, L, alpha_v, cm);
    json reg = json::array();
    for (const auto &f : CostModel::registry())
        reg.push_back({{"name", f.name}, {"expression", f.expression}, {"constants", f.constants}});
    j["formulas"] = reg;
    write_json(ctx, "resources.json", j);

    CostInputs ci;
    ci.T = p.num(s, "T", 1.0);
    ci.eps = p.num(s, "compare_eps", 0.01);
    ci.R = p.num(s, "R", 1.0);
    ci.gamma_pair = p.num(s, "gamma_pair", 0.25);
    ci.beta = beta;
    ci.N = N;
    ci.alpha_V = alpha_v;
    CostComparison cc = cost_comparison(ci, p.list(s, "compare_etas", {1, 2, 4, 8, 16, 32, 64, 128}));
    CsvTable c({"eta", "gamma", "classical", "quantum"});
    for (const auto &pt : cc.curve) c.row_values({pt.eta, pt.gamma, pt.classical, pt.quantum});
    write_text(ctx, "resources-comparison.csv", c.str());
    return {"resources.json", "resources-comparison.csv"};
}

std::vector<std::string> cmd_verify(const Context &ctx, Params &p, bool &all_passed) {
    AcceptanceOptions o;
    o.threads = ctx.threads;
    o.seed = ctx.seed;
    for (double id : p.list("verify-all", "only", {})) o.only.insert(static_cast<int>(id));
    CsvTable t({"id", "name", "passed"});
    json j = json::array();
    all_passed = true;
    run_acceptance(o, [&](const CriterionResult &r) {
        std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name << "\n";
        for (const auto &c : r.checks) std::cout << "    " << c << "\n";
        for (const auto &i : r.info) std::cout << "    info " << i << "\n";
        std::cout.flush();
        all_passed = all_passed && r.passed;
        t.row({std::to_string(r.id), r.name, r.passed ? "1" : "0"});
        j.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"checks", r.checks}, {"info", r.info},
                     {"seconds", r.seconds}});
    });
    write_text(ctx, "verify-all.csv", t.str());
    write_json(ctx, "verify-all.json", j);
    return {"verify-all.csv", "verify-all.json"};
}

const std::map<std::string, Allowed> kAllowed = {
    {"discretize",
     {{"run", {"seed", "threads"}}, {"potential", kPotentialKeys}, {"basis", kBasisKeys},
      {"discretize", {"beta", "eigenvalues", "write_matrices"}}}},
    {"lchs-certify", {{"run", {"seed", "threads"}}, {"lchs", {"t", "eps", "alpha"}}}},
    {"flux",
     {{"run", {"seed", "threads"}}, {"potential", kPotentialKeys}, {"basis", kBasisKeys},
      {"flux", {"beta", "eps", "t", "shots", "mode", "route", "imag", "r_lo", "r_hi", "p_lo", "p_hi"}}}},
    {"flux-scan",
     {{"run", {"seed", "threads"}}, {"potential", kPotentialKeys}, {"basis", kBasisKeys},
      {"flux-scan",
       {"beta", "eps", "times", "theta", "shots", "mode", "route", "imag", "r_lo", "r_hi", "p_lo", "p_hi"}}}},
    {"langevin",
     {{"run", {"seed", "threads"}}, {"potential", kPotentialKeys},
      {"langevin", {"beta", "T", "trajectories", "eps_target", "radius", "gamma", "dt", "box", "periodic",
                    "max_steps", "r_lo", "r_hi", "p_lo", "p_hi", "halving_levels", "dt0"}}}},
    {"kappa-scan",
     {{"run", {"seed", "threads"}}, {"potential", kPotentialKeys},
      {"kappa-scan", {"sweep", "generator", "ns", "betas", "beta", "N", "L"}}}},
    {"lipschitz-scan",
     {{"run", {"seed", "threads"}},
      {"lipschitz-scan",
       {"d", "coefficients", "cos_amplitude", "cos_frequency", "etas", "r_lo", "r_hi", "box", "random_configs"}}}},
    {"stateprep",
     {{"run", {"seed", "threads"}}, {"potential", kPotentialKeys},
      {"stateprep", {"r_lo", "r_hi", "p_lo", "p_hi", "m", "beta", "eps", "box", "N", "kappa", "t", "curve_points"}}}},
    {"resources",
     {{"run", {"seed", "threads"}},
      {"resources", {"eta", "d", "beta", "L", "N", "alpha_V", "eps", "t", "m", "kappa", "n", "k", "qae_squaring", "T",
                     "compare_eps", "R", "gamma_pair", "compare_etas"}}}},
    {"verify-all", {{"run", {"seed", "threads"}}, {"verify-all", {"only"}}}},
};

int exit_code_for(const std::exception &e) {
    if (dynamic_cast<const ConfigError *>(&e)) return kConfig;
    if (dynamic_cast<const InputError *>(&e)) return kInput;
    if (dynamic_cast<const ResourceError *>(&e)) return kResource;
    if (dynamic_cast<const SingularityError *>(&e)) return kSingular;
    if (dynamic_cast<const UnsupportedError *>(&e)) return kUnsupported;
    if (dynamic_cast<const SubnormalizationError *>(&e)) return kSubnormalization;
    if (dynamic_cast<const SolverError *>(&e)) return kSolver;
    if (dynamic_cast<const CertificateError *>(&e)) return kCertificate;
    if (dynamic_cast<const SamplerError *>(&e)) return kSampler;
    if (dynamic_cast<const NumericError *>(&e)) return kNumeric;
    if (dynamic_cast<const std::filesystem::filesystem_error *>(&e)) return kIo;
    return kInternal;
}

const char *kind_name(int code) {
    switch (code) {
        case kConfig: return "config error";
        case kInput: return "input error";
        case kResource: return "resource error";
        case kSingular: return "singularity error";
        case kUnsupported: return "unsupported";
        case kSubnormalization: return "subnormalization error";
        case kSolver: return "solver error";
        case kCertificate: return "certificate error";
        case kSampler: return "sampler error";
        case kNumeric: return "numeric error";
        case kIo: return "i/o error";
        default: return "internal error";
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Fokker-Planck reactive-flux experiments: discretization, Gaussian-LCHS, overlap estimation, "
                 "classical baselines and resource counts"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir = "fpflux-out";
    std::optional<std::uint64_t> seed_flag;
    std::optional<int> threads_flag;
    app.add_option("--config", config_path, "sectioned key = value config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--seed", seed_flag, "64-bit seed; overrides [run] seed");
    app.add_option("--threads", threads_flag, "worker threads; overrides FPFLUX_THREADS and [run] threads")
        ->check(CLI::PositiveNumber);
    app.set_version_flag("--version", FPFLUX_VERSION);
    for (const auto &[name, _] : kAllowed) app.add_subcommand(name, "run the " + name + " experiment")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        Config cfg = config_path.empty() ? Config::parse("", "<defaults>") : Config::load(config_path);
        Allowed allowed = kAllowed.at(sub);
        if (sub == "resources") {
            const CostModel defaults;
            for (const auto &[name, value] : defaults.constants()) allowed["constants"].insert(name);
        }
        cfg.restrict_to(allowed);
        Params p(cfg);
        Context ctx;
        ctx.subcommand = sub;
        ctx.out_dir = out_dir;
        ctx.config_path = config_path;
        ctx.seed = seed_flag ? *seed_flag : static_cast<std::uint64_t>(p.integer("run", "seed", 1));
        if (seed_flag) p.note("run", "seed", *seed_flag);
        long threads = p.integer("run", "threads", 1);
        if (const char *env = std::getenv("FPFLUX_THREADS"); env && *env && !cfg.has("run", "threads"))
            threads = std::strtol(env, nullptr, 10);
        if (threads_flag) threads = *threads_flag;
        if (threads < 1) throw ConfigError("thread count must be positive");
        ctx.threads = static_cast<int>(threads);
        p.note("run", "threads", ctx.threads);
        std::filesystem::create_directories(out_dir);

        std::vector<std::string> artifacts;
        bool verified = true;
        if (sub == "discretize") artifacts = cmd_discretize(ctx, p);
        else if (sub == "lchs-certify") artifacts = cmd_lchs(ctx, p);
        else if (sub == "flux") artifacts = cmd_flux(ctx, p);
        else if (sub == "flux-scan") artifacts = cmd_flux_scan(ctx, p);
        else if (sub == "langevin") artifacts = cmd_langevin(ctx, p);
        else if (sub == "kappa-scan") artifacts = cmd_kappa(ctx, p);
        else if (sub == "lipschitz-scan") artifacts = cmd_lipschitz(ctx, p);
        else if (sub == "stateprep") artifacts = cmd_stateprep(ctx, p);
        else if (sub == "resources") artifacts = cmd_resources(ctx, p, cfg);
        else if (sub == "verify-all") artifacts = cmd_verify(ctx, p, verified);
        write_manifest(ctx, p, artifacts);
        for (const auto &a : artifacts) std::cerr << "wrote " << (std::filesystem::path(out_dir) / a).string() << "\n";
        return verified ? kOk : kVerifyFailed;
    } catch (const std::exception &e) {
        const int rc = exit_code_for(e);
        std::cerr << "fpflux " << sub << ": " << kind_name(rc) << ": " << e.what() << "\n";
        return rc;
    }
}
