#include "fpflux/lchs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <type_traits>

#include "fpflux/special.hpp"

namespace fpflux {

namespace {

void check_args(double t, double eps) {
    if (!(t > 0)) throw InputError("LCHS time t must be positive");
    if (!(eps > 0 && eps < 1)) throw InputError("LCHS epsilon must lie in (0, 1)");
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

int LchsPlan::max_degree() const {
    return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
}

long LchsPlan::total_degree() const {
    long s = 0;
    for (int d : degrees) s += d;
    return s;
}

double gaussian_kernel(double k, double t) {
    return std::exp(-k * k / (4.0 * t)) / (2.0 * std::sqrt(std::numbers::pi * t));
}

double truncation_wavenumber(double t, double eps) {
    check_args(t, eps);
    const double a = 2.0 * std::sqrt(t) * 1.0000001;
    const double b = 2.0 * std::sqrt(t * std::log(4.0 / (std::sqrt(std::numbers::pi) * eps)));
    return std::max(a, b);
}

double node_count_bound(double t, double eps, double alpha_A) {
    check_args(t, eps);
    if (!(alpha_A > 0)) throw InputError("alpha_A must be positive");
    const double K = truncation_wavenumber(t, eps);
    return (K * alpha_A / 2.0 + std::log(10.0 / (eps * std::sqrt(t)))) /
           (2.0 * std::log(1.0 + std::numbers::sqrt2));
}

LchsPlan plan_with_nodes(double t, double eps, double alpha_A, int m) {
    check_args(t, eps);
    if (!(alpha_A > 0)) throw InputError("alpha_A must be positive");
    if (m < 1) throw InputError("node count must be at least 1");
    LchsPlan p;
    p.t = t;
    p.eps = eps;
    p.eps_quad = 0.5 * eps;
    p.eps_poly = 0.5 * eps;
    p.alpha_A = alpha_A;
    p.K = truncation_wavenumber(t, eps);
    p.M_q = m;
    QuadratureRule rule = gauss_legendre(m, -p.K, p.K);
    p.nodes = rule.nodes;
    p.weights = rule.weights;
    p.coeffs.resize(m);
    p.eps_j.resize(m);
    p.degrees.resize(m);
    p.alpha_g = 0.0;
    for (int j = 0; j < m; ++j) {
        const double f = gaussian_kernel(p.nodes[j], t);
        p.coeffs[j] = p.weights[j] * f;
        p.alpha_g += std::abs(p.coeffs[j]);
        double budget = p.eps_poly / ((m + 1.0) * p.weights[j] * f);
        if (!std::isfinite(budget)) budget = 0.1;
        p.eps_j[j] = std::min(0.1, budget);
        p.degrees[j] = jacobi_anger_degree(p.nodes[j] * alpha_A, p.eps_j[j]);
    }
    return p;
}

double scalar_certificate(const LchsPlan &plan, int grid_points) {
    if (grid_points < 2) throw InputError("certificate grid needs at least 2 points");
    double worst = 0.0;
    for (int g = 0; g < grid_points; ++g) {
        const double x = -plan.alpha_A + 2.0 * plan.alpha_A * g / (grid_points - 1);
        double re = 0.0, im = 0.0;
        for (int j = 0; j < plan.M_q; ++j) {
            re += plan.coeffs[j] * std::cos(plan.nodes[j] * x);
            im -= plan.coeffs[j] * std::sin(plan.nodes[j] * x);
        }
        const double err = std::hypot(std::exp(-x * x * plan.t) - re, im);
        worst = std::max(worst, err);
    }
    return worst;
}

LchsPlan build_plan(double t, double eps, double alpha_A) {
    int m = std::max(2, static_cast<int>(std::ceil(node_count_bound(t, eps, alpha_A))));
    for (int attempt = 0; attempt <= 4; ++attempt) {
        LchsPlan p = plan_with_nodes(t, eps, alpha_A, m);
        p.certificate = scalar_certificate(p);
        p.refinements = attempt;
        if (p.certificate <= p.eps_quad) return p;
        m *= 2;
    }
    throw CertificateError("LCHS scalar certificate failed after 4 refinements (t=" + fmt17(t) +
                           ", eps=" + fmt17(eps) + ", alpha_A=" + fmt17(alpha_A) + ")");
}

namespace {

Eigen::SelfAdjointEigenSolver<CMat> checked_eig(const LchsPlan &plan, const CMat &a) {
    if (a.rows() != a.cols()) throw InputError("script_A must be square");
    if ((a - a.adjoint()).norm() > 1e-10 * std::max(1.0, a.norm()))
        throw InputError("script_A must be Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    const double nrm = es.eigenvalues().cwiseAbs().maxCoeff();
    if (nrm > plan.alpha_A * (1.0 + 1e-12))
        throw InputError("||script_A|| = " + fmt17(nrm) + " exceeds the plan's alpha_A = " +
                         fmt17(plan.alpha_A));
    return es;
}

}  // namespace

CMat apply_plan_exact(const LchsPlan &plan, const CMat &script_A) {
    auto es = checked_eig(plan, script_A);
    const Vec &lam = es.eigenvalues();
    CVec g(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        cplx s = 0.0;
        for (int j = 0; j < plan.M_q; ++j) s += plan.coeffs[j] * std::exp(cplx(0, -plan.nodes[j] * lam(i)));
        g(i) = s;
    }
    const CMat &v = es.eigenvectors();
    return v * g.asDiagonal() * v.adjoint();
}

CMat apply_nodes_to_vector(const LchsPlan &plan, const CMat &script_A, const CVec &vec) {
    if (vec.size() != script_A.rows()) throw InputError("vector dimension does not match script_A");
    auto es = checked_eig(plan, script_A);
    const Vec &lam = es.eigenvalues();
    const CMat &v = es.eigenvectors();
    CVec coef = v.adjoint() * vec;
    CMat out(vec.size(), plan.M_q);
    for (int j = 0; j < plan.M_q; ++j) {
        CVec phased(lam.size());
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            phased(i) = std::exp(cplx(0, -plan.nodes[j] * lam(i))) * coef(i);
        out.col(j) = v * phased;
    }
    return out;
}

std::string serialize_plan(const LchsPlan &p) {
    std::ostringstream os;
    os << "fpflux-lchs-plan 1\n";
    os << "t " << fmt17(p.t) << "\n";
    os << "eps " << fmt17(p.eps) << "\n";
    os << "eps_quad " << fmt17(p.eps_quad) << "\n";
    os << "eps_poly " << fmt17(p.eps_poly) << "\n";
    os << "alpha_A " << fmt17(p.alpha_A) << "\n";
    os << "K " << fmt17(p.K) << "\n";
    os << "M_q " << p.M_q << "\n";
    os << "alpha_g " << fmt17(p.alpha_g) << "\n";
    os << "certificate " << fmt17(p.certificate) << "\n";
    os << "refinements " << p.refinements << "\n";
    auto row = [&](const char *name, const auto &v) {
        os << name;
        for (const auto &x : v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, int>) os << ' ' << x;
            else os << ' ' << fmt17(x);
        }
        os << "\n";
    };
    row("nodes", p.nodes);
    row("weights", p.weights);
    row("coeffs", p.coeffs);
    row("eps_j", p.eps_j);
    row("degrees", p.degrees);
    return os.str();
}

LchsPlan parse_plan(const std::string &text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "fpflux-lchs-plan 1")
        throw InputError("not an LCHS plan record");
    LchsPlan p;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        auto reals = [&] {
            std::vector<double> v;
            double x;
            while (ls >> x) v.push_back(x);
            return v;
        };
        if (key == "t") ls >> p.t;
        else if (key == "eps") ls >> p.eps;
        else if (key == "eps_quad") ls >> p.eps_quad;
        else if (key == "eps_poly") ls >> p.eps_poly;
        else if (key == "alpha_A") ls >> p.alpha_A;
        else if (key == "K") ls >> p.K;
        else if (key == "M_q") ls >> p.M_q;
        else if (key == "alpha_g") ls >> p.alpha_g;
        else if (key == "certificate") ls >> p.certificate;
        else if (key == "refinements") ls >> p.refinements;
        else if (key == "nodes") p.nodes = reals();
        else if (key == "weights") p.weights = reals();
        else if (key == "coeffs") p.coeffs = reals();
        else if (key == "eps_j") p.eps_j = reals();
        else if (key == "degrees") {
            int d;
            while (ls >> d) p.degrees.push_back(d);
        } else {
            throw InputError("unknown key '" + key + "' on line " + std::to_string(lineno));
        }
        if (ls.fail() && !ls.eof())
            throw InputError("malformed value for '" + key + "' on line " + std::to_string(lineno));
    }
    const size_t m = static_cast<size_t>(p.M_q);
    if (p.nodes.size() != m || p.weights.size() != m || p.coeffs.size() != m ||
        p.eps_j.size() != m || p.degrees.size() != m)
        throw InputError("plan record arrays do not match M_q");
    return p;
}

}  // namespace fpflux
