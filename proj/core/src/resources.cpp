#include "fpflux/resources.hpp"

#include <algorithm>
#include <cmath>

#include "fpflux/types.hpp"

namespace fpflux {

namespace {

void require_positive(std::initializer_list<double> xs, const char *what) {
    for (double x : xs)
        if (!(x > 0)) throw InputError(std::string(what) + ": inputs must be positive");
}

long round_up(double v) { return static_cast<long>(std::ceil(v - 1e-9)); }

}  // namespace

const std::vector<CostModel::Formula> &CostModel::registry() {
    static const std::vector<Formula> r = {
        {"alpha_A", "c_alpha_force sqrt(beta d) eta^{3/2} L alpha_V + c_alpha_kinetic sqrt(eta d / beta) N / L",
         {"c_alpha_force", "c_alpha_kinetic"}},
        {"toffoli_be_r", "2 d n^2 + 4 n d + 4 n + c_log (2n + 2 ceil(log2 d)) log2(1/eps) + c_d d + 2 ceil(log2 d)",
         {"c_log", "c_d"}},
        {"toffoli_u_f",
         "2 d n^2 + 4 n d + 7 n + c_log (2n + 2 ceil(log2 d)) log2(1/eps) + c_d d + 4 ceil(log2 d) + 2",
         {"c_log", "c_d"}},
        {"toffoli_grad_v", "c_grad (k d n^2 (d + 1) + eta n d)", {"c_grad"}},
        {"toffoli_a", "c_particle eta d n + c_potential 2 k d n^2 + c_kinetic (n d)^2",
         {"c_particle", "c_potential", "c_kinetic"}},
        {"d_max", "c_D (alpha_A sqrt(t ln(1/eps)) + ln(1/eps))", {"c_D"}},
        {"flux_queries", "c_flux qae d_max / eps", {"c_flux"}},
        {"stateprep_cost", "c_prep sqrt(eta d / 2m) (beta eta L (alpha_V + kappa) + N / L) max(1, ln(1/eps))",
         {"c_prep"}},
        {"kappa_big_o", "c_kappa / (Z_R^2 beta eps^4)", {"c_kappa"}},
    };
    return r;
}

CostModel::CostModel() {
    for (const auto &f : registry())
        for (const auto &c : f.constants) constants_[c] = 1.0;
}

double CostModel::get(const std::string &name) const {
    auto it = constants_.find(name);
    if (it == constants_.end()) throw InputError("unknown cost constant '" + name + "'");
    return it->second;
}

void CostModel::set(const std::string &name, double value) {
    auto it = constants_.find(name);
    if (it == constants_.end()) throw InputError("unknown cost constant '" + name + "'");
    if (!(value >= 0) || !std::isfinite(value)) throw InputError("cost constant '" + name + "' must be finite and >= 0");
    it->second = value;
}

double alpha_A(double eta, double d, double beta, double L, double N, double alpha_V, const CostModel &m) {
    require_positive({eta, d, beta, L, N, alpha_V}, "alpha_A");
    return m.get("c_alpha_force") * std::sqrt(beta * d) * std::pow(eta, 1.5) * L * alpha_V +
           m.get("c_alpha_kinetic") * std::sqrt(eta * d / beta) * N / L;
}

double alpha_F(double eta, double d, double L, double alpha_V) {
    require_positive({eta, d, L, alpha_V}, "alpha_F");
    return std::pow(eta, 1.5) * std::sqrt(d) * L * alpha_V;
}

int ceil_log2(long v) {
    if (v < 1) throw InputError("ceil_log2 needs a positive argument");
    int r = 0;
    while ((1L << r) < v) ++r;
    return r;
}

long toffoli_be_r(int n, int d, double eps, const CostModel &m) {
    if (n < 1 || d < 1) throw InputError("toffoli_be_r needs n >= 1 and d >= 1");
    if (!(eps > 0 && eps < 1)) throw InputError("eps must lie in (0, 1)");
    const int ld = ceil_log2(d);
    const double v = 2.0 * d * n * n + 4.0 * n * d + 4.0 * n +
                     m.get("c_log") * (2.0 * n + 2.0 * ld) * std::log2(1.0 / eps) + m.get("c_d") * d + 2.0 * ld;
    return round_up(v);
}

long toffoli_u_f(int n, int d, double eps, const CostModel &m) {
    if (n < 1 || d < 1) throw InputError("toffoli_u_f needs n >= 1 and d >= 1");
    if (!(eps > 0 && eps < 1)) throw InputError("eps must lie in (0, 1)");
    const int ld = ceil_log2(d);
    const double v = 2.0 * d * n * n + 4.0 * n * d + 7.0 * n +
                     m.get("c_log") * (2.0 * n + 2.0 * ld) * std::log2(1.0 / eps) + m.get("c_d") * d + 4.0 * ld + 2.0;
    return round_up(v);
}

long toffoli_grad_v(int n, int d, int k, int eta, const CostModel &m) {
    if (n < 1 || d < 1 || k < 1 || eta < 1) throw InputError("toffoli_grad_v needs positive integers");
    const double v = static_cast<double>(k) * d * n * n * (d + 1.0) + static_cast<double>(eta) * n * d;
    return round_up(m.get("c_grad") * v);
}

ToffoliBreakdown toffoli_a(int n, int d, int k, int eta, const CostModel &m) {
    if (n < 1 || d < 1 || k < 1 || eta < 1) throw InputError("toffoli_a needs positive integers");
    ToffoliBreakdown b;
    b.particle_term = round_up(m.get("c_particle") * eta * d * n);
    b.potential_term = round_up(m.get("c_potential") * 2.0 * k * d * n * n);
    b.kinetic_term = round_up(m.get("c_kinetic") * static_cast<double>(n * d) * (n * d));
    b.total = b.particle_term + b.potential_term + b.kinetic_term;
    return b;
}

double d_max_formula(double t, double eps, double alpha, const CostModel &m) {
    require_positive({t, alpha}, "d_max");
    if (!(eps > 0 && eps < 1)) throw InputError("eps must lie in (0, 1)");
    const double le = std::log(1.0 / eps);
    return m.get("c_D") * (alpha * std::sqrt(t * le) + le);
}

QueryCounts query_counts(const LchsPlan &plan, const CostModel &m, bool qae_squaring) {
    QueryCounts q;
    q.t = plan.t;
    q.eps = plan.eps;
    q.alpha_A = plan.alpha_A;
    q.d_max_formula = d_max_formula(plan.t, plan.eps, plan.alpha_A, m);
    q.M_q = plan.M_q;
    q.plan_max_degree = plan.max_degree();
    q.multiplexed_total = q.plan_max_degree;
    q.naive_total = plan.total_degree();
    q.naive_ratio = q.multiplexed_total > 0 ? static_cast<double>(q.naive_total) / q.multiplexed_total : 1.0;
    q.qae_factor = qae_squaring ? 2.0 : 1.0;
    q.flux_queries = m.get("c_flux") * q.qae_factor * q.d_max_formula / plan.eps;
    return q;
}

QueryCounts query_counts(double t, double eps, double alpha, const CostModel &m, bool qae_squaring) {
    return query_counts(build_plan(t, eps, alpha), m, qae_squaring);
}

double stateprep_cost(double eta, double d, double m, double beta, double L, double N, double kappa,
                      double alpha_V, double eps, const CostModel &cm) {
    require_positive({eta, d, m, beta, L, N, eps}, "stateprep_cost");
    if (!(kappa >= 0) || !(alpha_V >= 0)) throw InputError("stateprep_cost: kappa and alpha_V must be >= 0");
    return cm.get("c_prep") * std::sqrt(eta * d / (2.0 * m)) * (beta * eta * L * (alpha_V + kappa) + N / L) *
           std::max(1.0, std::log(1.0 / eps));
}

double kappa_big_o(double z_r, double beta, double eps, const CostModel &m) {
    require_positive({z_r, beta, eps}, "kappa_big_o");
    return m.get("c_kappa") / (z_r * z_r * beta * std::pow(eps, 4));
}

double flux_gate_cost(double t, double eps, int n, int d, int k, int eta, double beta, double L, double alpha_V,
                      const CostModel &m) {
    require_positive({t, eps, beta, L, alpha_V}, "flux_gate_cost");
    const double gates = static_cast<double>(toffoli_a(n, d, k, eta, m).total);
    const double N = std::ldexp(1.0, n);
    return gates * std::sqrt(static_cast<double>(eta) * d) *
           (eta * L * alpha_V * std::sqrt(t * beta) + std::sqrt(t / beta) * N / L) / eps;
}

}  // namespace fpflux
