#pragma once

#include <map>
#include <string>
#include <vector>

#include "fpflux/lchs.hpp"

namespace fpflux {

// Constants standing in for every big-O slot. All default to 1.0 and are printed with every
// report; `set` rejects names that are not registered.
class CostModel {
public:
    CostModel();

    double get(const std::string &name) const;
    void set(const std::string &name, double value);
    const std::map<std::string, double> &constants() const { return constants_; }

    struct Formula {
        std::string name;
        std::string expression;
        std::vector<std::string> constants;
    };
    static const std::vector<Formula> &registry();

private:
    std::map<std::string, double> constants_;
};

// c1 sqrt(beta d) eta^{3/2} L alpha_V + c2 sqrt(eta d / beta) N / L.
double alpha_A(double eta, double d, double beta, double L, double N, double alpha_V, const CostModel &m = {});

// alpha_F = eta^{3/2} sqrt(d) L alpha_V, the force-term share of alpha_A at beta = 1.
double alpha_F(double eta, double d, double L, double alpha_V);

int ceil_log2(long v);

// Distance block encoding: 2 d n^2 + 4 n d + 4 n + c_log (2n + 2 ceil(log2 d)) log2(1/eps)
// + c_d d + 2 ceil(log2 d). Rounded up to an integer.
long toffoli_be_r(int n, int d, double eps, const CostModel &m = {});

// Component block encoding with compression: 2 d n^2 + 4 n d + 7 n + c_log (2n + 2 ceil(log2 d))
// log2(1/eps) + c_d d + 4 ceil(log2 d) + 2.
long toffoli_u_f(int n, int d, double eps, const CostModel &m = {});

// c_grad (k d n^2 (d + 1) + eta n d).
long toffoli_grad_v(int n, int d, int k, int eta, const CostModel &m = {});

struct ToffoliBreakdown {
    long particle_term = 0;   // eta d n
    long potential_term = 0;  // 2 k d n^2
    long kinetic_term = 0;    // (n d)^2
    long total = 0;
};

// Dilated square root: c_p eta d n + c_v 2 k d n^2 + c_k (n d)^2.
ToffoliBreakdown toffoli_a(int n, int d, int k, int eta, const CostModel &m = {});

struct QueryCounts {
    double t = 0.0;
    double eps = 0.0;
    double alpha_A = 0.0;
    double d_max_formula = 0.0;     // c_D (alpha sqrt(t ln(1/eps)) + ln(1/eps))
    int M_q = 0;
    int plan_max_degree = 0;        // largest Jacobi-Anger degree of the generated plan
    long multiplexed_total = 0;     // = plan_max_degree
    long naive_total = 0;           // sum of the plan's degrees
    double naive_ratio = 0.0;       // naive / multiplexed
    double qae_factor = 2.0;        // squaring overhead of amplitude estimation
    double flux_queries = 0.0;      // c_flux qae_factor d_max_formula / eps
};

double d_max_formula(double t, double eps, double alpha_A, const CostModel &m = {});
QueryCounts query_counts(double t, double eps, double alpha_A, const CostModel &m = {}, bool qae_squaring = true);
QueryCounts query_counts(const LchsPlan &plan, const CostModel &m = {}, bool qae_squaring = true);

// sqrt(eta d / (2 m)) (beta eta L (alpha_V + kappa) + N / L) max(1, ln(1/eps)), unit constant.
double stateprep_cost(double eta, double d, double m, double beta, double L, double N, double kappa,
                      double alpha_V, double eps, const CostModel &cm = {});

// c_kappa / (Z_R^2 beta eps^4).
double kappa_big_o(double z_r, double beta, double eps, const CostModel &m = {});

// Full quantum flux cost: toffoli_a total * sqrt(eta d) (eta L alpha_V sqrt(t beta)
// + sqrt(t / beta) N / L) / eps.
double flux_gate_cost(double t, double eps, int n, int d, int k, int eta, double beta, double L, double alpha_V,
                      const CostModel &m = {});

}  // namespace fpflux
