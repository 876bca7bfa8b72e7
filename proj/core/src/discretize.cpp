#include "fpflux/discretize.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fpflux {

namespace {

constexpr double kPi = std::numbers::pi;

long ipow(long base, int exp) {
    long r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (1L << 40) / std::max(base, 1L)) return -1;
        r *= base;
    }
    return r;
}

// Calls f(flat_neighbour, weight_sign) for the +/-1 neighbours of `flat` along coordinate q.
template <class F>
void for_each_neighbour(const Basis &b, long flat, int q, F &&f) {
    long stride = ipow(b.N, q);
    long iq = (flat / stride) % b.N;
    for (int s : {-1, +1}) {
        long jq = iq + s;
        if (jq < 0 || jq >= b.N) {
            if (b.boundary == Boundary::Reflecting) continue;
            jq = (jq + b.N) % b.N;
        }
        f(flat + (jq - iq) * stride, s);
    }
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::PlaneWave ? "plane-wave" : "finite-difference"; }
std::string to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "reflecting"; }

Scheme scheme_from_string(const std::string &s) {
    if (s == "plane-wave") return Scheme::PlaneWave;
    if (s == "finite-difference") return Scheme::FiniteDifference;
    throw InputError("unknown scheme '" + s + "'");
}

Boundary boundary_from_string(const std::string &s) {
    if (s == "periodic") return Boundary::Periodic;
    if (s == "reflecting") return Boundary::Reflecting;
    throw InputError("unknown boundary '" + s + "'");
}

Basis Basis::plane_wave(int N, double L, int d, int eta) {
    Basis b;
    b.scheme = Scheme::PlaneWave;
    b.N = N;
    b.L = L;
    b.d = d;
    b.eta = eta;
    b.validate();
    return b;
}

Basis Basis::finite_difference(int N, double L, int d, int eta, Boundary boundary) {
    Basis b;
    b.scheme = Scheme::FiniteDifference;
    b.N = N;
    b.L = L;
    b.d = d;
    b.eta = eta;
    b.boundary = boundary;
    b.validate();
    return b;
}

long Basis::dimension() const { return ipow(N, dofs()); }

void Basis::validate() const {
    if (N < 2) throw InputError("N must be at least 2");
    if (scheme == Scheme::PlaneWave && (N & (N - 1)) != 0) throw InputError("plane-wave N must be a power of two");
    if (!(L > 0)) throw InputError("box half-length L must be positive");
    if (d < 1 || eta < 1) throw InputError("d and eta must be positive");
    long dim = dimension();
    if (dim < 0 || dim > cap) {
        std::ostringstream os;
        os << "Hilbert dimension N^(eta d) = " << N << "^" << dofs() << " exceeds cap " << cap;
        throw ResourceError(os.str());
    }
}

Vec Basis::grid_1d() const {
    Vec x(N);
    double h = spacing();
    double offset = (scheme == Scheme::FiniteDifference && boundary == Boundary::Reflecting) ? 0.5 : 0.0;
    for (int i = 0; i < N; ++i) x[i] = -L + (i + offset) * h;
    return x;
}

Vec Basis::point(long flat) const {
    Vec g = grid_1d();
    Vec x(dofs());
    for (int q = 0; q < dofs(); ++q) {
        x[q] = g[flat % N];
        flat /= N;
    }
    return x;
}

Vec Basis::wavenumbers() const {
    Vec k(N);
    for (int m = -N / 2; m < N / 2; ++m) k[m + N / 2] = 2.0 * kPi * m / (2.0 * L);
    return k;
}

Vec potential_on_grid(const Potential &v, const Basis &basis) {
    long dim = basis.dimension();
    Vec out(dim);
    for (long i = 0; i < dim; ++i) out[i] = v.eval(basis.point(i));
    return out;
}

// ---------------------------------------------------------------------------------------------
// Finite differences

Mat build_fke_fd(const Potential &v, double beta, const Basis &basis) {
    if (basis.scheme != Scheme::FiniteDifference) throw UnsupportedError("build_fke_fd requires a finite-difference basis");
    if (!(beta > 0)) throw InputError("beta must be positive");
    basis.validate();
    const long dim = basis.dimension();
    Vec V = potential_on_grid(v, basis);
    const double c = 1.0 / (beta * basis.spacing() * basis.spacing());
    Mat F = Mat::Zero(dim, dim);
    for (long i = 0; i < dim; ++i) {
        for (int q = 0; q < basis.dofs(); ++q) {
            for_each_neighbour(basis, i, q, [&](long j, int) {
                double rate = c * std::exp(-0.5 * beta * (V[j] - V[i]));
                F(j, i) += rate;
                F(i, i) -= rate;
            });
        }
    }
    return F;
}

Mat build_bke_fd(const Potential &v, double beta, const Basis &basis) {
    return build_fke_fd(v, beta, basis).transpose();
}

Mat build_bke_centered(const Potential &v, double beta, const Basis &basis) {
    if (basis.scheme != Scheme::FiniteDifference) throw UnsupportedError("centred BKE requires a finite-difference basis");
    if (!(beta > 0)) throw InputError("beta must be positive");
    basis.validate();
    const long dim = basis.dimension();
    const double h = basis.spacing();
    const double diff = 1.0 / (beta * h * h);
    Mat B = Mat::Zero(dim, dim);
    for (long i = 0; i < dim; ++i) {
        Vec g = v.gradient(basis.point(i));
        for (int q = 0; q < basis.dofs(); ++q) {
            for_each_neighbour(basis, i, q, [&](long j, int s) {
                double w = diff - s * g[q] / (2.0 * h);
                B(i, j) += w;
                B(i, i) -= w;
            });
        }
    }
    return B;
}

// ---------------------------------------------------------------------------------------------
// Plane waves

CMat spectral_d1(int N, double L) {
    std::vector<cplx> c(N, 0.0);
    for (int delta = 0; delta < N; ++delta) {
        cplx s = 0.0;
        for (int m = -N / 2; m < N / 2; ++m) {
            double k = 2.0 * kPi * m / (2.0 * L);
            s += cplx(0.0, k) * std::polar(1.0, 2.0 * kPi * m * delta / N);
        }
        c[delta] = s / static_cast<double>(N);
    }
    CMat D(N, N);
    for (int j = 0; j < N; ++j)
        for (int l = 0; l < N; ++l) D(j, l) = c[((j - l) % N + N) % N];
    return D;
}

Mat spectral_d2(int N, double L) {
    std::vector<double> c(N, 0.0);
    for (int delta = 0; delta < N; ++delta) {
        double s = 0.0;
        for (int m = -N / 2; m < N / 2; ++m) {
            double k = 2.0 * kPi * m / (2.0 * L);
            s += -k * k * std::cos(2.0 * kPi * m * delta / N);
        }
        c[delta] = s / N;
    }
    Mat D(N, N);
    for (int j = 0; j < N; ++j)
        for (int l = 0; l < N; ++l) D(j, l) = c[((j - l) % N + N) % N];
    return D;
}

namespace {

// Embeds a 1D operator acting on coordinate q into the full tensor-product space.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> embed_1d(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &op, const Basis &b, int q) {
    const long dim = b.dimension();
    const long stride = ipow(b.N, q);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim, dim);
    for (long i = 0; i < dim; ++i) {
        long iq = (i / stride) % b.N;
        long base = i - iq * stride;
        for (long l = 0; l < b.N; ++l) out(i, base + l * stride) = op(iq, l);
    }
    return out;
}

}  // namespace

Mat build_hbeta(const Potential &v, double beta, const Basis &basis) {
    if (!(beta > 0)) throw InputError("beta must be positive");
    basis.validate();
    const long dim = basis.dimension();
    if (basis.scheme == Scheme::FiniteDifference) {
        Vec V = potential_on_grid(v, basis);
        const double c = 1.0 / (beta * basis.spacing() * basis.spacing());
        Mat H = Mat::Zero(dim, dim);
        for (long i = 0; i < dim; ++i) {
            for (int q = 0; q < basis.dofs(); ++q) {
                for_each_neighbour(basis, i, q, [&](long j, int) {
                    H(j, i) += c;
                    H(i, i) -= c * std::exp(-0.5 * beta * (V[j] - V[i]));
                });
            }
        }
        return H;
    }
    Mat d2 = spectral_d2(basis.N, basis.L);
    Mat H = Mat::Zero(dim, dim);
    for (int q = 0; q < basis.dofs(); ++q) H += embed_1d<double>(d2, basis, q) / beta;
    for (long i = 0; i < dim; ++i) H(i, i) += witten_u(v, beta, basis.point(i));
    return H;
}

std::vector<CMat> build_sos(const Potential &v, double beta, const Basis &basis) {
    if (basis.scheme != Scheme::PlaneWave) throw UnsupportedError("build_sos requires the plane-wave scheme");
    if (!(beta > 0)) throw InputError("beta must be positive");
    basis.validate();
    const long dim = basis.dimension();
    CMat d1 = spectral_d1(basis.N, basis.L);
    std::vector<Vec> grads(dim);
    for (long i = 0; i < dim; ++i) grads[i] = v.gradient(basis.point(i));
    const double sb = std::sqrt(beta);
    std::vector<CMat> out;
    for (int q = 0; q < basis.dofs(); ++q) {
        CMat a = embed_1d<cplx>(d1, basis, q) / sb;
        for (long i = 0; i < dim; ++i) a(i, i) += 0.5 * sb * grads[i][q];  // -(sqrt(beta)/2) F_j, F_j = -dV
        out.push_back(cplx(0.0, -1.0) * a);
    }
    return out;
}

CMat build_dilated_sqrt(const std::vector<CMat> &a_list) {
    if (a_list.empty()) throw InputError("empty A list");
    const Eigen::Index n = a_list[0].rows();
    for (const auto &a : a_list) {
        if (a.rows() != n || a.cols() != n) throw InputError("ragged A_j dimensions");
    }
    const Eigen::Index m = static_cast<Eigen::Index>(a_list.size());
    CMat S = CMat::Zero((m + 1) * n, (m + 1) * n);
    for (Eigen::Index j = 0; j < m; ++j) {
        S.block((j + 1) * n, 0, n, n) = a_list[j];
        S.block(0, (j + 1) * n, n, n) = a_list[j].adjoint();
    }
    return S;
}

CMat h_disc(const std::vector<CMat> &a_list) {
    if (a_list.empty()) throw InputError("empty A list");
    CMat h = CMat::Zero(a_list[0].rows(), a_list[0].cols());
    for (const auto &a : a_list) h -= a.adjoint() * a;
    return h;
}

OperatorSet build_operator_set(const Potential &v, double beta, const Basis &basis) {
    OperatorSet ops;
    ops.basis = basis;
    ops.beta = beta;
    ops.Hbeta = build_hbeta(v, beta, basis);
    if (basis.scheme == Scheme::FiniteDifference) {
        ops.F = build_fke_fd(v, beta, basis);
    } else {
        ops.A = build_sos(v, beta, basis);
        ops.script_A = build_dilated_sqrt(ops.A);
    }
    return ops;
}

CMat smooth_probe_subspace(const Basis &basis, int per_dof, double sigma) {
    if (per_dof < 1 || !(sigma > 0)) throw InputError("probe subspace needs per_dof >= 1 and sigma > 0");
    const long dim = basis.dimension();
    const int m = basis.dofs();
    const long count = ipow(per_dof, m);
    Vec g = basis.grid_1d();
    // Hermite functions h_a(x) on the 1D grid.
    Mat h1(basis.N, per_dof);
    for (int i = 0; i < basis.N; ++i) {
        double y = g[i] / sigma;
        double hm1 = 0.0, h0 = 1.0;
        for (int a = 0; a < per_dof; ++a) {
            h1(i, a) = h0 * std::exp(-0.5 * y * y);
            double hp1 = 2.0 * y * h0 - 2.0 * a * hm1;
            hm1 = h0;
            h0 = hp1;
        }
    }
    CMat cols(dim, count);
    for (long c = 0; c < count; ++c) {
        for (long i = 0; i < dim; ++i) {
            double val = 1.0;
            long ci = c, ii = i;
            for (int q = 0; q < m; ++q) {
                val *= h1(ii % basis.N, ci % per_dof);
                ii /= basis.N;
                ci /= per_dof;
            }
            cols(i, c) = val;
        }
    }
    Eigen::HouseholderQR<CMat> qr(cols);
    return qr.householderQ() * CMat::Identity(dim, count);
}

}  // namespace fpflux
