#include "fpflux/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fpflux/types.hpp"

namespace fpflux {

LinearFit least_squares(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size()) throw InputError("fit abscissa and ordinate differ in length");
    const size_t n = x.size();
    if (n < 2) throw InputError("fit needs at least two points");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0)) throw InputError("fit abscissae are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    f.residuals.resize(n);
    for (size_t i = 0; i < n; ++i) {
        f.residuals[i] = y[i] - f.intercept - f.slope * x[i];
        ss_res += f.residuals[i] * f.residuals[i];
    }
    f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

std::string to_string(FitModel m) {
    switch (m) {
        case FitModel::PowerLaw: return "power-law";
        case FitModel::Exponential: return "exponential";
        case FitModel::Linear: return "linear";
    }
    return "unknown";
}

ScalingFit fit_scaling(const std::vector<double> &x, const std::vector<double> &y, FitModel model,
                       int bootstrap, std::uint64_t seed) {
    if (x.size() != y.size()) throw InputError("fit abscissa and ordinate differ in length");
    std::vector<double> tx(x.size()), ty(y.size());
    for (size_t i = 0; i < x.size(); ++i) {
        tx[i] = x[i];
        ty[i] = y[i];
        if (model == FitModel::PowerLaw) {
            if (!(x[i] > 0)) throw InputError("power-law fit needs positive abscissae");
            tx[i] = std::log(x[i]);
        }
        if (model != FitModel::Linear) {
            if (!(y[i] > 0)) throw InputError(to_string(model) + " fit needs positive ordinates");
            ty[i] = std::log(y[i]);
        }
    }
    LinearFit lf = least_squares(tx, ty);
    ScalingFit out;
    out.model = model;
    out.x = x;
    out.y = y;
    out.exponent = lf.slope;
    out.prefactor = model == FitModel::Linear ? lf.intercept : std::exp(lf.intercept);
    out.r2 = lf.r2;
    out.residuals = lf.residuals;

    out.ci_lo = out.ci_hi = out.exponent;
    if (bootstrap > 0 && x.size() >= 3) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<size_t> pick(0, x.size() - 1);
        std::vector<double> slopes;
        slopes.reserve(bootstrap);
        std::vector<double> bx(x.size()), by(x.size());
        for (int b = 0; b < bootstrap; ++b) {
            for (size_t i = 0; i < x.size(); ++i) {
                size_t k = pick(rng);
                bx[i] = tx[k];
                by[i] = ty[k];
            }
            if (std::all_of(bx.begin(), bx.end(), [&](double v) { return v == bx[0]; })) continue;
            slopes.push_back(least_squares(bx, by).slope);
        }
        if (!slopes.empty()) {
            std::sort(slopes.begin(), slopes.end());
            auto q = [&](double p) { return slopes[static_cast<size_t>(p * (slopes.size() - 1))]; };
            out.ci_lo = q(0.025);
            out.ci_hi = q(0.975);
        }
    } else if (x.size() < 3) {
        out.notes.push_back("bootstrap skipped: fewer than three points");
    }
    return out;
}

namespace {

std::vector<double> ranks(const std::vector<double> &v) {
    std::vector<size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (size_t i = 0; i < idx.size();) {
        size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * (i + j) + 1.0;
        for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("spearman needs two equal-length series");
    auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double m = (n + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - m) * (ry[i] - m);
        sxx += (rx[i] - m) * (rx[i] - m);
        syy += (ry[i] - m) * (ry[i] - m);
    }
    if (!(sxx > 0) || !(syy > 0)) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace fpflux
