#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fpflux {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<double> residuals;
};

// Ordinary least squares y = intercept + slope x. Needs two distinct abscissae.
LinearFit least_squares(const std::vector<double> &x, const std::vector<double> &y);

enum class FitModel { PowerLaw, Exponential, Linear };
std::string to_string(FitModel m);

// PowerLaw: y = C x^p (log-log); Exponential: y = C e^{r x} (semi-log); Linear: y = C + s x.
// `exponent` holds p, r or s; `prefactor` holds C. The confidence interval is the 2.5/97.5
// percentile range over case-resampling bootstrap replicates.
struct ScalingFit {
    FitModel model = FitModel::PowerLaw;
    std::vector<double> x;
    std::vector<double> y;
    double exponent = 0.0;
    double prefactor = 0.0;
    double r2 = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::vector<double> residuals;  // in the transformed coordinates
    std::vector<std::string> notes;
};

ScalingFit fit_scaling(const std::vector<double> &x, const std::vector<double> &y, FitModel model,
                       int bootstrap = 2000, std::uint64_t seed = 7);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace fpflux
