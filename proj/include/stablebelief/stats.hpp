#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sb {

struct KsReport {
    double ksstat = 0.0;
    double p_value = 1.0;
    std::size_t n_samples = 0;
    bool pass_at_5pct = true;
};

/// One-sample Kolmogorov-Smirnov test against a model cdf. The p-value uses
/// the asymptotic Kolmogorov law with Stephens' finite-n correction. Needs at
/// least 20 points; throws NonFiniteCdf when the model leaves [0,1].
KsReport ks_test(std::span<const double> data, const std::function<double(double)>& model_cdf);

/// Asymptotic Kolmogorov survival function P(K > lambda).
double kolmogorov_survival(double lambda);

struct RunningVarianceTrace {
    std::vector<std::size_t> ns;
    std::vector<double> variances;
};

/// Unbiased sample variance of the first k values for k = stride, 2 stride, ...
/// (and the full length). Needs at least two values.
RunningVarianceTrace running_variance(std::span<const double> data, std::size_t stride);

}  // namespace sb
