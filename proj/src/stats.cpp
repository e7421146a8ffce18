#include "stablebelief/stats.hpp"

#include "stablebelief/error.hpp"

#include <algorithm>
#include <cmath>

namespace sb {

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;  // series converges slowly and the value is 1 to double precision
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsReport ks_test(std::span<const double> data, const std::function<double(double)>& model_cdf) {
    if (data.size() < 20) throw InsufficientData("K-S test needs at least 20 samples");
    std::vector<double> x(data.begin(), data.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = model_cdf(x[i]);
        if (!std::isfinite(f) || f < 0.0 || f > 1.0) throw NonFiniteCdf("model cdf returned a value outside [0,1]");
        const double hi = static_cast<double>(i + 1) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    const double rn = std::sqrt(n);
    KsReport r;
    r.ksstat = d;
    r.n_samples = x.size();
    r.p_value = kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d);
    r.pass_at_5pct = r.p_value >= 0.05;
    return r;
}

RunningVarianceTrace running_variance(std::span<const double> data, std::size_t stride) {
    if (data.size() < 2) throw InsufficientData("running variance needs at least two samples");
    if (stride == 0) throw InvalidArgument("stride must be positive");
    RunningVarianceTrace t;
    // Welford update keeps the trace stable for long heavy-tailed sequences.
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double delta = data[i] - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (data[i] - mean);
        const std::size_t k = i + 1;
        if (k >= 2 && (k % stride == 0 || k == data.size())) {
            t.ns.push_back(k);
            t.variances.push_back(m2 / static_cast<double>(k - 1));
        }
    }
    return t;
}

}  // namespace sb
