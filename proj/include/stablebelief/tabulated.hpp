#pragma once

#include <vector>

#include "stablebelief/stable.hpp"

namespace sb {

/// Stable law with pdf and cdf precomputed on sinh-spaced nodes around the
/// mode (dense near the peak, reaching 10^4 scales). Interpolation is cubic
/// Hermite; queries beyond the table fall back to the direct evaluators.
class TabulatedStable {
public:
    explicit TabulatedStable(const StableParams& p, int nodes = 4097);

    const StableParams& params() const { return p_; }
    double mode() const { return mode_; }
    double pdf(double x) const;
    double cdf(double x) const;

private:
    std::size_t locate(double x) const;

    StableParams p_;
    double mode_ = 0.0;
    std::vector<double> x_;
    std::vector<double> f_;
    std::vector<double> df_;
    std::vector<double> cdf_;
};

}  // namespace sb
