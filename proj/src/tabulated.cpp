#include "stablebelief/tabulated.hpp"

#include "stablebelief/error.hpp"

#include <algorithm>
#include <cmath>

namespace sb {

namespace {
constexpr double kReach = 1e4;  // table half-width in scales
}

TabulatedStable::TabulatedStable(const StableParams& p, int nodes) : p_(p) {
    p.validate();
    if (nodes < 65 || nodes % 2 == 0) throw InvalidArgument("tabulation needs an odd node count of at least 65");
    mode_ = sb::mode(p);
    const double umax = std::asinh(kReach);
    const int half = nodes / 2;
    x_.resize(nodes);
    f_.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
        x_[i] = mode_ + p.gamma * std::sinh(umax * (i - half) / half);
        f_[i] = sb::pdf(p, x_[i]);
    }
    // Slopes from the three-point nonuniform difference; one-sided at the ends.
    df_.resize(nodes);
    for (int i = 1; i + 1 < nodes; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        df_[i] = (h0 * h0 * (f_[i + 1] - f_[i]) + h1 * h1 * (f_[i] - f_[i - 1])) / (h0 * h1 * (h0 + h1));
    }
    df_[0] = (f_[1] - f_[0]) / (x_[1] - x_[0]);
    df_[nodes - 1] = (f_[nodes - 1] - f_[nodes - 2]) / (x_[nodes - 1] - x_[nodes - 2]);

    // cdf by integrating the Hermite interpolant, anchored at the mode.
    cdf_.assign(nodes, 0.0);
    cdf_[half] = sb::cdf(p, mode_);
    auto piece = [&](int i) {
        const double h = x_[i + 1] - x_[i];
        return 0.5 * h * (f_[i] + f_[i + 1]) + h * h * (df_[i] - df_[i + 1]) / 12.0;
    };
    for (int i = half; i + 1 < nodes; ++i) cdf_[i + 1] = cdf_[i] + piece(i);
    for (int i = half; i > 0; --i) cdf_[i - 1] = cdf_[i] - piece(i - 1);
    for (double& c : cdf_) c = std::clamp(c, 0.0, 1.0);
}

std::size_t TabulatedStable::locate(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double TabulatedStable::pdf(double x) const {
    if (!(x > x_.front() && x < x_.back())) return sb::pdf(p_, x);
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double v = (2 * t3 - 3 * t2 + 1) * f_[i] + (t3 - 2 * t2 + t) * h * df_[i] + (-2 * t3 + 3 * t2) * f_[i + 1] +
                     (t3 - t2) * h * df_[i + 1];
    return std::max(v, 0.0);
}

double TabulatedStable::cdf(double x) const {
    if (!(x > x_.front() && x < x_.back())) return sb::cdf(p_, x);
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    // Integral of the Hermite pdf interpolant from x_i to x.
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    const double area = h * ((0.5 * t4 - t3 + t) * f_[i] + (0.25 * t4 - 2.0 / 3.0 * t3 + 0.5 * t2) * h * df_[i] +
                             (-0.5 * t4 + t3) * f_[i + 1] + (0.25 * t4 - t3 / 3.0) * h * df_[i + 1]);
    return std::clamp(cdf_[i] + area, 0.0, 1.0);
}

}  // namespace sb
