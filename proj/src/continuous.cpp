#include "stablebelief/continuous.hpp"

#include "stablebelief/error.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>

namespace sb {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Point on the far flank where the density falls to `target`, searching away
// from the mode in direction `dir`. Doubles the bracket from 60 scales if needed.
double conjugate(const UnimodalDensity& d, double target, double dir) {
    double reach = 60.0 * d.scale;
    double far = d.mode + dir * reach;
    for (int k = 0; k < 60 && d.pdf(far) > target; ++k) {
        reach *= 2.0;
        far = d.mode + dir * reach;
    }
    if (d.pdf(far) > target) throw NumericalError("conjugate point not bracketed");
    auto g = [&](double x) { return d.pdf(x) - target; };
    double lo = std::min(d.mode, far);
    double hi = std::max(d.mode, far);
    // Bisection to an f-value tolerance; the flank is monotone.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = g(mid);
        if (std::abs(v) < 1e-10 * std::max(1.0, target) || hi - lo < 1e-13 * std::max(1.0, std::abs(mid))) {
            return mid;
        }
        // Inside the flank (between mode and root) the density exceeds target.
        const bool inside = v > 0.0;
        if ((dir > 0.0) == inside) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

UnimodalDensity unimodal(const StableParams& p) {
    p.validate();
    return {[p](double x) { return pdf(p, x); }, [p](double x) { return cdf(p, x); }, mode(p), p.gamma};
}

UnimodalDensity unimodal(const GaussianParams& g) {
    g.validate();
    const boost::math::normal_distribution<double> n(g.mu, g.sigma);
    return {[n](double x) { return boost::math::pdf(n, x); }, [n](double x) { return boost::math::cdf(n, x); },
            g.mu, g.sigma};
}

double pl_symmetric_1d(const UnimodalDensity& d, double x) {
    const double r = d.mode + std::abs(x - d.mode);
    return clamp01(2.0 * (r - d.mode) * d.pdf(r) + 2.0 * (1.0 - d.cdf(r)));
}

double pl_symmetric_1d(const StableParams& p, double x) {
    if (p.beta != 0.0 && p.alpha < 2.0) throw InvalidArgument("symmetric plausibility needs beta = 0");
    return pl_symmetric_1d(unimodal(p), x);
}

double pl_symmetric_1d(const GaussianParams& g, double x) { return pl_symmetric_1d(unimodal(g), x); }

double pl_asymmetric_1d(const UnimodalDensity& d, double y) {
    if (!std::isfinite(y)) throw InvalidArgument("plausibility point must be finite");
    if (y == d.mode) return 1.0;
    const double fy = d.pdf(y);
    if (!(fy > 0.0)) {
        // Outside the support, or so far out that the density underflows.
        return 0.0;
    }
    const double x = conjugate(d, fy, y > d.mode ? -1.0 : 1.0);
    const double lo = std::min(x, y);
    const double hi = std::max(x, y);
    return clamp01(1.0 + d.cdf(lo) - d.cdf(hi) + (hi - lo) * fy);
}

double pl_asymmetric_1d(const StableParams& p, double y) { return pl_asymmetric_1d(unimodal(p), y); }

double pl_stable_1d(const StableParams& p, double x) {
    if (p.beta == 0.0 || p.alpha >= 2.0) return pl_symmetric_1d(unimodal(p), x);
    return pl_asymmetric_1d(unimodal(p), x);
}

double pl_gaussian_mv(const MvGaussian& g, const Eigen::VectorXd& x) {
    const double m2 = g.mahalanobis2(x);
    return clamp01(boost::math::gamma_q(0.5 * (g.dim() + 2), 0.5 * m2));
}

double pl_gmm_mv(const GmmModel& model, const Eigen::VectorXd& x) {
    model.validate();
    double cum = 0.0;
    for (const auto& c : model.components) {
        cum += c.weight * boost::math::gamma_p(0.5 * (c.gaussian.dim() + 2), 0.5 * c.gaussian.mahalanobis2(x));
    }
    return clamp01(1.0 - cum);
}

double CutTable::pl_at_level(double level) const {
    if (level <= 0.0) return 0.0;
    if (level >= levels.back()) return cumulative_pl.back();
    const auto it = std::upper_bound(levels.begin(), levels.end(), level);
    const auto k = static_cast<std::size_t>(it - levels.begin());
    const double t = (level - levels[k - 1]) / (levels[k] - levels[k - 1]);
    return cumulative_pl[k - 1] + t * (cumulative_pl[k] - cumulative_pl[k - 1]);
}

CutTable build_cut_table(const TabulatedPdf2D& pdf, int n_levels) {
    if (n_levels < 64) throw InvalidArgument("cut table needs at least 64 levels");
    std::vector<double> v(pdf.values.data(), pdf.values.data() + pdf.values.size());
    std::sort(v.begin(), v.end());
    std::vector<double> distinct;
    for (double x : v) {
        if (x > 0.0 && (distinct.empty() || x > distinct.back())) distinct.push_back(x);
    }
    if (distinct.size() < 2) throw FlatDensity("density grid has fewer than two distinct positive values");

    // prefix[k] = sum of the k smallest cell values
    std::vector<double> prefix(v.size() + 1, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) prefix[i + 1] = prefix[i] + v[i];

    CutTable t;
    t.levels.push_back(0.0);
    t.volumes.push_back(pdf.cell_area * static_cast<double>(v.size()));
    t.cumulative_pl.push_back(0.0);
    const std::size_t steps = static_cast<std::size_t>(n_levels) - 1;
    for (std::size_t s = 1; s <= steps; ++s) {
        const std::size_t idx = (s * (distinct.size() - 1)) / steps;
        const double level = distinct[idx];
        if (level <= t.levels.back()) continue;
        const auto k = static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), level) - v.begin());
        const double above = static_cast<double>(v.size() - k);
        t.levels.push_back(level);
        t.volumes.push_back(pdf.cell_area * above);
        // integral of min(f, level) over the grid, exact for the cell values
        t.cumulative_pl.push_back(pdf.cell_area * (prefix[k] + above * level));
    }
    return t;
}

double pl_alphacut_2d(const CutTable& table, const TabulatedPdf2D& pdf, const Point2& x) {
    return clamp01(table.pl_at_level(pdf.at(x[0], x[1])));
}

MassFunction gbt_mass(std::span<const double> pls, const Frame& frame) {
    if (pls.size() != frame.size()) throw FrameMismatch("one plausibility per class is required");
    std::vector<double> m(frame.power_size());
    for (Subset a = 0; a < m.size(); ++a) {
        double p = 1.0;
        for (std::size_t j = 0; j < pls.size(); ++j) {
            const double q = clamp01(pls[j]);
            p *= (a >> j) & 1U ? q : 1.0 - q;
        }
        m[a] = p;
    }
    return MassFunction(frame, std::move(m));
}

}  // namespace sb
