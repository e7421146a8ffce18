#include "stablebelief/error.hpp"
#include "stablebelief/stable.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace sb {

namespace {

using std::numbers::pi;

#include "quantile_tables.inc"

enum Column { kNuAlpha = 0, kNuBeta = 1, kSpread = 2, kMedian = 3 };

// Bilinear lookup for beta >= 0; a and b must lie inside the grid.
double table_at(Column c, double a, double b) {
    int i = 0;
    while (i + 2 < kTableAlphaCount && kTableAlpha[i + 1] < a) ++i;
    int j = 0;
    while (j + 2 < kTableBetaCount && kTableBeta[j + 1] < b) ++j;
    const double ta = std::clamp((a - kTableAlpha[i]) / (kTableAlpha[i + 1] - kTableAlpha[i]), 0.0, 1.0);
    const double tb = std::clamp((b - kTableBeta[j]) / (kTableBeta[j + 1] - kTableBeta[j]), 0.0, 1.0);
    const double v00 = kQuantileTable[i][j][c];
    const double v01 = kQuantileTable[i][j + 1][c];
    const double v10 = kQuantileTable[i + 1][j][c];
    const double v11 = kQuantileTable[i + 1][j + 1][c];
    return (1 - ta) * ((1 - tb) * v00 + tb * v01) + ta * ((1 - tb) * v10 + tb * v11);
}

// Root of a monotone g on [lo, hi]; clamps to the nearer end when no sign change.
template <class G>
double bisect(G&& g, double lo, double hi) {
    double glo = g(lo);
    const double ghi = g(hi);
    if (glo * ghi > 0.0) return std::abs(glo) < std::abs(ghi) ? lo : hi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double sample_quantile(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size()) - 0.5;
    if (pos <= 0.0) return sorted.front();
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= sorted.size()) return sorted.back();
    const double w = pos - static_cast<double>(k);
    return (1.0 - w) * sorted[k] + w * sorted[k + 1];
}

// Frequency counts for the two regressions, by alpha row and sample size.
constexpr std::array<double, 8> kRegAlpha{1.9, 1.5, 1.3, 1.1, 0.9, 0.7, 0.5, 0.3};
constexpr std::array<double, 3> kRegN{200, 800, 1600};
constexpr int kTableK[8][3] = {{9, 9, 10},   {11, 11, 11},  {22, 16, 14},   {24, 18, 15},
                               {28, 22, 18}, {30, 24, 20},  {86, 68, 56},   {134, 124, 118}};
constexpr int kTableL[8][3] = {{9, 10, 11},  {12, 14, 15},  {16, 18, 17},   {19, 19, 20},
                               {20, 21, 22}, {24, 23, 24},  {68, 59, 63},   {124, 121, 122}};

template <std::size_t M>
std::size_t nearest(const std::array<double, M>& grid, double v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < M; ++i) {
        if (std::abs(grid[i] - v) < std::abs(grid[best] - v)) best = i;
    }
    return best;
}

std::complex<double> ecf(const std::vector<double>& y, double t) {
    double c = 0.0;
    double s = 0.0;
    for (double v : y) {
        c += std::cos(t * v);
        s += std::sin(t * v);
    }
    const double n = static_cast<double>(y.size());
    return {c / n, s / n};
}

double skew_regressor(double alpha, double u) {
    if (std::abs(alpha - 1.0) < kAlphaOneSnap) return -(2.0 / pi) * u * std::log(u);
    return std::tan(0.5 * pi * alpha) * (std::pow(u, alpha) - u);
}

}  // namespace

EstimationReport estimate_mcculloch(std::span<const double> data) {
    if (data.size() < 20) throw InsufficientData("McCulloch estimator needs at least 20 samples");
    std::vector<double> x(data.begin(), data.end());
    for (double v : x) {
        if (!std::isfinite(v)) throw InvalidArgument("non-finite sample");
    }
    std::sort(x.begin(), x.end());
    const double q05 = sample_quantile(x, 0.05);
    const double q25 = sample_quantile(x, 0.25);
    const double q50 = sample_quantile(x, 0.50);
    const double q75 = sample_quantile(x, 0.75);
    const double q95 = sample_quantile(x, 0.95);
    if (!(q75 > q25) || !(q95 > q05)) throw DegenerateData("zero interquartile spread");

    const double nu_a = (q95 - q05) / (q75 - q25);
    const double nu_b_signed = (q95 + q05 - 2.0 * q50) / (q95 - q05);
    const double sgn = nu_b_signed < 0.0 ? -1.0 : 1.0;
    const double nu_b = std::abs(nu_b_signed);

    const double a_lo = kTableAlpha[0];
    const double a_hi = kTableAlpha[kTableAlphaCount - 1];
    double a = 1.5;
    double b = 0.0;
    for (int it = 0; it < 50; ++it) {
        const double a_new = bisect([&](double s) { return table_at(kNuAlpha, s, b) - nu_a; }, a_lo, a_hi);
        const double b_new = bisect([&](double s) { return table_at(kNuBeta, a_new, s) - nu_b; }, 0.0, 1.0);
        const bool done = std::abs(a_new - a) < 1e-10 && std::abs(b_new - b) < 1e-10;
        a = a_new;
        b = b_new;
        if (done) break;
    }
    if (a >= a_hi - 1e-9) b = 0.0;

    EstimationReport r;
    r.params.alpha = a;
    r.params.beta = sgn * b;
    r.params.gamma = (q75 - q25) / table_at(kSpread, a, b);
    r.params.delta = q50 - r.params.gamma * sgn * table_at(kMedian, a, b);
    r.iterations = 1;
    r.converged = true;
    r.method = EstimationMethod::McCullochQuantile;
    return r;
}

EstimationReport estimate_koutrouvelis(std::span<const double> data, int max_iterations, double tolerance) {
    if (data.size() < 200) throw InsufficientData("Koutrouvelis estimator needs at least 200 samples");
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
    const EstimationReport init = estimate_mcculloch(data);
    StableParams p = init.params;
    const double n = static_cast<double>(data.size());
    const std::size_t ncol = nearest(kRegN, n);
    // Grid sizes stay fixed from the initial estimate; re-picking them as alpha
    // moves can make the iteration cycle between two rows.
    const std::size_t row = nearest(kRegAlpha, p.alpha);

    EstimationReport r;
    r.method = EstimationMethod::KoutrouvelisRegression;
    std::vector<double> y(data.size());
    for (int iter = 1; iter <= max_iterations; ++iter) {
        const double prev_alpha = p.alpha;
        const double prev_gamma = p.gamma;

        // Scale and exponent: log(-log|phi|^2) = log 2 + alpha log(gamma') + alpha log t.
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = (data[i] - p.delta) / p.gamma;
        const int K = kTableK[row][ncol];
        double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
        for (int k = 1; k <= K; ++k) {
            const double t = pi * k / 25.0;
            const double m = std::abs(ecf(y, t));
            if (!(m > 0.0 && m < 1.0)) continue;
            const double yk = std::log(-2.0 * std::log(m));
            const double xk = std::log(t);
            // Delta-method variance of yk under the current fit.
            const double tpow = std::pow(t, p.alpha);
            const double phi = std::exp(-tpow);
            const double phi2 = std::exp(-std::pow(2.0 * t, p.alpha));
            const double var_m = std::max((1.0 + phi2 - 2.0 * phi * phi) / (2.0 * n), 1e-300);
            const double w = phi * phi * tpow * tpow / var_m;
            sw += w;
            swx += w * xk;
            swy += w * yk;
            swxx += w * xk * xk;
            swxy += w * xk * yk;
        }
        const double det = sw * swxx - swx * swx;
        if (!(sw > 0.0) || !(std::abs(det) > 0.0)) throw DegenerateData("characteristic-function regression is singular");
        double alpha = (sw * swxy - swx * swy) / det;
        const double intercept = (swy - alpha * swx) / sw;
        alpha = std::clamp(alpha, kTableAlpha[0], 2.0);
        const double gscale = std::exp((intercept - std::log(2.0)) / alpha);
        p.alpha = alpha;
        p.gamma *= gscale;

        // Skewness and location from the phase: arg phi(u) = d' u + beta s(alpha, u).
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = (data[i] - p.delta) / p.gamma;
        const int L = kTableL[row][ncol];
        double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
        for (int l = 1; l <= L; ++l) {
            const double u = pi * l / 50.0;
            const double ph = std::arg(ecf(y, u));
            const double z1 = u;
            const double z2 = skew_regressor(p.alpha, u);
            s11 += z1 * z1;
            s12 += z1 * z2;
            s22 += z2 * z2;
            r1 += z1 * ph;
            r2 += z2 * ph;
        }
        const double d2 = s11 * s22 - s12 * s12;
        double shift = 0.0;
        if (d2 > 1e-10 * s11 * s22) {
            shift = (s22 * r1 - s12 * r2) / d2;
            p.beta = std::clamp((s11 * r2 - s12 * r1) / d2, -1.0, 1.0);
        } else {
            // alpha at 2: skewness is not identifiable, fit location only.
            shift = r1 / s11;
        }
        p.delta += p.gamma * shift;
        if (p.alpha >= 2.0) p.beta = 0.0;

        r.iterations = iter;
        if (std::abs(p.alpha - prev_alpha) < tolerance && std::abs(p.gamma - prev_gamma) < tolerance) {
            r.converged = true;
            break;
        }
    }
    p.validate();
    r.params = p;
    return r;
}

}  // namespace sb
