#include "stablebelief/stable.hpp"

#include "stablebelief/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace sb {

namespace {

using std::numbers::pi;
using GaussKronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
using GaussLegendre = boost::math::quadrature::gauss<double, 20>;

// Absolute tolerance on returned pdf/cdf values.
constexpr double kValueTolerance = 1e-8;
// Width of the alpha band around 1 handled by Fourier inversion when beta != 0.
constexpr double kFourierBand = 0.1;

double gaussian_std_pdf(double z) { return std::exp(-0.25 * z * z) / (2.0 * std::sqrt(pi)); }
double gaussian_std_cdf(double z) { return 0.5 * std::erfc(-0.5 * z); }
double cauchy_std_pdf(double z) { return 1.0 / (pi * (1.0 + z * z)); }
double cauchy_std_cdf(double z) { return 0.5 + std::atan(z) / pi; }

/// tan(pi a/2) (t^a - t) for t > 0, continuous through a = 1.
double skew_term(double alpha, double t) {
    if (t <= 0.0) return 0.0;
    const double lt = std::log(t);
    if (alpha == 1.0) return -(2.0 / pi) * t * lt;
    return std::tan(0.5 * pi * alpha) * t * std::expm1((alpha - 1.0) * lt);
}

template <class F>
double integrate_checked(F&& f, double a, double b, double scale, const char* what) {
    double err = 0.0;
    const double value = GaussKronrod::integrate(f, a, b, 7, 1e-10, &err);
    if (!std::isfinite(value) || scale * err > kValueTolerance) {
        std::ostringstream os;
        os << what << ": quadrature error " << scale * err << " exceeds tolerance";
        throw NumericalError(os.str());
    }
    return value;
}

// ---------------------------------------------------------------------------
// Nolan's representation, alpha != 1. With zeta = -beta tan(pi a/2) and
// theta0 = atan(beta tan(pi a/2))/a, for x = z - zeta > 0 the substitution
// u(theta) = x^(a/(a-1)) V(theta) gives
//   f = a / (pi |a-1| x) * int_{-theta0}^{pi/2} u e^{-u} dtheta
//   F = c1 + sign(1-a)/pi * int e^{-u} dtheta
// and the negative half follows from f(z; a, b) = f(-z; a, -b).
// ---------------------------------------------------------------------------
struct NolanKernel {
    double alpha;
    double theta0;
    double log_c;  // (a/(a-1)) log x
    double log_cos_a_theta0;

    NolanKernel(double a, double b, double x) : alpha(a) {
        theta0 = std::atan(b * std::tan(0.5 * pi * a)) / a;
        log_c = a / (a - 1.0) * std::log(x);
        log_cos_a_theta0 = std::log(std::cos(a * theta0));
    }

    double log_u(double theta) const {
        const double a = alpha;
        // Clamping keeps the endpoint limits (u -> 0 or u -> inf) finite.
        constexpr double tiny = 1e-300;
        const double c = std::max(std::cos(theta), tiny);
        const double s = std::max(std::sin(a * (theta0 + theta)), tiny);
        const double c2 = std::max(std::cos(a * theta0 + (a - 1.0) * theta), tiny);
        const double log_v = log_cos_a_theta0 / (a - 1.0) +
                             a / (a - 1.0) * (std::log(c) - std::log(s)) + std::log(c2) -
                             std::log(c);
        return log_c + log_v;
    }

    double lower() const { return -theta0; }
    double upper() const { return 0.5 * pi; }

    // Interior point where u = e^level, if log u crosses the level.
    bool crossing(double level, double& where) const {
        const double span = upper() - lower();
        double lo = lower() + 1e-12 * span;
        double hi = upper() - 1e-12 * span;
        double flo = log_u(lo) - level;
        double fhi = log_u(hi) - level;
        if (!std::isfinite(flo) || !std::isfinite(fhi) || flo * fhi > 0.0) return false;
        for (int i = 0; i < 200 && hi - lo > 1e-15 * span; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double fm = log_u(mid) - level;
            if (!std::isfinite(fm)) return false;
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        where = 0.5 * (lo + hi);
        return true;
    }

    // Break points at u = e^-4, 1, e^3 so each panel holds one regime.
    std::vector<double> breaks() const {
        std::vector<double> pts{lower()};
        for (double level : {-4.0, 0.0, 3.0}) {
            double w = 0.0;
            if (crossing(level, w)) pts.push_back(w);
        }
        pts.push_back(upper());
        std::sort(pts.begin(), pts.end());
        return pts;
    }
};

double nolan_pdf_positive(double a, double b, double x) {
    const NolanKernel k(a, b, x);
    const double pref = a / (pi * std::abs(a - 1.0) * x);
    auto g = [&](double th) {
        const double lu = k.log_u(th);
        return std::exp(lu - std::exp(lu));
    };
    const auto pts = k.breaks();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] > pts[i]) total += integrate_checked(g, pts[i], pts[i + 1], pref, "stable pdf");
    }
    return pref * total;
}

double nolan_cdf_positive(double a, double b, double x) {
    const NolanKernel k(a, b, x);
    auto g = [&](double th) {
        return std::exp(-std::exp(k.log_u(th)));
    };
    const auto pts = k.breaks();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] > pts[i]) total += integrate_checked(g, pts[i], pts[i + 1], 1.0 / pi, "stable cdf");
    }
    if (a > 1.0) return 1.0 - total / pi;
    return (0.5 * pi - k.theta0) / pi + total / pi;
}

double nolan_peak_pdf(double a, double b) {
    const double zeta = -b * std::tan(0.5 * pi * a);
    const double theta0 = std::atan(b * std::tan(0.5 * pi * a)) / a;
    return std::tgamma(1.0 + 1.0 / a) * std::cos(theta0) /
           (pi * std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * a)));
}

// ---------------------------------------------------------------------------
// Fourier inversion of the standardized S0 characteristic function
//   f(z) = (1/pi) int_0^inf e^{-t^a} cos(b s(t) - z t) dt
//   F(z) = 1/2 - (1/pi) int_0^inf e^{-t^a} sin(b s(t) - z t) / t dt
// with s(t) = skew_term(a, t), on panels shorter than half a period.
// ---------------------------------------------------------------------------
template <class F>
double fourier_integral(double alpha, double beta, double z, F&& integrand) {
    // e^{-t^a} < 1e-13 beyond the upper limit.
    const double upper = std::pow(30.0, 1.0 / alpha);
    const double rate = std::abs(z) + 4.0 * std::abs(beta) * (1.0 + std::abs(std::log(upper))) + 2.0;
    const double width = std::min(1.0, pi / rate);
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    auto head = [&integrand](double t) -> double { return integrand(t); };
    // The first panel holds the t log t / t^a endpoint behaviour; later panels
    // are smooth and shorter than half an oscillation, so a fixed rule suffices.
    double total = ts.integrate(head, 0.0, width, 1e-13);
    for (double lo = width; lo < upper; lo += width) {
        const double hi = std::min(upper, lo + width);
        total += GaussLegendre::integrate(integrand, lo, hi);
    }
    return total;
}

}  // namespace

// ---------------------------------------------------------------------------

void StableParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("stable alpha must lie in (0,2]");
    if (!(beta >= -1.0 && beta <= 1.0)) throw InvalidArgument("stable beta must lie in [-1,1]");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("stable gamma must be positive");
    if (!std::isfinite(delta)) throw InvalidArgument("stable delta must be finite");
}

std::string StableParams::to_string() const {
    std::ostringstream os;
    os.precision(6);
    os << "S(" << alpha << ", " << beta << ", " << gamma << ", " << delta << ")";
    return os.str();
}

void GaussianParams::validate() const {
    if (!std::isfinite(mu)) throw InvalidArgument("gaussian mean must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("gaussian sigma must be positive");
}

double normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * pi));
}

double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

namespace detail {

double snap_alpha(double alpha) { return std::abs(alpha - 1.0) < kAlphaOneSnap ? 1.0 : alpha; }

double nolan_pdf(double a, double b, double z) {
    const double zeta = -b * std::tan(0.5 * pi * a);
    const double x = z - zeta;
    if (std::abs(x) <= 1e-9 * std::max(1.0, std::abs(zeta))) return nolan_peak_pdf(a, b);
    if (x < 0.0) return nolan_pdf_positive(a, -b, -x);
    return nolan_pdf_positive(a, b, x);
}

double nolan_cdf(double a, double b, double z) {
    const double zeta = -b * std::tan(0.5 * pi * a);
    const double x = z - zeta;
    if (std::abs(x) <= 1e-12 * std::max(1.0, std::abs(zeta))) {
        const double theta0 = std::atan(b * std::tan(0.5 * pi * a)) / a;
        return (0.5 * pi - theta0) / pi;
    }
    if (x < 0.0) return 1.0 - nolan_cdf_positive(a, -b, -x);
    return nolan_cdf_positive(a, b, x);
}

double fourier_pdf(double a, double b, double z) {
    auto g = [&](double t) {
        return std::exp(-std::pow(t, a)) * std::cos(b * skew_term(a, t) - z * t);
    };
    return fourier_integral(a, b, z, g) / pi;
}

double fourier_cdf(double a, double b, double z) {
    auto g = [&](double t) {
        if (t <= 0.0) return 0.0;
        return std::exp(-std::pow(t, a)) * std::sin(b * skew_term(a, t) - z * t) / t;
    };
    return 0.5 - fourier_integral(a, b, z, g) / pi;
}

// Beyond this |z| the Fourier panels become too many to be a usable fallback.
constexpr double kFarTail = 1e3;
// Near alpha = 1 the leading tail term is within ~1e-7 absolute past this point.
constexpr double kBandTail = 1e4;
// Past this the integral forms underflow; the leading term is far inside the value tolerance.
constexpr double kAsymptoticOnly = 1e8;

// Leading tail term: P(X > x) ~ c (1 + b) x^-a with c = Gamma(a) sin(pi a/2) / pi.
double tail_asymptotic_pdf(double a, double b, double z) {
    const double c = std::tgamma(a) * std::sin(0.5 * pi * a) / pi;
    const double side = z > 0.0 ? 1.0 + b : 1.0 - b;
    return a * c * side * std::pow(std::abs(z), -a - 1.0);
}

double tail_asymptotic_survival(double a, double b, double z) {
    const double c = std::tgamma(a) * std::sin(0.5 * pi * a) / pi;
    const double side = z > 0.0 ? 1.0 + b : 1.0 - b;
    return c * side * std::pow(std::abs(z), -a);
}

// Nolan's cdf only loses accuracy this far out, where the leading term's
// relative error O(|z|^-a) is already below the value tolerance in absolute terms.
double far_tail_cdf(double a, double b, double z) {
    const double tail = tail_asymptotic_survival(a, b, z);
    return z > 0.0 ? 1.0 - tail : tail;
}

// True once the next tail term, O(|z|^-a) relative, drops below 1e-10 absolute.
bool asymptotic_enough(double a, double b, double z) {
    if (std::abs(z) < kFarTail) return false;
    return tail_asymptotic_survival(a, b, z) * std::pow(std::abs(z), -a) < 1e-10;
}

double std_pdf(double alpha, double beta, double z) {
    const double a = snap_alpha(alpha);
    double f = 0.0;
    if (a == 2.0) {
        f = gaussian_std_pdf(z);
    } else if (std::abs(z) >= kAsymptoticOnly || asymptotic_enough(a, beta, z)) {
        f = tail_asymptotic_pdf(a, beta, z);
    } else if (a == 1.0 && beta == 0.0) {
        f = cauchy_std_pdf(z);
    } else if (beta != 0.0 && std::abs(a - 1.0) < kFourierBand) {
        f = std::abs(z) < kBandTail ? fourier_pdf(a, beta, z) : tail_asymptotic_pdf(a, beta, z);
    } else {
        try {
            f = nolan_pdf(a, beta, z);
        } catch (const NumericalError&) {
            // The transformed integrand degenerates right next to the peak.
            f = std::abs(z) < kFarTail ? fourier_pdf(a, beta, z) : tail_asymptotic_pdf(a, beta, z);
        }
    }
    return std::max(f, 0.0);
}

double std_cdf(double alpha, double beta, double z) {
    const double a = snap_alpha(alpha);
    double F = 0.0;
    if (a == 2.0) {
        F = gaussian_std_cdf(z);
    } else if (a == 1.0 && beta == 0.0) {
        F = cauchy_std_cdf(z);
    } else if (std::abs(z) >= kAsymptoticOnly || asymptotic_enough(a, beta, z)) {
        F = far_tail_cdf(a, beta, z);
    } else if (beta != 0.0 && std::abs(a - 1.0) < kFourierBand) {
        F = std::abs(z) < kBandTail ? fourier_cdf(a, beta, z) : far_tail_cdf(a, beta, z);
    } else {
        try {
            F = nolan_cdf(a, beta, z);
        } catch (const NumericalError&) {
            F = std::abs(z) < kFarTail ? fourier_cdf(a, beta, z) : far_tail_cdf(a, beta, z);
        }
    }
    return std::clamp(F, 0.0, 1.0);
}

}  // namespace detail

std::complex<double> char_fn(const StableParams& p, double t) {
    p.validate();
    const double a = detail::snap_alpha(p.alpha);
    const double gt = std::abs(p.gamma * t);
    const double sgn = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
    const double re = -std::pow(gt, a);
    const double im = (a == 2.0 ? 0.0 : p.beta * sgn * skew_term(a, gt)) + p.delta * t;
    return std::exp(std::complex<double>(re, im));
}

double pdf(const StableParams& p, double x) {
    p.validate();
    return detail::std_pdf(p.alpha, p.beta, (x - p.delta) / p.gamma) / p.gamma;
}

double cdf(const StableParams& p, double x) {
    p.validate();
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    return detail::std_cdf(p.alpha, p.beta, (x - p.delta) / p.gamma);
}

double quantile(const StableParams& p, double prob) {
    p.validate();
    if (!(prob > 0.0 && prob < 1.0)) throw InvalidArgument("quantile probability must lie in (0,1)");
    const double a = p.alpha;
    const double b = p.beta;
    auto f = [&](double z) { return detail::std_cdf(a, b, z) - prob; };
    double lo = -1.0;
    double hi = 1.0;
    for (int i = 0; i < 200 && f(lo) > 0.0; ++i) lo *= 2.0;
    for (int i = 0; i < 200 && f(hi) < 0.0; ++i) hi *= 2.0;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(44), iters);
    return p.delta + p.gamma * 0.5 * (r.first + r.second);
}

double mode(const StableParams& p) {
    p.validate();
    const double a = detail::snap_alpha(p.alpha);
    if (p.beta == 0.0 || a == 2.0) return p.delta;
    // The standardized mode is bounded; scan then refine with Brent.
    constexpr double lo = -4.0;
    constexpr double step = 0.05;
    constexpr int n = 161;
    int best = 0;
    double best_f = -1.0;
    for (int i = 0; i < n; ++i) {
        const double f = detail::std_pdf(a, p.beta, lo + step * i);
        if (f > best_f) {
            best_f = f;
            best = i;
        }
    }
    const double left = lo + step * std::max(0, best - 1);
    const double right = lo + step * std::min(n - 1, best + 1);
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::brent_find_minima(
        [&](double z) { return -detail::std_pdf(a, p.beta, z); }, left, right, 40, iters);
    return p.delta + p.gamma * r.first;
}

StableSampler::StableSampler(const StableParams& p) : p_(p) {
    p_.validate();
    p_.alpha = detail::snap_alpha(p_.alpha);
    if (p_.alpha != 1.0) {
        const double t = std::tan(0.5 * pi * p_.alpha);
        b_ = std::atan(p_.beta * t) / p_.alpha;
        s_ = std::pow(1.0 + p_.beta * p_.beta * t * t, 1.0 / (2.0 * p_.alpha));
        shift_ = p_.beta * t;
    }
}

// Chambers-Mallows-Stuck in S1 form, then moved to S0 by the -beta tan(pi a/2)
// shift. u is uniform on (0,1), w standard exponential.
double StableSampler::draw(double u, double w) const {
    const double a = p_.alpha;
    const double v = pi * (u - 0.5);
    double z = 0.0;
    if (a == 1.0) {
        const double h = 0.5 * pi + p_.beta * v;
        z = (2.0 / pi) * (h * std::tan(v) - p_.beta * std::log(0.5 * pi * w * std::cos(v) / h));
    } else {
        const double av = a * (v + b_);
        const double x1 = s_ * std::sin(av) / std::pow(std::cos(v), 1.0 / a) *
                          std::pow(std::cos(v - av) / w, (1.0 - a) / a);
        z = x1 - shift_;
    }
    return p_.gamma * z + p_.delta;
}

std::vector<double> sample(const StableParams& p, std::size_t n, std::uint64_t seed) {
    const StableSampler draw(p);
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = draw(rng);
    return out;
}

}  // namespace sb
