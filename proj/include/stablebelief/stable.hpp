#pragma once

// Univariate alpha-stable laws in the S0 (Zolotarev/Nolan "0") parameterization.
//
// A law S(alpha, beta, gamma, delta) has characteristic function
//
//   phi(t) = exp(-|gamma t|^a [1 + i b tan(pi a/2) sign(t) (|gamma t|^(1-a) - 1)] + i delta t)
//
// for a != 1, and exp(-|gamma t| [1 + i b (2/pi) sign(t) log|gamma t|] + i delta t)
// for a == 1. In this form the density is jointly continuous in all four
// parameters and X = gamma Z + delta with Z standard.

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sb {

struct StableParams {
    double alpha = 2.0;
    double beta = 0.0;
    double gamma = 1.0;
    double delta = 0.0;

    /// Throws InvalidArgument when outside 0 < alpha <= 2, |beta| <= 1,
    /// gamma > 0, finite delta.
    void validate() const;
    std::string to_string() const;

    friend bool operator==(const StableParams&, const StableParams&) = default;
};

struct GaussianParams {
    double mu = 0.0;
    double sigma = 1.0;

    void validate() const;
};

/// |alpha - 1| below this is treated as alpha = 1.
inline constexpr double kAlphaOneSnap = 1e-6;

std::complex<double> char_fn(const StableParams& p, double t);

/// Density, clamped at zero. Throws NumericalError if the inversion integral
/// misses its tolerance.
double pdf(const StableParams& p, double x);
double cdf(const StableParams& p, double x);
double quantile(const StableParams& p, double prob);

/// Location of the density maximum. Equals delta for beta = 0 or alpha = 2.
double mode(const StableParams& p);

/// Chambers-Mallows-Stuck draws, deterministic in seed.
std::vector<double> sample(const StableParams& p, std::size_t n, std::uint64_t seed);

/// Same, drawing from a caller-owned engine state (used by the generators).
class StableSampler {
public:
    explicit StableSampler(const StableParams& p);
    template <class Engine>
    double operator()(Engine& rng) const;

private:
    double draw(double u, double w) const;
    StableParams p_;
    double b_ = 0.0;
    double s_ = 1.0;
    double shift_ = 0.0;
};

enum class EstimationMethod { McCullochQuantile, KoutrouvelisRegression };

struct EstimationReport {
    StableParams params;
    int iterations = 0;
    bool converged = false;
    EstimationMethod method = EstimationMethod::McCullochQuantile;
};

/// Quantile-ratio lookup of all four parameters. Needs 20+ points; alpha is
/// clamped into [0.6, 2]. Throws DegenerateData on zero interquartile spread.
EstimationReport estimate_mcculloch(std::span<const double> data);

/// Iterative empirical-characteristic-function regression seeded by
/// estimate_mcculloch. Needs 200+ points. Hitting max_iterations is reported
/// through `converged`, not thrown.
EstimationReport estimate_koutrouvelis(std::span<const double> data, int max_iterations = 10,
                                       double tolerance = 1e-4);

/// Standard-normal helpers shared by the Gaussian paths.
double normal_pdf(double x, double mu, double sigma);
double normal_cdf(double x, double mu, double sigma);

// Standardized law (gamma = 1, delta = 0), exposed for tests and tables.
namespace detail {
double std_pdf(double alpha, double beta, double z);
double std_cdf(double alpha, double beta, double z);
/// Pdf/cdf through direct Fourier inversion of the characteristic function;
/// used near alpha = 1 and as an independent cross-check elsewhere.
double fourier_pdf(double alpha, double beta, double z);
double fourier_cdf(double alpha, double beta, double z);
/// Nolan's finite-range integral representations (alpha != 1).
double nolan_pdf(double alpha, double beta, double z);
double nolan_cdf(double alpha, double beta, double z);
double snap_alpha(double alpha);
}  // namespace detail

}  // namespace sb

#include <random>

namespace sb {

template <class Engine>
double StableSampler::operator()(Engine& rng) const {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double u = 0.0;
    do {
        u = uni(rng);
    } while (u == 0.0);
    double e = 0.0;
    do {
        e = uni(rng);
    } while (e == 0.0);
    return draw(u, -std::log(e));
}

}  // namespace sb
