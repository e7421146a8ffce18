#pragma once

// Bivariate stable laws with a discrete spectral measure: point masses
// gamma_i on unit directions s_i = (cos theta_i, sin theta_i). The
// characteristic function is
//
//   phi(t) = exp(-sum_i gamma_i |<t,s_i>|^a (1 - j sign<t,s_i> tan(pi a/2)) + j<delta,t>)
//
// and (1 + j (2/pi) sign<t,s_i> log|<t,s_i>|) replaces the bracket at a = 1.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stablebelief/stable.hpp"

namespace sb {

using Point2 = std::array<double, 2>;

struct SpectralStable2D {
    double alpha = 2.0;
    std::vector<double> weights;
    std::vector<double> angles;
    Point2 delta{0.0, 0.0};

    /// Angles 2 pi (i-1) / K.
    static std::vector<double> default_angles(std::size_t k);
    /// Throws InvalidArgument on bad alpha, size mismatch, negative or all-zero weights.
    void validate() const;
};

struct Window {
    double xmin = -4.0;
    double xmax = 4.0;
    double ymin = -4.0;
    double ymax = 4.0;
};

/// Density on cell centres of a uniform grid. values(i, j) is the density at
/// (xs[i], ys[j]).
struct TabulatedPdf2D {
    std::vector<double> xs;
    std::vector<double> ys;
    Eigen::MatrixXd values;
    double cell_area = 0.0;
    /// Most negative pre-clamp value relative to the peak (0 when none).
    double ripple = 0.0;

    double mass() const { return cell_area * values.sum(); }
    /// Bilinear interpolation between cell centres; 0 outside the window.
    double at(double x, double y) const;
    Window window() const;
};

std::complex<double> char_fn_2d(const SpectralStable2D& m, const Point2& t);

/// Inverts the characteristic function on a window. The frequency lattice is
/// sized from the decay of |phi| and its spacing from an 8x wider period, so
/// wrap-around from mass outside the window stays negligible. Throws
/// GridMismatch when resolution is not a power of two >= 128 or the grid
/// cannot resolve the required frequencies.
TabulatedPdf2D pdf_grid(const SpectralStable2D& m, const Window& w = {}, int resolution = 512);

std::vector<Point2> sample_2d(const SpectralStable2D& m, std::size_t n, std::uint64_t seed);

/// Law of <X, u> for a unit vector u, as S0 parameters.
StableParams projection(const SpectralStable2D& m, const Point2& u);

/// ECF-ring estimator with K directions on the default angle grid. Throws
/// InsufficientData under 500 points and SpectralFitError when the
/// nonnegative least-squares fit fails.
SpectralStable2D estimate_spectral(std::span<const Point2> data, int k);

/// Nonnegative least squares (Lawson-Hanson active set).
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 500);

nlohmann::json to_json(const SpectralStable2D& m);
SpectralStable2D spectral_from_json(const nlohmann::json& j);
/// CSV rows "x,y,density".
void write_csv(const TabulatedPdf2D& g, std::ostream& out);

}  // namespace sb
