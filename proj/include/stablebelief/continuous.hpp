#pragma once

// Consonant plausibility functions induced by unimodal densities, and the
// generalized Bayes theorem turning per-class plausibilities into masses.
//
// Every construction here satisfies pl(x) = integral of min(f(t), f(x)) dt.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

#include "stablebelief/belief.hpp"
#include "stablebelief/bivariate.hpp"
#include "stablebelief/gmm.hpp"
#include "stablebelief/stable.hpp"

namespace sb {

/// A unimodal 1D density with its cdf, mode and a scale used to bracket
/// conjugate points. Lets the pipeline substitute tabulated laws.
struct UnimodalDensity {
    std::function<double(double)> pdf;
    std::function<double(double)> cdf;
    double mode = 0.0;
    double scale = 1.0;
};

UnimodalDensity unimodal(const StableParams& p);
UnimodalDensity unimodal(const GaussianParams& g);

/// Symmetric closed form 2(x - mu) f(x) + 2(1 - F(x)) for x >= mu, reflected below.
double pl_symmetric_1d(const UnimodalDensity& d, double x);
double pl_symmetric_1d(const StableParams& p, double x);
double pl_symmetric_1d(const GaussianParams& g, double x);

/// Conjugate-point form 1 + F(lo) - F(hi) + (hi - lo) f(y), where lo/hi are y
/// and the point on the other flank with the same density.
double pl_asymmetric_1d(const UnimodalDensity& d, double y);
double pl_asymmetric_1d(const StableParams& p, double y);

/// Picks the symmetric form when beta = 0 or alpha = 2.
double pl_stable_1d(const StableParams& p, double x);

/// 1 - F_{d+2}(Mahalanobis^2).
double pl_gaussian_mv(const MvGaussian& g, const Eigen::VectorXd& x);
double pl_gmm_mv(const GmmModel& model, const Eigen::VectorXd& x);

/// Tabulated level -> integral of min(f, level) for a gridded 2D density.
struct CutTable {
    std::vector<double> levels;         // increasing, starts at 0
    std::vector<double> volumes;        // area of {f >= level}
    std::vector<double> cumulative_pl;  // integral_0^level volume(a) da

    double pl_at_level(double level) const;
};

/// Throws FlatDensity when the grid has fewer than two distinct positive
/// values and InvalidArgument when n_levels < 64.
CutTable build_cut_table(const TabulatedPdf2D& pdf, int n_levels = 256);
double pl_alphacut_2d(const CutTable& table, const TabulatedPdf2D& pdf, const Point2& x);

/// m(A) = prod_{j in A} pl_j prod_{j not in A} (1 - pl_j). Inputs are clamped to [0,1].
MassFunction gbt_mass(std::span<const double> pls, const Frame& frame);

}  // namespace sb
