#include "doctest.h"

#include "stablebelief/continuous.hpp"
#include "stablebelief/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace sb;

namespace {

// Independent oracle: integral of min(f(t), c) with the far tails taken from the cdf.
double min_integral(const StableParams& p, double c) {
    const double mu = mode(p);
    const double span = 50.0 * p.gamma;
    auto g = [&](double t) { return std::min(pdf(p, t), c); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double body = 0.0;
    // Split into short pieces so the kinks of the min do not spoil convergence.
    const int pieces = 200;
    for (int i = 0; i < pieces; ++i) {
        const double a = mu - span + 2.0 * span * i / pieces;
        const double b = a + 2.0 * span / pieces;
        body += GK::integrate(g, a, b, 6, 1e-12);
    }
    const double tails = cdf(p, mu - span) + 1.0 - cdf(p, mu + span);
    // In the tails f < c for every law used here.
    return body + tails;
}

double chi2_sf(double k, double x) {
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(k), x));
}

}  // namespace

TEST_CASE("symmetric form at the mode and on a gaussian") {
    const GaussianParams g{0.0, 1.0};
    CHECK(pl_symmetric_1d(g, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (double x : {-2.5, -0.7, 0.3, 1.0, 2.0, 3.5}) {
        CHECK(pl_symmetric_1d(g, x) == doctest::Approx(chi2_sf(3, x * x)).epsilon(1e-9));
    }
    // Same law written as a stable with alpha = 2, gamma = 1/sqrt 2.
    const StableParams s{2.0, 0.0, 1.0 / std::sqrt(2.0), 0.0};
    for (double x : {0.4, -1.3, 2.2}) {
        CHECK(pl_symmetric_1d(s, x) == doctest::Approx(chi2_sf(3, x * x)).epsilon(1e-8));
    }
}

TEST_CASE("symmetric form is symmetric and matches the min integral") {
    const StableParams cauchy{1.0, 0.0, 1.0, 0.0};
    CHECK(std::abs(pl_symmetric_1d(cauchy, 1.0) - min_integral(cauchy, pdf(cauchy, 1.0))) < 1e-4);
    const StableParams p{1.5, 0.0, 2.0, 3.0};
    for (double x : {3.5, 5.0, 9.0, 20.0}) {
        CHECK(pl_symmetric_1d(p, x) == doctest::Approx(pl_symmetric_1d(p, 6.0 - x)).epsilon(1e-12));
        CHECK(std::abs(pl_symmetric_1d(p, x) - min_integral(p, pdf(p, x))) < 1e-4);
    }
    CHECK_THROWS_AS(pl_symmetric_1d(StableParams{1.5, 0.3, 1, 0}, 0.0), InvalidArgument);
}

TEST_CASE("asymmetric form on skewed laws") {
    const StableParams p{1.5, 0.8, 1.0, 0.0};
    CHECK(pl_asymmetric_1d(p, mode(p)) == 1.0);
    for (double off : {-3.0, -1.0, 0.5, 2.0, 6.0}) {
        const double y = mode(p) + off;
        CHECK(std::abs(pl_asymmetric_1d(p, y) - min_integral(p, pdf(p, y))) < 1e-4);
    }
    const StableParams q{0.8, -0.5, 1.0, 1.0};
    for (double off : {-4.0, -0.5, 1.5}) {
        const double y = mode(q) + off;
        CHECK(std::abs(pl_asymmetric_1d(q, y) - min_integral(q, pdf(q, y))) < 1e-4);
    }
}

TEST_CASE("asymmetric form agrees with the symmetric one") {
    for (const StableParams p : {StableParams{1.5, 0, 1, 0}, StableParams{1.1, 0, 0.5, -2}, StableParams{2, 0, 1, 1}}) {
        for (double x = -6.0; x <= 6.0; x += 0.37) {
            CHECK(std::abs(pl_asymmetric_1d(p, x) - pl_symmetric_1d(p, x)) < 1e-8);
        }
    }
}

TEST_CASE("plausibility is monotone in the density") {
    const StableParams p{1.3, 0.6, 1.0, 0.0};
    std::vector<std::pair<double, double>> fp;
    for (double x = -8.0; x <= 8.0; x += 0.25) fp.emplace_back(pdf(p, x), pl_stable_1d(p, x));
    std::sort(fp.begin(), fp.end());
    for (std::size_t i = 1; i < fp.size(); ++i) CHECK(fp[i].second >= fp[i - 1].second - 1e-8);
    for (const auto& [f, v] : fp) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("nested intervals carry nested plausibility") {
    // For consonant pl the plausibility of an interval is the sup over it; nested
    // intervals around a point can only lose plausibility as they shrink.
    const StableParams p{1.7, -0.4, 1.0, 0.0};
    const double mu = mode(p);
    auto sup_pl = [&](double a, double b) {
        if (a <= mu && mu <= b) return 1.0;
        return std::max(pl_stable_1d(p, a), pl_stable_1d(p, b));
    };
    for (double c : {-3.0, 1.0, 4.0}) {
        CHECK(sup_pl(c - 2, c + 2) >= sup_pl(c - 1, c + 1) - 1e-12);
        CHECK(sup_pl(c - 1, c + 1) >= sup_pl(c - 0.2, c + 0.2) - 1e-12);
    }
}

TEST_CASE("chi-square plausibility for gaussians and mixtures") {
    const MvGaussian g(Eigen::Vector2d(1, 2), Eigen::Matrix2d::Identity());
    CHECK(pl_gaussian_mv(g, Eigen::Vector2d(1, 2)) == doctest::Approx(1.0));
    const double r = std::sqrt(9.4877);
    CHECK(pl_gaussian_mv(g, Eigen::Vector2d(1 + r, 2)) == doctest::Approx(chi2_sf(4, 9.4877)).epsilon(1e-12));
    CHECK(pl_gaussian_mv(g, Eigen::Vector2d(1 + r, 2)) == doctest::Approx(0.05).epsilon(1e-3));

    Eigen::MatrixXd c1(1, 1);
    c1 << 2.25;
    const MvGaussian g1(Eigen::VectorXd::Constant(1, 0.5), c1);
    for (double x : {-2.0, 0.5, 1.7, 4.0}) {
        CHECK(std::abs(pl_gaussian_mv(g1, Eigen::VectorXd::Constant(1, x)) - pl_symmetric_1d(GaussianParams{0.5, 1.5}, x)) < 1e-8);
    }

    Eigen::Matrix2d s;
    s << 2, 0.5, 0.5, 1;
    const MvGaussian h(Eigen::Vector2d(-1, 0), s);
    GmmModel single{{{1.0, g}}};
    GmmModel pair{{{0.5, g}, {0.5, h}}};
    const Eigen::Vector2d x(0.3, 0.9);
    CHECK(pl_gmm_mv(single, x) == doctest::Approx(pl_gaussian_mv(g, x)));
    CHECK(pl_gmm_mv(pair, x) == doctest::Approx(0.5 * (pl_gaussian_mv(g, x) + pl_gaussian_mv(h, x))));
}

TEST_CASE("cut table on a gaussian grid follows the chi-square law") {
    SpectralStable2D m;
    m.alpha = 2.0;
    m.weights = {0.5, 0.5};
    m.angles = {0.0, std::numbers::pi / 2};
    // Unit covariance: phi = exp(-|t|^2 / 2).
    const auto grid = pdf_grid(m, {}, 256);
    const auto table = build_cut_table(grid);
    const MvGaussian g(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity());
    for (double r : {0.5, 1.0, 2.0}) {
        const double level = std::exp(-0.5 * r * r) / (2 * std::numbers::pi);
        CHECK(std::abs(table.pl_at_level(level) - chi2_sf(4, r * r)) < 2e-2);
    }
    for (const Point2 x : {Point2{0.1, -0.3}, Point2{1.2, 0.8}, Point2{-2.0, 1.5}, Point2{3.0, 0.0}}) {
        CHECK(std::abs(pl_alphacut_2d(table, grid, x) - pl_gaussian_mv(g, Eigen::Vector2d(x[0], x[1]))) < 2e-2);
    }
    for (std::size_t i = 1; i < table.levels.size(); ++i) {
        CHECK(table.levels[i] > table.levels[i - 1]);
        CHECK(table.volumes[i] <= table.volumes[i - 1]);
        CHECK(table.cumulative_pl[i] >= table.cumulative_pl[i - 1]);
    }
    CHECK(table.cumulative_pl.back() <= 1.0 + 1e-3);
    CHECK(pl_alphacut_2d(table, grid, {10.0, 10.0}) <= 1e-6);
    Eigen::Index bi = 0, bj = 0;
    grid.values.maxCoeff(&bi, &bj);
    CHECK(pl_alphacut_2d(table, grid, {grid.xs[bi], grid.ys[bj]}) >= 1.0 - 2e-2);
}

TEST_CASE("cut table on a skewed stable grid") {
    SpectralStable2D m;
    m.alpha = 1.5;
    m.weights = {0.5, 0.5};
    m.angles = {0.0, std::numbers::pi / 2};
    const auto grid = pdf_grid(m, {}, 256);
    const auto table = build_cut_table(grid);
    for (std::size_t i = 1; i < table.levels.size(); ++i) CHECK(table.cumulative_pl[i] >= table.cumulative_pl[i - 1]);
    CHECK(table.cumulative_pl.back() <= 1.0 + 1e-3);
    Eigen::Index bi = 0, bj = 0;
    grid.values.maxCoeff(&bi, &bj);
    // The top cut holds all the mass inside the window, about 95 % for this law.
    CHECK(pl_alphacut_2d(table, grid, {grid.xs[bi], grid.ys[bj]}) == doctest::Approx(grid.mass()).epsilon(1e-3));
    // Direct min-integral on the grid.
    for (const Point2 x : {Point2{0.5, 0.5}, Point2{-1.0, 2.0}}) {
        const double c = grid.at(x[0], x[1]);
        const double direct = grid.cell_area * grid.values.cwiseMin(c).sum();
        CHECK(std::abs(pl_alphacut_2d(table, grid, x) - direct) < 2e-2);
    }
}

TEST_CASE("cut table preconditions") {
    TabulatedPdf2D disk;
    const int n = 128;
    disk.xs.resize(n);
    disk.ys.resize(n);
    disk.values = Eigen::MatrixXd::Zero(n, n);
    const double h = 8.0 / n;
    for (int i = 0; i < n; ++i) {
        disk.xs[i] = disk.ys[i] = -4 + (i + 0.5) * h;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (disk.xs[i] * disk.xs[i] + disk.ys[j] * disk.ys[j] < 1) disk.values(i, j) = 1 / std::numbers::pi;
        }
    }
    disk.cell_area = h * h;
    CHECK_THROWS_AS(build_cut_table(disk), FlatDensity);
    disk.values(64, 64) = 0.5;
    CHECK_THROWS_AS(build_cut_table(disk, 32), InvalidArgument);
    CHECK_NOTHROW(build_cut_table(disk, 64));
}

TEST_CASE("generalized Bayes masses") {
    const Frame f3 = Frame::numbered(3);
    const std::vector<double> ones{1, 1, 1};
    CHECK(gbt_mass(ones, f3).mass(f3.full()) == 1.0);
    const std::vector<double> one_hot{1, 0, 0};
    CHECK(gbt_mass(one_hot, f3).mass(0b001) == 1.0);
    const Frame f2 = Frame::numbered(2);
    const std::vector<double> half{0.5, 0.5};
    const auto m = gbt_mass(half, f2);
    for (Subset a = 0; a < 4; ++a) CHECK(m.mass(a) == 0.25);
    const std::vector<double> noisy{1.0000001, -1e-9, 0.3};
    const auto q = gbt_mass(noisy, f3);
    double total = 0.0;
    for (double v : q.dense()) {
        CHECK(v >= 0.0);
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    // Singleton plausibility of the GBT mass reproduces the input.
    const std::vector<double> pls{0.2, 0.7, 0.9};
    const auto r = gbt_mass(pls, f3);
    for (std::size_t j = 0; j < 3; ++j) CHECK(pl(r, Subset{1} << j) == doctest::Approx(pls[j]));
    CHECK_THROWS_AS(gbt_mass(pls, f2), FrameMismatch);
}

TEST_CASE("aircraft speed sweep decides the same on both paths") {
    // Speeds in km/h; Gaussian laws written as alpha = 2 stable laws.
    const StableParams commercial{2, 0, 8, 722.5};
    const StableParams bomber{2, 0, 7, 690};
    const StableParams fighter{2, 0, 10, 730};
    const Frame f({"Commercial", "Bomber", "Fighter"});
    auto mv = [](const StableParams& p) {
        Eigen::MatrixXd c(1, 1);
        c << 2 * p.gamma * p.gamma;
        return MvGaussian(Eigen::VectorXd::Constant(1, p.delta), c);
    };
    const std::array<MvGaussian, 3> gs{mv(commercial), mv(bomber), mv(fighter)};
    for (double v = 660; v <= 760; v += 2.5) {
        const std::vector<double> a{pl_stable_1d(commercial, v), pl_stable_1d(bomber, v), pl_stable_1d(fighter, v)};
        std::vector<double> b;
        for (const auto& g : gs) b.push_back(pl_gaussian_mv(g, Eigen::VectorXd::Constant(1, v)));
        const auto da = decide(pignistic(gbt_mass(a, f)));
        const auto db = decide(pignistic(gbt_mass(b, f)));
        CHECK_MESSAGE(da == db, "speed " << v);
    }
}
