#include "doctest.h"

#include "stablebelief/bivariate.hpp"
#include "stablebelief/error.hpp"
#include "stablebelief/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace sb;
using std::numbers::pi;

namespace {

SpectralStable2D axis_law(double alpha, double w0, double w1, Point2 delta = {0, 0}) {
    SpectralStable2D m;
    m.alpha = alpha;
    m.weights = {w0, w1};
    m.angles = {0.0, 0.5 * pi};
    m.delta = delta;
    return m;
}

std::vector<double> component(const std::vector<Point2>& pts, Point2 u) {
    std::vector<double> v(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) v[i] = u[0] * pts[i][0] + u[1] * pts[i][1];
    return v;
}

}  // namespace

TEST_CASE("gaussian special case matches the closed form") {
    // phi = exp(-|t|^2) is N(0, 2 I).
    const auto m = axis_law(2.0, 1.0, 1.0);
    const auto g = pdf_grid(m, {}, 256);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.xs.size(); i += 3) {
        for (std::size_t j = 0; j < g.ys.size(); j += 3) {
            const double r2 = g.xs[i] * g.xs[i] + g.ys[j] * g.ys[j];
            const double exact = std::exp(-r2 / 4.0) / (4.0 * pi);
            worst = std::max(worst, std::abs(g.values(i, j) - exact));
        }
    }
    CHECK(worst < 1e-3);
    CHECK(g.mass() <= 1.001);
    CHECK(g.mass() == doctest::Approx(std::pow(std::erf(2.0), 2)).epsilon(2e-3));
}

TEST_CASE("skewed axis law peaks at the product of marginal modes") {
    const auto m = axis_law(1.5, 0.5, 0.5);
    const auto g = pdf_grid(m, {}, 256);
    Eigen::Index bi = 0;
    Eigen::Index bj = 0;
    g.values.maxCoeff(&bi, &bj);
    const double mx = mode(projection(m, {1, 0}));
    const double my = mode(projection(m, {0, 1}));
    const double cell = g.xs[1] - g.xs[0];
    CHECK(std::abs(g.xs[bi] - mx) <= cell);
    CHECK(std::abs(g.ys[bj] - my) <= cell);
    CHECK(g.mass() <= 1.001);
    CHECK(g.mass() > 0.9);
    CHECK(g.ripple < 1e-6);
}

TEST_CASE("grid agrees with a product of univariate densities") {
    // Independent axes: the joint density factorizes.
    const auto m = axis_law(1.3, 0.4, 0.7, {0.3, -0.2});
    const auto g = pdf_grid(m, {}, 256);
    const auto px = projection(m, {1, 0});
    const auto py = projection(m, {0, 1});
    double worst = 0.0;
    for (std::size_t i = 0; i < g.xs.size(); i += 17) {
        for (std::size_t j = 0; j < g.ys.size(); j += 17) {
            worst = std::max(worst, std::abs(g.values(i, j) - pdf(px, g.xs[i]) * pdf(py, g.ys[j])));
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("characteristic function is hermitian and unit at the origin") {
    SpectralStable2D m;
    m.alpha = 1.0;
    m.weights = {0.3, 0.0, 0.9, 0.2, 0.4, 0.1};
    m.angles = SpectralStable2D::default_angles(6);
    m.delta = {0.5, -1.0};
    CHECK(std::abs(char_fn_2d(m, {0, 0}) - 1.0) < 1e-15);
    for (double a : {1.0, 1.5, 0.7}) {
        m.alpha = a;
        for (const Point2 t : {Point2{0.3, 1.1}, Point2{-2.0, 0.4}, Point2{5.0, -5.0}}) {
            const auto p = char_fn_2d(m, t);
            const auto q = char_fn_2d(m, {-t[0], -t[1]});
            CHECK(std::abs(p - std::conj(q)) < 1e-14);
            CHECK(std::abs(p) <= 1.0);
        }
    }
}

TEST_CASE("empirical characteristic function of samples") {
    SpectralStable2D m = axis_law(1.5, 1.0, 1.0, {1.0, -0.5});
    const auto pts = sample_2d(m, 40000, 7);
    for (const Point2 t : {Point2{0.3, 0.0}, Point2{0.0, -0.5}, Point2{0.4, 0.4}, Point2{-0.2, 0.7}}) {
        std::complex<double> e{0, 0};
        for (const auto& p : pts) e += std::polar(1.0, t[0] * p[0] + t[1] * p[1]);
        e /= static_cast<double>(pts.size());
        CHECK(std::abs(e - char_fn_2d(m, t)) < 0.02);
    }
}

TEST_CASE("gaussian samples have the implied covariance") {
    const auto pts = sample_2d(axis_law(2.0, 1.0, 0.25, {2, 3}), 50000, 11);
    double mx = 0, my = 0;
    for (const auto& p : pts) {
        mx += p[0];
        my += p[1];
    }
    mx /= pts.size();
    my /= pts.size();
    double sxx = 0, syy = 0, sxy = 0;
    for (const auto& p : pts) {
        sxx += (p[0] - mx) * (p[0] - mx);
        syy += (p[1] - my) * (p[1] - my);
        sxy += (p[0] - mx) * (p[1] - my);
    }
    const double n = pts.size() - 1.0;
    CHECK(mx == doctest::Approx(2.0).epsilon(0.01));
    CHECK(my == doctest::Approx(3.0).epsilon(0.01));
    CHECK(sxx / n == doctest::Approx(2.0).epsilon(0.03));
    CHECK(syy / n == doctest::Approx(0.5).epsilon(0.03));
    CHECK(std::abs(sxy / n) < 0.03);
}

TEST_CASE("projections of samples follow the projected law") {
    SpectralStable2D m;
    m.weights = {0.5, 0.2, 0.7, 0.1, 0.3};
    m.angles = SpectralStable2D::default_angles(5);
    m.delta = {0.4, -0.3};
    for (double a : {0.8, 1.0, 1.5, 1.9}) {
        m.alpha = a;
        const auto pts = sample_2d(m, 3000, 100 + static_cast<std::uint64_t>(10 * a));
        for (const Point2 u : {Point2{1, 0}, Point2{0.6, 0.8}, Point2{-0.8, 0.6}}) {
            const auto p = projection(m, u);
            const auto v = component(pts, u);
            const auto r = ks_test(v, [&](double x) { return cdf(p, x); });
            CHECK_MESSAGE(r.p_value > 0.001, "alpha " << a << " u " << u[0] << "," << u[1]);
        }
    }
}

TEST_CASE("projection reproduces the 1D parameterization on a single atom") {
    SpectralStable2D m;
    m.alpha = 1.4;
    m.weights = {2.0};
    m.angles = {0.0};
    m.delta = {0.5, 0.0};
    const auto p = projection(m, {1, 0});
    CHECK(p.beta == doctest::Approx(1.0));
    CHECK(p.gamma == doctest::Approx(std::pow(2.0, 1 / 1.4)));
    CHECK(projection(m, {-1, 0}).beta == doctest::Approx(-1.0));
    CHECK_THROWS_AS(projection(m, {0, 1}), InvalidArgument);
}

TEST_CASE("grid preconditions") {
    const auto m = axis_law(1.5, 0.5, 0.5);
    CHECK_THROWS_AS(pdf_grid(m, {}, 100), GridMismatch);
    CHECK_THROWS_AS(pdf_grid(m, {}, 64), GridMismatch);
    SpectralStable2D line = m;
    line.weights = {1.0, 0.0};
    CHECK_THROWS_AS(pdf_grid(line, {}, 256), GridMismatch);
    // alpha = 0.3 decays too slowly for a 128-point grid on this window
    CHECK_THROWS_AS(pdf_grid(axis_law(0.3, 0.5, 0.5), {}, 128), GridMismatch);
    SpectralStable2D bad = m;
    bad.weights = {-1.0, 2.0};
    CHECK_THROWS_AS(pdf_grid(bad), InvalidArgument);
}

TEST_CASE("nnls against a known solution") {
    Eigen::MatrixXd a(4, 3);
    a << 1, 0, 1, 0, 1, 1, 1, 1, 0, 2, 0, 1;
    Eigen::VectorXd x0(3);
    x0 << 0.5, 0.0, 2.0;
    const Eigen::VectorXd x = nnls(a, a * x0);
    CHECK((x - x0).norm() < 1e-10);
    // Unconstrained optimum has a negative entry; nnls clamps it.
    Eigen::VectorXd b(4);
    b << -1, 1, 0, -2;
    const Eigen::VectorXd y = nnls(a, b);
    CHECK(y.minCoeff() >= 0.0);
    const Eigen::VectorXd grad = a.transpose() * (b - a * y);
    for (int i = 0; i < 3; ++i) {
        if (y[i] > 0) CHECK(std::abs(grad[i]) < 1e-10);
        else CHECK(grad[i] <= 1e-10);
    }
}

TEST_CASE("spectral estimator recovers axis masses") {
    const auto truth = axis_law(1.7, 0.6, 0.9, {0.5, -1.0});
    const auto pts = sample_2d(truth, 20000, 21);
    const auto fit = estimate_spectral(pts, 8);
    CHECK(std::abs(fit.alpha - 1.7) < 0.1);
    double total = 0.0;
    for (double w : fit.weights) total += w;
    CHECK((fit.weights[0] + fit.weights[2]) / total >= 0.8);
    CHECK(fit.weights[0] == doctest::Approx(0.6).epsilon(0.25));
    CHECK(fit.weights[2] == doctest::Approx(0.9).epsilon(0.25));
    CHECK(std::abs(fit.delta[0] - 0.5) < 0.15);
    CHECK(std::abs(fit.delta[1] + 1.0) < 0.15);
}

TEST_CASE("spectral estimator on gaussian data") {
    const auto pts = sample_2d(axis_law(2.0, 1.0, 1.0), 20000, 3);
    const auto fit = estimate_spectral(pts, 8);
    CHECK(fit.alpha >= 1.9);
}

TEST_CASE("rotating the data shifts the estimated weights") {
    SpectralStable2D truth;
    truth.alpha = 1.5;
    truth.angles = SpectralStable2D::default_angles(8);
    truth.weights = {1.0, 0, 0, 0, 0, 0, 0, 0};
    truth.weights[3] = 0.5;
    auto pts = sample_2d(truth, 20000, 5);
    const auto a = estimate_spectral(pts, 8);
    const double c = std::cos(pi / 4), s = std::sin(pi / 4);
    for (auto& p : pts) p = {c * p[0] - s * p[1], s * p[0] + c * p[1]};
    const auto b = estimate_spectral(pts, 8);
    const auto ia = std::max_element(a.weights.begin(), a.weights.end()) - a.weights.begin();
    const auto ib = std::max_element(b.weights.begin(), b.weights.end()) - b.weights.begin();
    CHECK(ia == 0);
    CHECK(ib == 1);
}

TEST_CASE("estimator preconditions") {
    const auto pts = sample_2d(axis_law(1.5, 1, 1), 499, 1);
    CHECK_THROWS_AS(estimate_spectral(pts, 8), InsufficientData);
    const auto more = sample_2d(axis_law(1.5, 1, 1), 2000, 1);
    CHECK_THROWS_AS(estimate_spectral(more, 3), InvalidArgument);
    CHECK_THROWS_AS(estimate_spectral(more, 65), InvalidArgument);
}

TEST_CASE("sampling is deterministic per seed") {
    const auto m = axis_law(1.2, 0.3, 0.8);
    CHECK(sample_2d(m, 50, 9) == sample_2d(m, 50, 9));
    CHECK(sample_2d(m, 50, 9) != sample_2d(m, 50, 10));
}

TEST_CASE("json and csv output") {
    SpectralStable2D m = axis_law(1.5, 0.5, 0.5, {1, 2});
    const auto back = spectral_from_json(to_json(m));
    CHECK(back.alpha == m.alpha);
    CHECK(back.weights == m.weights);
    CHECK(back.angles == m.angles);
    CHECK(back.delta == m.delta);
    const auto g = pdf_grid(m, {}, 128);
    std::ostringstream os;
    write_csv(g, os);
    const auto text = os.str();
    CHECK(text.rfind("x,y,density\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 128 * 128);
}

TEST_CASE("spectral estimator with alpha = 1 and a large scale") {
    // Scale 40 exercises the log shift that rescaling adds at alpha = 1.
    SpectralStable2D truth;
    truth.alpha = 1.0;
    truth.angles = SpectralStable2D::default_angles(4);
    truth.weights = {40.0, 0.0, 0.0, 20.0};
    truth.delta = {5.0, -3.0};
    const auto pts = sample_2d(truth, 20000, 8);
    const auto fit = estimate_spectral(pts, 4);
    CHECK(fit.alpha == 1.0);
    CHECK(fit.weights[0] == doctest::Approx(40.0).epsilon(0.2));
    CHECK(fit.weights[3] == doctest::Approx(20.0).epsilon(0.2));
    CHECK(std::abs(fit.delta[0] - 5.0) < 4.0);
    CHECK(std::abs(fit.delta[1] + 3.0) < 4.0);
}
