#include "doctest.h"

#include "stablebelief/error.hpp"
#include "stablebelief/pipeline.hpp"

#include <algorithm>
#include <sstream>

using namespace sb;

namespace {

ExperimentConfig gaussian_run(const std::string& preset_name, std::uint64_t seed) {
    ExperimentConfig c;
    c.preset = preset_name;
    c.generator = preset(preset_name);
    c.family = Family::Gaussian;
    c.seed = seed;
    // The window-truncated Gaussian classes trip the gate now and then.
    c.enforce_gate = false;
    return c;
}

const ClassifierResult& result(const ExperimentResult& r, DimensionMode m, const std::string& name) {
    for (const auto& o : r.outcomes) {
        if (o.mode != m) continue;
        for (const auto& c : o.results) {
            if (c.classifier == name) return c;
        }
    }
    throw std::runtime_error("missing result");
}

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

}  // namespace

TEST_CASE("split sizes, determinism and class balance") {
    const Dataset d = generate(preset_gauss3(), 1);
    REQUIRE(d.size() == 9000);
    const auto [learn, test] = split(d, 1.0 / 3.0, 7);
    CHECK(learn.size() == 3000);
    CHECK(test.size() == 6000);
    const auto again = split(d, 1.0 / 3.0, 7);
    CHECK(again.first.labels == learn.labels);
    CHECK(again.first.features == learn.features);
    for (int c = 0; c < 3; ++c) {
        const double share = static_cast<double>(std::count(learn.labels.begin(), learn.labels.end(), c)) / 3000.0;
        CHECK(std::abs(share - 1.0 / 3.0) < 0.03);
    }
    CHECK(split(d, 1.0 / 3.0, 8).first.labels != learn.labels);
    CHECK_THROWS_AS(split(d, 1.0, 1), ConfigError);
}

TEST_CASE("generators are reproducible and honour the window") {
    const Dataset a = generate(preset_stable3(), 3);
    const Dataset b = generate(preset_stable3(), 3);
    CHECK(a.features == b.features);
    CHECK(a.features.cwiseAbs().maxCoeff() <= 4.0);
    CHECK_THROWS_AS(preset("gauss4"), ConfigError);

    // The preset laws are totally skewed along each axis, so marginal medians
    // sit at the projected law's median rather than at delta.
    GeneratorConfig g = preset_stable3();
    g.window.reset();
    const Dataset full = generate(g, 3);
    for (int c = 0; c < 3; ++c) {
        const Eigen::MatrixXd rows = full.rows_of(c);
        REQUIRE(rows.rows() == 3000);
        for (int j = 0; j < 2; ++j) {
            const std::vector<double> col(rows.col(j).data(), rows.col(j).data() + rows.rows());
            const Point2 u = j == 0 ? Point2{1.0, 0.0} : Point2{0.0, 1.0};
            const double expected = quantile(projection(g.stable[static_cast<std::size_t>(c)].law, u), 0.5);
            CHECK(std::abs(median(col) - expected) < 0.1);
        }
    }
}

TEST_CASE("belief decision at an isolated mode") {
    Dataset d;
    d.feature_names = {"x"};
    d.class_names = {"A", "B", "C"};
    const std::vector<double> centres{0.0, 5.0, 10.0};
    d.features.resize(300, 1);
    for (int i = 0; i < 300; ++i) {
        d.labels.push_back(i / 100);
        d.features(i, 0) = centres[static_cast<std::size_t>(i / 100)] + ((i % 100) - 49.5) / 50.0;
    }
    ModelSpec spec;
    spec.family = Family::Gaussian;
    const auto models = fit_models(d, spec);
    const auto dec = classify_belief(models, Eigen::VectorXd::Constant(1, 0.0), DimensionMode::PerFeature1D);
    REQUIRE(dec.label);
    CHECK(*dec.label == 0);
    CHECK(dec.scores[0] > 0.999);

    // Midway between two equal-width classes the nearer mode wins.
    CHECK(*classify_belief(models, Eigen::VectorXd::Constant(1, 2.5 - 1e-3), DimensionMode::PerFeature1D).label == 0);
    CHECK(*classify_belief(models, Eigen::VectorXd::Constant(1, 2.5 + 1e-3), DimensionMode::PerFeature1D).label == 1);
}

TEST_CASE("total conflict is a reject unless the uniform fallback is asked for") {
    Dataset d;
    d.feature_names = {"x", "y"};
    d.class_names = {"A", "B"};
    d.features.resize(200, 2);
    for (int i = 0; i < 200; ++i) {
        d.labels.push_back(i / 100);
        const double u = ((i % 100) - 49.5) / 50.0;
        // Class A sits left on x and low on y; class B the opposite.
        d.features(i, 0) = (i < 100 ? 0.0 : 60.0) + u;
        d.features(i, 1) = (i < 100 ? 0.0 : 60.0) + 0.7 * u;
    }
    ModelSpec spec;
    spec.family = Family::Gaussian;
    const auto models = fit_models(d, spec);
    // x says A beyond doubt, y says B beyond doubt.
    const Eigen::Vector2d x(0.0, 60.0);
    const auto rej = classify_belief(models, x, DimensionMode::PerFeature1D, RejectPolicy::Count);
    CHECK_FALSE(rej.label);
    CHECK(rej.conflict == doctest::Approx(1.0));
    const auto uni = classify_belief(models, x, DimensionMode::PerFeature1D, RejectPolicy::Uniform);
    REQUIRE(uni.label);
    CHECK(*uni.label == 0);
}

TEST_CASE("Bayes ties and prior scaling") {
    Dataset d;
    d.feature_names = {"x"};
    d.class_names = {"A", "B"};
    d.features.resize(200, 1);
    for (int i = 0; i < 200; ++i) {
        d.labels.push_back(i / 100);
        d.features(i, 0) = ((i % 100) - 49.5) / 50.0;  // identical classes
    }
    ModelSpec spec;
    spec.family = Family::Gaussian;
    auto models = fit_models(d, spec);
    const auto tie = classify_bayes(models, Eigen::VectorXd::Constant(1, 0.3), DimensionMode::PerFeature1D);
    CHECK(*tie.label == 0);
    CHECK(tie.scores[0] == doctest::Approx(0.5));

    models[0].prior = 0.2;
    models[1].prior = 0.8;
    const auto a = classify_bayes(models, Eigen::VectorXd::Constant(1, 0.3), DimensionMode::PerFeature1D);
    models[0].prior = 2.0;
    models[1].prior = 8.0;
    const auto b = classify_bayes(models, Eigen::VectorXd::Constant(1, 0.3), DimensionMode::PerFeature1D);
    CHECK(*a.label == 1);
    CHECK(*b.label == 1);
    CHECK(a.scores[1] == doctest::Approx(b.scores[1]).epsilon(1e-14));
    CHECK(a.scores[1] == doctest::Approx(0.8));
}

TEST_CASE("Wilson interval") {
    const auto i = wilson_interval(50, 100);
    CHECK(i.lo == doctest::Approx(40.383).epsilon(1e-4));
    CHECK(i.hi == doctest::Approx(59.617).epsilon(1e-4));
    const auto all = wilson_interval(10, 10);
    CHECK(all.hi == doctest::Approx(100.0));
    CHECK(all.lo < 100.0);
    // Close to the normal approximation at large n.
    const auto big = wilson_interval(4000, 6000);
    CHECK((big.hi - big.lo) / 2 == doctest::Approx(100 * 1.96 * std::sqrt(2.0 / 9.0 / 6000)).epsilon(1e-2));
}

TEST_CASE("Gaussian experiment: belief and Bayes mostly agree") {
    auto cfg = gaussian_run("gauss3", 2);
    // Well specified only without truncation.
    cfg.generator.window.reset();
    const auto r = run_experiment(cfg);
    CHECK(r.n_learn == 3000);
    CHECK(r.n_test == 6000);
    for (const auto m : {DimensionMode::PerFeature1D, DimensionMode::Joint2D}) {
        const auto& be = result(r, m, "belief");
        const auto& ba = result(r, m, "bayes");
        CHECK(be.confusion.sum() + static_cast<int>(be.rejected) == 6000);
        std::size_t same = 0;
        for (std::size_t i = 0; i < be.predictions.size(); ++i) same += be.predictions[i] == ba.predictions[i];
        // Joint plausibility is exp(-d^2/2) with no 1/sqrt(det) factor, so the
        // two rules split where class covariance determinants differ.
        const double floor = m == DimensionMode::PerFeature1D ? 0.95 : 0.85;
        CHECK_MESSAGE(static_cast<double>(same) / 6000.0 >= floor, to_string(m));
        CHECK(std::abs(be.accuracy - ba.accuracy) < 2.0);
        CHECK(be.ci95.lo < be.accuracy);
        CHECK(be.ci95.hi > be.accuracy);
    }
    // The joint model sees the correlation and does better.
    CHECK(result(r, DimensionMode::Joint2D, "bayes").accuracy > result(r, DimensionMode::PerFeature1D, "bayes").accuracy);
}

TEST_CASE("joint Gaussian belief and Bayes agree when determinants match") {
    auto cfg = gaussian_run("gauss3", 2);
    cfg.generator.window.reset();
    // Same determinant (0.75) for all three classes.
    cfg.generator.gaussian[2].cov << 0.5, 0.0, 0.0, 1.5;
    cfg.modes = {DimensionMode::Joint2D};
    const auto r = run_experiment(cfg);
    const auto& be = result(r, DimensionMode::Joint2D, "belief");
    const auto& ba = result(r, DimensionMode::Joint2D, "bayes");
    std::size_t same = 0;
    for (std::size_t i = 0; i < be.predictions.size(); ++i) same += be.predictions[i] == ba.predictions[i];
    CHECK(static_cast<double>(same) / 6000.0 >= 0.95);
}

TEST_CASE("relabelling classes leaves accuracies unchanged") {
    const auto cfg = gaussian_run("gauss3", 4);
    const Dataset d = generate(cfg.generator, cfg.seed);
    Dataset p = d;
    const std::vector<int> perm{2, 0, 1};  // old label -> new label
    p.class_names = {d.class_names[1], d.class_names[2], d.class_names[0]};
    for (auto& l : p.labels) l = perm[static_cast<std::size_t>(l)];
    const auto a = run_experiment(cfg, d);
    const auto b = run_experiment(cfg, p);
    for (const auto m : {DimensionMode::PerFeature1D, DimensionMode::Joint2D}) {
        for (const char* name : {"belief", "bayes"}) {
            CHECK(result(a, m, name).accuracy == doctest::Approx(result(b, m, name).accuracy).epsilon(1e-3));
        }
    }
}

TEST_CASE("diagonal covariances: joint and per-feature Gaussian paths agree") {
    GeneratorConfig g = preset_gauss3();
    for (auto& c : g.gaussian) c.cov(0, 1) = c.cov(1, 0) = 0.0;
    ExperimentConfig cfg;
    cfg.generator = g;
    cfg.family = Family::Gaussian;
    cfg.seed = 5;
    cfg.enforce_gate = false;
    const auto r = run_experiment(cfg);
    for (const char* name : {"belief", "bayes"}) {
        const auto& a = result(r, DimensionMode::PerFeature1D, name);
        const auto& b = result(r, DimensionMode::Joint2D, name);
        std::size_t same = 0;
        for (std::size_t i = 0; i < a.predictions.size(); ++i) same += a.predictions[i] == b.predictions[i];
        CHECK_MESSAGE(static_cast<double>(same) / static_cast<double>(a.predictions.size()) >= 0.9, name);
    }
}

TEST_CASE("stable fits on a small stable problem") {
    GeneratorConfig g = preset_stable3();
    g.n_per_class = 1500;
    // Truncation to the window biases alpha upwards; fit on the full law here.
    g.window.reset();
    const Dataset d = generate(g, 11);
    ModelSpec spec;
    spec.family = Family::Stable;
    spec.mode = DimensionMode::Joint2D;
    spec.grid_resolution = 256;
    const auto models = fit_models(d, spec);
    REQUIRE(models.size() == 3);
    for (const auto& m : models) {
        REQUIRE(m.joint);
        CHECK(m.joint->stable.alpha == doctest::Approx(1.5).epsilon(0.1));
        CHECK(m.prior == doctest::Approx(1.0 / 3.0));
    }
    const auto gate = ks_gate(models, d, spec, 170, 1);
    CHECK(gate.entries.size() == 6);
    for (const auto& e : gate.entries) CHECK(e.report.n_samples == 170);
    const auto dec = classify_belief(models, Eigen::Vector2d(2.0, 1.4), DimensionMode::Joint2D);
    REQUIRE(dec.label);
    CHECK(*dec.label == 1);
}

TEST_CASE("estimator failures carry the class name") {
    Dataset d;
    d.feature_names = {"x"};
    d.class_names = {"ok", "flat"};
    d.features.resize(100, 1);
    for (int i = 0; i < 100; ++i) {
        d.labels.push_back(i / 50);
        d.features(i, 0) = i < 50 ? i * 0.1 : 3.0;
    }
    ModelSpec spec;
    spec.family = Family::Gaussian;
    try {
        (void)fit_models(d, spec);
        FAIL("expected an estimator failure");
    } catch (const EstimatorFailure& e) {
        CHECK(e.label() == "flat");
    }
}

TEST_CASE("experiment config parsing") {
    const auto j = nlohmann::json::parse(R"({
        "generator": {"preset": "stable3", "n_per_class": 500},
        "split": {"p": 0.5, "seed": 9},
        "models": {"family": "gmm", "modes": ["2d"], "gmm_components": 3, "priors": [1, 4, 1]},
        "gate": {"samples": 100, "enforce": false},
        "classifiers": ["bayes"]})");
    const auto c = experiment_config_from_json(j);
    CHECK(c.generator.n_per_class == 500);
    CHECK(c.generator.family == GeneratorFamily::Stable);
    CHECK(c.split_p == 0.5);
    CHECK(c.seed == 9);
    CHECK(c.family == Family::Gmm);
    CHECK(c.modes == std::vector<DimensionMode>{DimensionMode::Joint2D});
    REQUIRE(c.priors);
    CHECK((*c.priors)[1] == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(c.enforce_gate);
    auto once = to_json(c);
    auto twice = to_json(experiment_config_from_json(once));
    for (int k = 0; k < 3; ++k) {
        CHECK(twice["models"]["priors"][k].get<double>() == doctest::Approx(once["models"]["priors"][k].get<double>()));
    }
    once["models"].erase("priors");
    twice["models"].erase("priors");
    CHECK(once == twice);

    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::parse(R"({"split": {"p": 0.5}})")), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::parse(
                        R"({"generator": {"preset": "gauss3"}, "models": {"family": "cauchy"}})")),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::parse(
                        R"({"generator": {"preset": "gauss3"}, "models": {"priors": [1, 2]}})")),
                    ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::parse(R"({"generator": {"preset": 3}})")),
                    ConfigError);
}

TEST_CASE("dataset CSV round trip") {
    GeneratorConfig g = preset_gauss3();
    g.n_per_class = 20;
    const Dataset d = generate(g, 1);
    std::stringstream ss;
    ss << "# provenance line\n";
    write_dataset_csv(d, ss);
    const Dataset e = read_dataset_csv(ss);
    CHECK(e.labels == d.labels);
    CHECK(e.class_names == d.class_names);
    CHECK(e.features == d.features);
    std::stringstream bad("label,x\nA,abc\n");
    CHECK_THROWS_AS(read_dataset_csv(bad), ConfigError);
}
