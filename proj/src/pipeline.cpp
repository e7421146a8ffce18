#include "stablebelief/pipeline.hpp"

#include "stablebelief/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace sb {

namespace {

using std::numbers::pi;

constexpr int kTableNodes = 2049;

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

bool inside(const std::optional<Window>& w, double x, double y) {
    if (!w) return true;
    return x >= w->xmin && x <= w->xmax && y >= w->ymin && y <= w->ymax;
}

}  // namespace

// ----- dataset -----------------------------------------------------------------

void Dataset::validate() const {
    if (features.rows() != static_cast<Eigen::Index>(labels.size())) {
        throw InvalidArgument("feature rows and labels differ in length");
    }
    if (features.cols() < 1 || features.cols() > 2) throw InvalidArgument("datasets hold one or two features");
    if (static_cast<Eigen::Index>(feature_names.size()) != features.cols()) {
        throw InvalidArgument("one name per feature is required");
    }
    if (!features.allFinite()) throw InvalidArgument("non-finite feature value");
    for (int l : labels) {
        if (l < 0 || l >= n_classes()) throw InvalidArgument("label outside the class list");
    }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset d;
    d.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    d.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
        d.labels.push_back(labels[rows[i]]);
    }
    d.feature_names = feature_names;
    d.class_names = class_names;
    return d;
}

Eigen::MatrixXd Dataset::rows_of(int label) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) idx.push_back(i);
    }
    return subset(idx).features;
}

// ----- generation ----------------------------------------------------------------

GeneratorConfig preset_gauss3() {
    GeneratorConfig g;
    g.family = GeneratorFamily::Gaussian;
    auto cls = [](std::string name, double m0, double m1, double v00, double v01, double v11) {
        GaussianClass c;
        c.name = std::move(name);
        c.mean << m0, m1;
        c.cov << v00, v01, v01, v11;
        return c;
    };
    g.gaussian = {cls("C1", 2, 3, 1, 1.5, 3), cls("C2", 1, 1, 3, 1.5, 1), cls("C3", -1, 1, 1, 0, 3)};
    return g;
}

GeneratorConfig preset_stable3() {
    GeneratorConfig g;
    g.family = GeneratorFamily::Stable;
    auto cls = [](std::string name, double d0, double d1) {
        StableClass c;
        c.name = std::move(name);
        c.law.alpha = 1.5;
        // Equal relative spectral masses normalized to a unit total.
        c.law.weights = {0.5, 0.5};
        c.law.angles = {0.0, 0.5 * pi};
        c.law.delta = {d0, d1};
        return c;
    };
    g.stable = {cls("C1", 0, 0), cls("C2", 2, 1.4), cls("C3", 1, 0.5)};
    return g;
}

GeneratorConfig preset(const std::string& name) {
    if (name == "gauss3") return preset_gauss3();
    if (name == "stable3") return preset_stable3();
    throw ConfigError("unknown preset '" + name + "' (expected gauss3 or stable3)");
}

Dataset generate(const GeneratorConfig& config, std::uint64_t seed) {
    const bool gauss = config.family == GeneratorFamily::Gaussian;
    const std::size_t k = gauss ? config.gaussian.size() : config.stable.size();
    if (k == 0) throw ConfigError("generator has no classes");
    if (config.n_per_class == 0) throw ConfigError("n_per_class must be positive");
    Dataset d;
    d.feature_names = {"x1", "x2"};
    d.features.resize(static_cast<Eigen::Index>(k * config.n_per_class), 2);
    std::size_t row = 0;
    for (std::size_t c = 0; c < k; ++c) {
        d.class_names.push_back(gauss ? config.gaussian[c].name : config.stable[c].name);
        const std::uint64_t cseed = mix(seed, c);
        std::size_t kept = 0;
        auto keep = [&](double x, double y) {
            if (kept == config.n_per_class || !inside(config.window, x, y)) return;
            d.features(static_cast<Eigen::Index>(row), 0) = x;
            d.features(static_cast<Eigen::Index>(row), 1) = y;
            d.labels.push_back(static_cast<int>(c));
            ++row;
            ++kept;
        };
        if (gauss) {
            const auto& gc = config.gaussian[c];
            Eigen::LLT<Eigen::Matrix2d> llt(gc.cov);
            if (llt.info() != Eigen::Success) throw ConfigError("class covariance is not positive definite");
            const Eigen::Matrix2d l = llt.matrixL();
            std::mt19937_64 rng(cseed);
            std::normal_distribution<double> n01;
            for (std::size_t tries = 0; kept < config.n_per_class; ++tries) {
                if (tries > 1000 * config.n_per_class) throw ConfigError("window rejects almost every sample");
                Eigen::Vector2d z(n01(rng), n01(rng));
                const Eigen::Vector2d v = gc.mean + l * z;
                keep(v[0], v[1]);
            }
        } else {
            const auto& law = config.stable[c].law;
            for (std::uint64_t batch = 0; kept < config.n_per_class; ++batch) {
                if (batch > 1000) throw ConfigError("window rejects almost every sample");
                for (const auto& p : sample_2d(law, config.n_per_class, mix(cseed, batch))) keep(p[0], p[1]);
            }
        }
    }
    d.validate();
    return d;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double p, std::uint64_t seed) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("split fraction must lie in (0,1)");
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(mix(seed, 0x5d));
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_learn = static_cast<std::size_t>(std::floor(static_cast<double>(data.size()) * p));
    std::vector<std::size_t> a(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_learn));
    std::vector<std::size_t> b(idx.begin() + static_cast<std::ptrdiff_t>(n_learn), idx.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return {data.subset(a), data.subset(b)};
}

// ----- laws ----------------------------------------------------------------------

double Law1D::pdf(double x) const {
    switch (family) {
        case Family::Gaussian:
            return normal_pdf(x, gaussian.mu, gaussian.sigma);
        case Family::Stable:
            return stable->pdf(x);
        case Family::Gmm:
            return gmm_pdf(gmm, Eigen::VectorXd::Constant(1, x));
    }
    return 0.0;
}

double Law1D::cdf(double x) const {
    switch (family) {
        case Family::Gaussian:
            return normal_cdf(x, gaussian.mu, gaussian.sigma);
        case Family::Stable:
            return stable->cdf(x);
        case Family::Gmm: {
            double s = 0.0;
            for (const auto& c : gmm.components) {
                s += c.weight * normal_cdf(x, c.gaussian.mean()[0], std::sqrt(c.gaussian.cov()(0, 0)));
            }
            return std::clamp(s, 0.0, 1.0);
        }
    }
    return 0.0;
}

double Law1D::pl(double x) const {
    switch (family) {
        case Family::Gaussian:
            return pl_symmetric_1d(gaussian, x);
        case Family::Stable: {
            const auto* t = stable.get();
            const UnimodalDensity d{[t](double v) { return t->pdf(v); }, [t](double v) { return t->cdf(v); },
                                    t->mode(), t->params().gamma};
            if (t->params().beta == 0.0 || t->params().alpha >= 2.0) return pl_symmetric_1d(d, x);
            return pl_asymmetric_1d(d, x);
        }
        case Family::Gmm:
            return pl_gmm_mv(gmm, Eigen::VectorXd::Constant(1, x));
    }
    return 0.0;
}

nlohmann::json Law1D::to_json() const {
    switch (family) {
        case Family::Gaussian:
            return {{"family", "gaussian"}, {"mu", gaussian.mu}, {"sigma", gaussian.sigma}};
        case Family::Stable: {
            const auto& p = stable->params();
            return {{"family", "stable"}, {"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"delta", p.delta}};
        }
        case Family::Gmm:
            return {{"family", "gmm"}, {"model", sb::to_json(gmm)}};
    }
    return {};
}

double Law2D::pdf(const Point2& x) const {
    const Eigen::Vector2d v(x[0], x[1]);
    switch (family) {
        case Family::Gaussian:
            return gaussian.pdf(v);
        case Family::Gmm:
            return gmm_pdf(gmm, v);
        case Family::Stable:
            return grid->at(x[0], x[1]);
    }
    return 0.0;
}

double Law2D::pl(const Point2& x) const {
    const Eigen::Vector2d v(x[0], x[1]);
    switch (family) {
        case Family::Gaussian:
            return pl_gaussian_mv(gaussian, v);
        case Family::Gmm:
            return pl_gmm_mv(gmm, v);
        case Family::Stable:
            return pl_alphacut_2d(*cuts, *grid, x);
    }
    return 0.0;
}

double Law2D::marginal_cdf(int feature, double x) const {
    switch (family) {
        case Family::Gaussian:
            return normal_cdf(x, gaussian.mean()[feature], std::sqrt(gaussian.cov()(feature, feature)));
        case Family::Gmm: {
            double s = 0.0;
            for (const auto& c : gmm.components) {
                s += c.weight *
                     normal_cdf(x, c.gaussian.mean()[feature], std::sqrt(c.gaussian.cov()(feature, feature)));
            }
            return std::clamp(s, 0.0, 1.0);
        }
        case Family::Stable:
            return marginals.at(static_cast<std::size_t>(feature))->cdf(x);
    }
    return 0.0;
}

nlohmann::json Law2D::to_json() const {
    switch (family) {
        case Family::Gaussian:
            return {{"family", "gaussian"}, {"model", sb::to_json(gaussian)}};
        case Family::Gmm:
            return {{"family", "gmm"}, {"model", sb::to_json(gmm)}};
        case Family::Stable:
            return {{"family", "stable"},
                    {"model", sb::to_json(stable)},
                    {"grid_mass", grid->mass()},
                    {"grid_ripple", grid->ripple}};
    }
    return {};
}

namespace {

Law1D fit_law_1d(const Eigen::VectorXd& col, const ModelSpec& spec) {
    Law1D law;
    law.family = spec.family;
    const auto n = col.size();
    switch (spec.family) {
        case Family::Gaussian: {
            if (n < 2) throw InsufficientData("a Gaussian fit needs two points");
            const double mu = col.mean();
            const double var = (col.array() - mu).square().sum() / static_cast<double>(n - 1);
            if (!(var > 0.0)) throw DegenerateData("feature has zero variance");
            law.gaussian = {mu, std::sqrt(var)};
            break;
        }
        case Family::Stable: {
            const std::vector<double> v(col.data(), col.data() + n);
            const auto p = estimate_koutrouvelis(v).params;
            law.stable = std::make_shared<const TabulatedStable>(p, kTableNodes);
            break;
        }
        case Family::Gmm: {
            Eigen::MatrixXd m(n, 1);
            m.col(0) = col;
            law.gmm = fit_gmm_em(m, spec.gmm_components, spec.seed);
            break;
        }
    }
    return law;
}

Law2D fit_law_2d(const Eigen::MatrixXd& rows, const ModelSpec& spec) {
    Law2D law;
    law.family = spec.family;
    switch (spec.family) {
        case Family::Gaussian:
            law.gaussian = fit_gaussian(rows);
            break;
        case Family::Gmm:
            law.gmm = fit_gmm_em(rows, spec.gmm_components, spec.seed);
            break;
        case Family::Stable: {
            std::vector<Point2> pts(static_cast<std::size_t>(rows.rows()));
            for (Eigen::Index i = 0; i < rows.rows(); ++i) pts[static_cast<std::size_t>(i)] = {rows(i, 0), rows(i, 1)};
            law.stable = estimate_spectral(pts, spec.spectral_directions);
            auto grid = std::make_shared<TabulatedPdf2D>(pdf_grid(law.stable, spec.window, spec.grid_resolution));
            law.cuts = std::make_shared<const CutTable>(build_cut_table(*grid, spec.cut_levels));
            law.grid = grid;
            for (const Point2 u : {Point2{1.0, 0.0}, Point2{0.0, 1.0}}) {
                law.marginals.push_back(std::make_shared<const TabulatedStable>(projection(law.stable, u), kTableNodes));
            }
            break;
        }
    }
    return law;
}

}  // namespace

std::vector<ClassModel> fit_models(const Dataset& learn, const ModelSpec& spec) {
    learn.validate();
    if (spec.mode == DimensionMode::Joint2D && learn.dim() != 2) {
        throw ConfigError("joint mode needs two features");
    }
    std::vector<ClassModel> out;
    for (int c = 0; c < learn.n_classes(); ++c) {
        ClassModel m;
        m.label = c;
        m.name = learn.class_names[static_cast<std::size_t>(c)];
        const Eigen::MatrixXd rows = learn.rows_of(c);
        m.prior = static_cast<double>(rows.rows()) / static_cast<double>(learn.size());
        try {
            if (spec.mode == DimensionMode::PerFeature1D) {
                for (int j = 0; j < learn.dim(); ++j) m.per_feature.push_back(fit_law_1d(rows.col(j), spec));
            } else {
                m.joint = fit_law_2d(rows, spec);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw EstimatorFailure(m.name, e.what());
        }
        out.push_back(std::move(m));
    }
    return out;
}

// ----- gate ----------------------------------------------------------------------

bool GateResult::passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const GateEntry& e) { return e.report.pass_at_5pct; });
}

std::vector<const GateEntry*> GateResult::failures() const {
    std::vector<const GateEntry*> out;
    for (const auto& e : entries) {
        if (!e.report.pass_at_5pct) out.push_back(&e);
    }
    return out;
}

GateResult ks_gate(const std::vector<ClassModel>& models, const Dataset& learn, const ModelSpec& spec,
                   std::size_t gate_samples, std::uint64_t seed) {
    GateResult g;
    for (const auto& m : models) {
        Eigen::MatrixXd rows = learn.rows_of(m.label);
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(rows.rows()));
        std::iota(idx.begin(), idx.end(), 0);
        if (gate_samples > 0 && gate_samples < idx.size()) {
            std::mt19937_64 rng(mix(seed, 0x6a7e + static_cast<std::uint64_t>(m.label)));
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(gate_samples);
        }
        for (int j = 0; j < learn.dim(); ++j) {
            std::vector<double> v;
            v.reserve(idx.size());
            for (auto i : idx) v.push_back(rows(i, j));
            GateEntry e;
            e.label = m.label;
            e.class_name = m.name;
            e.feature = j;
            if (spec.mode == DimensionMode::PerFeature1D) {
                const Law1D& law = m.per_feature.at(static_cast<std::size_t>(j));
                e.report = ks_test(v, [&law](double x) { return law.cdf(x); });
            } else {
                const Law2D& law = *m.joint;
                e.report = ks_test(v, [&law, j](double x) { return law.marginal_cdf(j, x); });
            }
            g.entries.push_back(e);
        }
    }
    return g;
}

// ----- classification --------------------------------------------------------------

namespace {

Frame frame_of(const std::vector<ClassModel>& models) {
    std::vector<std::string> names;
    for (const auto& m : models) names.push_back(m.name);
    return Frame(names);
}

Decision finish_belief(const MassFunction& m, RejectPolicy policy) {
    Decision d;
    d.conflict = m.conflict();
    const std::size_t n = m.frame().size();
    if (d.conflict >= 1.0 - 1e-12) {
        if (policy == RejectPolicy::Count) {
            d.scores.assign(n, 0.0);
            return d;
        }
        d.scores.assign(n, 1.0 / static_cast<double>(n));
    } else {
        d.scores = pignistic(m);
    }
    d.label = static_cast<int>(decide(d.scores));
    return d;
}

}  // namespace

Decision classify_belief(const std::vector<ClassModel>& models, const Eigen::VectorXd& x, DimensionMode mode,
                         RejectPolicy policy) {
    const Frame frame = frame_of(models);
    std::vector<double> pls(models.size());
    if (mode == DimensionMode::Joint2D) {
        for (std::size_t c = 0; c < models.size(); ++c) pls[c] = models[c].joint->pl({x[0], x[1]});
        return finish_belief(gbt_mass(pls, frame), policy);
    }
    std::vector<MassFunction> ms;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        for (std::size_t c = 0; c < models.size(); ++c) pls[c] = models[c].per_feature[static_cast<std::size_t>(j)].pl(x[j]);
        ms.push_back(gbt_mass(pls, frame));
    }
    return finish_belief(ms.size() == 1 ? ms.front() : combine_conjunctive(ms), policy);
}

Decision classify_bayes(const std::vector<ClassModel>& models, const Eigen::VectorXd& x, DimensionMode mode) {
    std::vector<double> logp(models.size());
    for (std::size_t c = 0; c < models.size(); ++c) {
        double lp = std::log(models[c].prior);
        if (mode == DimensionMode::Joint2D) {
            lp += std::log(models[c].joint->pdf({x[0], x[1]}));
        } else {
            for (Eigen::Index j = 0; j < x.size(); ++j) {
                lp += std::log(models[c].per_feature[static_cast<std::size_t>(j)].pdf(x[j]));
            }
        }
        logp[c] = lp;
    }
    Decision d;
    const double top = *std::max_element(logp.begin(), logp.end());
    d.scores.assign(models.size(), 0.0);
    if (top == -std::numeric_limits<double>::infinity()) {
        // No class gives the point any density: a tie across all classes.
        d.label = 0;
        return d;
    }
    double total = 0.0;
    for (std::size_t c = 0; c < models.size(); ++c) {
        d.scores[c] = std::exp(logp[c] - top);
        total += d.scores[c];
    }
    for (double& s : d.scores) s /= total;
    d.label = static_cast<int>(decide(d.scores));
    return d;
}

// ----- experiments -------------------------------------------------------------------

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
    if (n == 0) return {0.0, 100.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
    return {100.0 * (centre - half), 100.0 * (centre + half)};
}

bool ExperimentResult::gate_failed() const {
    return std::any_of(outcomes.begin(), outcomes.end(), [](const ModeOutcome& o) { return !o.gate.passed(); });
}

std::string to_string(Family f) {
    switch (f) {
        case Family::Gaussian:
            return "gaussian";
        case Family::Stable:
            return "stable";
        case Family::Gmm:
            return "gmm";
    }
    return "?";
}

std::string to_string(DimensionMode m) { return m == DimensionMode::PerFeature1D ? "1d" : "2d"; }

Family family_from_string(const std::string& s) {
    if (s == "gaussian") return Family::Gaussian;
    if (s == "stable") return Family::Stable;
    if (s == "gmm") return Family::Gmm;
    throw ConfigError("unknown model family '" + s + "'");
}

DimensionMode mode_from_string(const std::string& s) {
    if (s == "1d") return DimensionMode::PerFeature1D;
    if (s == "2d") return DimensionMode::Joint2D;
    throw ConfigError("unknown dimension mode '" + s + "'");
}

namespace {

GeneratorConfig generator_from_json(const nlohmann::json& j) {
    GeneratorConfig g;
    if (j.contains("preset")) {
        g = preset(j.at("preset").get<std::string>());
    } else {
        const auto fam = j.at("family").get<std::string>();
        if (fam == "gaussian") {
            g.family = GeneratorFamily::Gaussian;
            for (const auto& c : j.at("classes")) {
                GaussianClass gc;
                gc.name = c.at("name").get<std::string>();
                const auto m = c.at("mean").get<std::vector<double>>();
                const auto v = c.at("cov").get<std::vector<std::vector<double>>>();
                if (m.size() != 2 || v.size() != 2 || v[0].size() != 2 || v[1].size() != 2) {
                    throw ConfigError("gaussian classes need a 2-vector mean and a 2x2 covariance");
                }
                gc.mean << m[0], m[1];
                gc.cov << v[0][0], v[0][1], v[1][0], v[1][1];
                g.gaussian.push_back(gc);
            }
        } else if (fam == "stable") {
            g.family = GeneratorFamily::Stable;
            for (const auto& c : j.at("classes")) {
                StableClass sc;
                sc.name = c.at("name").get<std::string>();
                sc.law = spectral_from_json(c);
                g.stable.push_back(sc);
            }
        } else {
            throw ConfigError("generator family must be gaussian or stable");
        }
    }
    if (j.contains("n_per_class")) g.n_per_class = j.at("n_per_class").get<std::size_t>();
    if (j.contains("window")) {
        if (j.at("window").is_null()) {
            g.window.reset();
        } else {
            const auto w = j.at("window").get<std::vector<double>>();
            if (w.size() != 4 || !(w[0] < w[1] && w[2] < w[3])) throw ConfigError("window is [xmin, xmax, ymin, ymax]");
            g.window = Window{w[0], w[1], w[2], w[3]};
        }
    }
    return g;
}

nlohmann::json generator_to_json(const GeneratorConfig& g) {
    nlohmann::json classes = nlohmann::json::array();
    if (g.family == GeneratorFamily::Gaussian) {
        for (const auto& c : g.gaussian) {
            classes.push_back({{"name", c.name},
                               {"mean", {c.mean[0], c.mean[1]}},
                               {"cov", {{c.cov(0, 0), c.cov(0, 1)}, {c.cov(1, 0), c.cov(1, 1)}}}});
        }
    } else {
        for (const auto& c : g.stable) {
            auto j = to_json(c.law);
            j["name"] = c.name;
            classes.push_back(j);
        }
    }
    nlohmann::json out{{"family", g.family == GeneratorFamily::Gaussian ? "gaussian" : "stable"},
                       {"classes", classes},
                       {"n_per_class", g.n_per_class}};
    if (g.window) {
        out["window"] = {g.window->xmin, g.window->xmax, g.window->ymin, g.window->ymax};
    } else {
        out["window"] = nullptr;
    }
    return out;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
        ExperimentConfig c;
        if (!j.contains("generator")) throw ConfigError("experiment config needs a generator section");
        const auto& gen = j.at("generator");
        if (gen.contains("preset")) c.preset = gen.at("preset").get<std::string>();
        c.generator = generator_from_json(gen);
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("split")) {
            const auto& s = j.at("split");
            if (s.contains("p")) c.split_p = s.at("p").get<double>();
            if (s.contains("seed")) c.seed = s.at("seed").get<std::uint64_t>();
        }
        if (!(c.split_p > 0.0 && c.split_p < 1.0)) throw ConfigError("split.p must lie in (0,1)");
        if (j.contains("models")) {
            const auto& m = j.at("models");
            if (m.contains("family")) c.family = family_from_string(m.at("family").get<std::string>());
            if (m.contains("modes")) {
                c.modes.clear();
                for (const auto& s : m.at("modes")) c.modes.push_back(mode_from_string(s.get<std::string>()));
            }
            if (m.contains("gmm_components")) c.gmm_components = m.at("gmm_components").get<int>();
            if (m.contains("spectral_directions")) c.spectral_directions = m.at("spectral_directions").get<int>();
            if (m.contains("grid_resolution")) c.grid_resolution = m.at("grid_resolution").get<int>();
            if (m.contains("cut_levels")) c.cut_levels = m.at("cut_levels").get<int>();
            if (m.contains("priors") && !m.at("priors").is_null()) c.priors = m.at("priors").get<std::vector<double>>();
            if (m.contains("reject_policy")) {
                const auto r = m.at("reject_policy").get<std::string>();
                if (r == "count") {
                    c.reject_policy = RejectPolicy::Count;
                } else if (r == "uniform") {
                    c.reject_policy = RejectPolicy::Uniform;
                } else {
                    throw ConfigError("reject_policy must be count or uniform");
                }
            }
        }
        if (j.contains("gate")) {
            const auto& g = j.at("gate");
            if (g.contains("samples")) c.gate_samples = g.at("samples").get<std::size_t>();
            if (g.contains("enforce")) c.enforce_gate = g.at("enforce").get<bool>();
        }
        if (j.contains("classifiers")) {
            c.classifiers = j.at("classifiers").get<std::vector<std::string>>();
            for (const auto& s : c.classifiers) {
                if (s != "belief" && s != "bayes") throw ConfigError("classifiers are belief and bayes");
            }
        }
        if (c.modes.empty()) throw ConfigError("no dimension mode requested");
        if (c.gmm_components < 1) throw ConfigError("gmm_components must be positive");
        const std::size_t k = c.generator.family == GeneratorFamily::Gaussian ? c.generator.gaussian.size()
                                                                              : c.generator.stable.size();
        if (c.priors) {
            if (c.priors->size() != k) throw ConfigError("one prior per class is required");
            double total = 0.0;
            for (double p : *c.priors) {
                if (!(p > 0.0)) throw ConfigError("priors must be positive");
                total += p;
            }
            for (double& p : *c.priors) p /= total;
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed experiment config: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("invalid experiment config: ") + e.what());
    }
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json modes = nlohmann::json::array();
    for (auto m : c.modes) modes.push_back(to_string(m));
    nlohmann::json models{{"family", to_string(c.family)},
                          {"modes", modes},
                          {"gmm_components", c.gmm_components},
                          {"spectral_directions", c.spectral_directions},
                          {"grid_resolution", c.grid_resolution},
                          {"cut_levels", c.cut_levels},
                          {"reject_policy", c.reject_policy == RejectPolicy::Count ? "count" : "uniform"}};
    models["priors"] = c.priors ? nlohmann::json(*c.priors) : nlohmann::json(nullptr);
    nlohmann::json gen = generator_to_json(c.generator);
    if (!c.preset.empty()) gen["preset"] = c.preset;
    return {{"generator", gen},
            {"split", {{"p", c.split_p}, {"seed", c.seed}}},
            {"models", models},
            {"gate", {{"samples", c.gate_samples}, {"enforce", c.enforce_gate}}},
            {"classifiers", c.classifiers}};
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    return run_experiment(config, generate(config.generator, config.seed));
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data) {
    const auto [learn, test] = split(data, config.split_p, config.seed);
    ExperimentResult r;
    r.n_learn = learn.size();
    r.n_test = test.size();
    for (const DimensionMode mode : config.modes) {
        ModelSpec spec;
        spec.family = config.family;
        spec.mode = mode;
        spec.gmm_components = config.gmm_components;
        spec.spectral_directions = config.spectral_directions;
        spec.grid_resolution = config.grid_resolution;
        spec.cut_levels = config.cut_levels;
        spec.window = config.generator.window.value_or(Window{});
        spec.seed = config.seed;
        auto models = fit_models(learn, spec);
        if (config.priors) {
            if (config.priors->size() != models.size()) throw ConfigError("one prior per class is required");
            for (std::size_t c = 0; c < models.size(); ++c) models[c].prior = (*config.priors)[c];
        }
        ModeOutcome o;
        o.mode = mode;
        o.gate = ks_gate(models, learn, spec, config.gate_samples, config.seed);
        o.models = nlohmann::json::array();
        for (const auto& m : models) {
            nlohmann::json mj{{"class", m.name}, {"prior", m.prior}};
            if (mode == DimensionMode::PerFeature1D) {
                for (const auto& l : m.per_feature) mj["features"].push_back(l.to_json());
            } else {
                mj["joint"] = m.joint->to_json();
            }
            o.models.push_back(mj);
        }
        if (o.gate.passed() || !config.enforce_gate) {
            o.classified = true;
            const int k = learn.n_classes();
            for (const auto& name : config.classifiers) {
                ClassifierResult cr;
                cr.classifier = name;
                cr.mode = mode;
                cr.n_test = test.size();
                cr.confusion = Eigen::MatrixXi::Zero(k, k);
                std::size_t correct = 0;
                for (std::size_t i = 0; i < test.size(); ++i) {
                    const Eigen::VectorXd x = test.features.row(static_cast<Eigen::Index>(i)).transpose();
                    const Decision d = name == "belief" ? classify_belief(models, x, mode, config.reject_policy)
                                                        : classify_bayes(models, x, mode);
                    if (!d.label) {
                        ++cr.rejected;
                        cr.predictions.push_back(-1);
                        continue;
                    }
                    cr.predictions.push_back(*d.label);
                    cr.confusion(test.labels[i], *d.label) += 1;
                    if (*d.label == test.labels[i]) ++correct;
                }
                cr.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(test.size());
                cr.ci95 = wilson_interval(correct, test.size());
                o.results.push_back(std::move(cr));
            }
        }
        r.outcomes.push_back(std::move(o));
    }
    return r;
}

nlohmann::json to_json(const GateResult& g) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : g.entries) {
        rows.push_back({{"class", e.class_name},
                        {"feature", e.feature},
                        {"ksstat", e.report.ksstat},
                        {"p_value", e.report.p_value},
                        {"n", e.report.n_samples},
                        {"pass", e.report.pass_at_5pct}});
    }
    return {{"passed", g.passed()}, {"entries", rows}};
}

nlohmann::json to_json(const ExperimentResult& r) {
    nlohmann::json out{{"n_learn", r.n_learn}, {"n_test", r.n_test}, {"gate_failed", r.gate_failed()}};
    out["outcomes"] = nlohmann::json::array();
    for (const auto& o : r.outcomes) {
        nlohmann::json oj{{"mode", to_string(o.mode)}, {"gate", to_json(o.gate)}, {"classified", o.classified},
                          {"models", o.models}};
        oj["results"] = nlohmann::json::array();
        for (const auto& c : o.results) {
            nlohmann::json conf = nlohmann::json::array();
            for (Eigen::Index i = 0; i < c.confusion.rows(); ++i) {
                std::vector<int> row(c.confusion.cols());
                for (Eigen::Index k = 0; k < c.confusion.cols(); ++k) row[k] = c.confusion(i, k);
                conf.push_back(row);
            }
            oj["results"].push_back({{"classifier", c.classifier},
                                     {"accuracy", c.accuracy},
                                     {"ci95", {c.ci95.lo, c.ci95.hi}},
                                     {"rejected", c.rejected},
                                     {"n_test", c.n_test},
                                     {"confusion", conf}});
        }
        out["outcomes"].push_back(oj);
    }
    return out;
}

void write_dataset_csv(const Dataset& d, std::ostream& out) {
    out << "label";
    for (const auto& f : d.feature_names) out << ',' << f;
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << d.class_names[static_cast<std::size_t>(d.labels[i])];
        for (Eigen::Index j = 0; j < d.features.cols(); ++j) out << ',' << d.features(static_cast<Eigen::Index>(i), j);
        out << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    // Skip provenance comments.
    while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
    }
    if (line.rfind("label", 0) != 0) throw ConfigError("dataset CSV must start with a label,... header");
    Dataset d;
    {
        std::stringstream hs(line);
        std::string cell;
        std::getline(hs, cell, ',');
        while (std::getline(hs, cell, ',')) d.feature_names.push_back(cell);
    }
    const auto dim = static_cast<Eigen::Index>(d.feature_names.size());
    if (dim < 1 || dim > 2) throw ConfigError("dataset CSV must hold one or two features");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        auto it = std::find(d.class_names.begin(), d.class_names.end(), cell);
        if (it == d.class_names.end()) {
            d.class_names.push_back(cell);
            it = d.class_names.end() - 1;
        }
        d.labels.push_back(static_cast<int>(it - d.class_names.begin()));
        for (Eigen::Index j = 0; j < dim; ++j) {
            if (!std::getline(ls, cell, ',')) throw ConfigError("short row in dataset CSV");
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("non-numeric feature value '" + cell + "'");
            }
        }
    }
    d.features.resize(static_cast<Eigen::Index>(d.labels.size()), dim);
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) d.features(static_cast<Eigen::Index>(i), j) = values[i * dim + j];
    }
    try {
        d.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("bad dataset: ") + e.what());
    }
    return d;
}

}  // namespace sb
