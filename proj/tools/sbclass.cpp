// Command-line front end: data generation, fitting, K-S validation,
// classification, experiments and plot data.

#include "CLI11.hpp"
#include "json.hpp"

#include "stablebelief/demo.hpp"
#include "stablebelief/error.hpp"
#include "stablebelief/pipeline.hpp"
#include "stablebelief/provenance.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitGate = 2;
constexpr int kExitEstimator = 3;
constexpr int kExitConfig = 4;
constexpr const char* kOutEnv = "SB_OUT_DIR";

struct GateFailure {
    sb::GateResult gate;
};

// Flags shared by the subcommands.
struct Common {
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::string out = "out";
    std::string preset;
    std::string config;
    std::string data;
    std::string family;
    std::vector<std::string> modes;
    int gmm_k = 0;
    int grid = 0;
    std::size_t gate_samples = 0;
    bool gate_samples_given = false;
    bool no_gate = false;
    std::vector<double> priors;
    std::string reject;
    double split_p = 0.0;
};

class Output {
public:
    Output(const std::string& flag_dir, std::uint64_t seed, std::string hash) : seed_(seed), hash_(std::move(hash)) {
        const char* env = std::getenv(kOutEnv);
        dir_ = (env && *env) ? fs::path(env) : fs::path(flag_dir);
        fs::create_directories(dir_);
    }

    std::ofstream csv(const std::string& name) const {
        std::ofstream f(path(name));
        if (!f) throw sb::ConfigError("cannot write " + path(name).string());
        f << sb::header_line(seed_, hash_) << '\n';
        f.precision(10);
        return f;
    }

    void write_json(const std::string& name, const json& body) const {
        nlohmann::ordered_json o;
        o["header"] = sb::header_line(seed_, hash_);
        o["body"] = nlohmann::ordered_json::parse(body.dump());
        std::ofstream f(path(name));
        if (!f) throw sb::ConfigError("cannot write " + path(name).string());
        f << o.dump(2) << '\n';
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

private:
    fs::path dir_;
    std::uint64_t seed_;
    std::string hash_;
};

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw sb::ConfigError("cannot read " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw sb::ConfigError(path + ": " + e.what());
    }
}

// Presets pick the family that matches their generator.
sb::ExperimentConfig base_config(const Common& c) {
    sb::ExperimentConfig cfg;
    if (!c.config.empty()) {
        json j = read_json_file(c.config);
        if (!j.contains("generator")) j = json{{"generator", j}};
        cfg = sb::experiment_config_from_json(j);
    } else {
        const std::string name = c.preset.empty() ? "stable3" : c.preset;
        cfg.preset = name;
        cfg.generator = sb::preset(name);
        cfg.family = name == "gauss3" ? sb::Family::Gaussian : sb::Family::Stable;
    }
    if (!c.config.empty() && !c.preset.empty()) throw sb::ConfigError("--preset and --config are exclusive");
    if (c.seed_given) cfg.seed = c.seed;
    if (!c.family.empty()) cfg.family = sb::family_from_string(c.family);
    if (!c.modes.empty()) {
        cfg.modes.clear();
        for (const auto& m : c.modes) cfg.modes.push_back(sb::mode_from_string(m));
    }
    if (c.gmm_k > 0) cfg.gmm_components = c.gmm_k;
    if (c.grid > 0) cfg.grid_resolution = c.grid;
    if (c.gate_samples_given) cfg.gate_samples = c.gate_samples;
    if (c.no_gate) cfg.enforce_gate = false;
    if (!c.priors.empty()) {
        double total = 0.0;
        for (double p : c.priors) {
            if (!(p > 0.0)) throw sb::ConfigError("priors must be positive");
            total += p;
        }
        cfg.priors = c.priors;
        for (double& p : *cfg.priors) p /= total;
    }
    if (!c.reject.empty()) {
        if (c.reject == "count") {
            cfg.reject_policy = sb::RejectPolicy::Count;
        } else if (c.reject == "uniform") {
            cfg.reject_policy = sb::RejectPolicy::Uniform;
        } else {
            throw sb::ConfigError("--reject is count or uniform");
        }
    }
    if (c.split_p != 0.0) cfg.split_p = c.split_p;
    return cfg;
}

json effective(const sb::ExperimentConfig& cfg, const Common& c) {
    json j = sb::to_json(cfg);
    if (!c.data.empty()) j["data"] = fs::path(c.data).filename().string();
    return j;
}

sb::Dataset load_or_generate(const Common& c, const sb::ExperimentConfig& cfg) {
    if (c.data.empty()) return sb::generate(cfg.generator, cfg.seed);
    std::ifstream f(c.data);
    if (!f) throw sb::ConfigError("cannot read " + c.data);
    return sb::read_dataset_csv(f);
}

sb::ModelSpec spec_for(const sb::ExperimentConfig& cfg, sb::DimensionMode mode) {
    sb::ModelSpec s;
    s.family = cfg.family;
    s.mode = mode;
    s.gmm_components = cfg.gmm_components;
    s.spectral_directions = cfg.spectral_directions;
    s.grid_resolution = cfg.grid_resolution;
    s.cut_levels = cfg.cut_levels;
    s.window = cfg.generator.window.value_or(sb::Window{});
    s.seed = cfg.seed;
    return s;
}

void write_gate_rows(std::ostream& out, const std::string& mode, const sb::GateResult& g) {
    for (const auto& e : g.entries) {
        out << mode << ',' << e.class_name << ',' << e.feature << ',' << e.report.p_value << ',' << e.report.ksstat
            << ',' << e.report.n_samples << ',' << (e.report.pass_at_5pct ? 1 : 0) << '\n';
    }
}

void print_gate_failures(const sb::GateResult& g) {
    for (const auto* e : g.failures()) {
        std::cerr << "K-S gate: class " << e->class_name << " feature " << e->feature << " rejected (p = "
                  << e->report.p_value << ")\n";
    }
}

// ----- subcommands --------------------------------------------------------------

int cmd_gen(const Common& c, std::size_t n_per_class, bool no_window, const std::string& name) {
    sb::ExperimentConfig cfg = base_config(c);
    if (n_per_class > 0) cfg.generator.n_per_class = n_per_class;
    if (no_window) cfg.generator.window.reset();
    const Output out(c.out, cfg.seed, sb::config_hash(sb::to_json(cfg)["generator"]));
    const sb::Dataset d = sb::generate(cfg.generator, cfg.seed);
    auto f = out.csv(name);
    f.precision(17);
    sb::write_dataset_csv(d, f);
    std::cout << "wrote " << d.size() << " rows to " << out.path(name).string() << '\n';
    return 0;
}

int cmd_fit(const Common& c, bool whole) {
    const sb::ExperimentConfig cfg = base_config(c);
    const Output out(c.out, cfg.seed, sb::config_hash(effective(cfg, c)));
    const sb::Dataset d = load_or_generate(c, cfg);
    const sb::Dataset learn = whole ? d : sb::split(d, cfg.split_p, cfg.seed).first;
    json body{{"config", effective(cfg, c)}, {"n_learn", learn.size()}, {"modes", json::array()}};
    for (const auto mode : cfg.modes) {
        const auto models = sb::fit_models(learn, spec_for(cfg, mode));
        json mj{{"mode", sb::to_string(mode)}, {"classes", json::array()}};
        for (const auto& m : models) {
            json cj{{"class", m.name}, {"prior", m.prior}};
            if (mode == sb::DimensionMode::PerFeature1D) {
                for (const auto& l : m.per_feature) cj["features"].push_back(l.to_json());
            } else {
                cj["joint"] = m.joint->to_json();
            }
            mj["classes"].push_back(cj);
        }
        body["modes"].push_back(mj);
    }
    out.write_json("models.json", body);
    std::cout << "wrote " << out.path("models.json").string() << '\n';
    return 0;
}

int cmd_ks(const Common& c, bool whole) {
    const sb::ExperimentConfig cfg = base_config(c);
    const Output out(c.out, cfg.seed, sb::config_hash(effective(cfg, c)));
    const sb::Dataset d = load_or_generate(c, cfg);
    const sb::Dataset learn = whole ? d : sb::split(d, cfg.split_p, cfg.seed).first;
    auto f = out.csv("ks.csv");
    f << "mode,class,feature,p_value,ksstat,n,pass\n";
    bool failed = false;
    for (const auto mode : cfg.modes) {
        const auto spec = spec_for(cfg, mode);
        const auto gate = sb::ks_gate(sb::fit_models(learn, spec), learn, spec, cfg.gate_samples, cfg.seed);
        write_gate_rows(f, sb::to_string(mode), gate);
        if (!gate.passed()) {
            failed = true;
            print_gate_failures(gate);
        }
    }
    std::cout << "wrote " << out.path("ks.csv").string() << (failed ? " (gate failed)" : " (gate passed)") << '\n';
    return failed && cfg.enforce_gate ? kExitGate : 0;
}

int cmd_classify(const Common& c, const std::string& test_path) {
    const sb::ExperimentConfig cfg = base_config(c);
    json eff = effective(cfg, c);
    if (!test_path.empty()) eff["test"] = fs::path(test_path).filename().string();
    const Output out(c.out, cfg.seed, sb::config_hash(eff));
    const sb::Dataset d = load_or_generate(c, cfg);
    sb::Dataset learn;
    sb::Dataset test;
    if (test_path.empty()) {
        std::tie(learn, test) = sb::split(d, cfg.split_p, cfg.seed);
    } else {
        learn = d;
        std::ifstream f(test_path);
        if (!f) throw sb::ConfigError("cannot read " + test_path);
        test = sb::read_dataset_csv(f);
        if (test.dim() != learn.dim()) throw sb::ConfigError("test and learning sets differ in dimension");
        // Map test labels onto the learning class list; unknown names become -1.
        for (auto& l : test.labels) {
            const auto& name = test.class_names[static_cast<std::size_t>(l)];
            const auto it = std::find(learn.class_names.begin(), learn.class_names.end(), name);
            l = it == learn.class_names.end() ? -1 : static_cast<int>(it - learn.class_names.begin());
        }
    }
    auto f = out.csv("predictions.csv");
    f << "row,mode,classifier,true,decision,conflict";
    for (const auto& n : learn.class_names) f << ",score_" << n;
    f << '\n';
    auto name_of = [&](int l) { return l < 0 ? std::string("?") : learn.class_names[static_cast<std::size_t>(l)]; };
    for (const auto mode : cfg.modes) {
        const auto spec = spec_for(cfg, mode);
        auto models = sb::fit_models(learn, spec);
        if (cfg.priors) {
            if (cfg.priors->size() != models.size()) throw sb::ConfigError("one prior per class is required");
            for (std::size_t k = 0; k < models.size(); ++k) models[k].prior = (*cfg.priors)[k];
        }
        const auto gate = sb::ks_gate(models, learn, spec, cfg.gate_samples, cfg.seed);
        if (!gate.passed() && cfg.enforce_gate) throw GateFailure{gate};
        for (std::size_t i = 0; i < test.size(); ++i) {
            const Eigen::VectorXd x = test.features.row(static_cast<Eigen::Index>(i)).transpose();
            for (const auto& clf : cfg.classifiers) {
                const sb::Decision dec = clf == "belief" ? sb::classify_belief(models, x, mode, cfg.reject_policy)
                                                         : sb::classify_bayes(models, x, mode);
                f << i << ',' << sb::to_string(mode) << ',' << clf << ',' << name_of(test.labels[i]) << ','
                  << (dec.label ? name_of(*dec.label) : std::string("reject")) << ',' << dec.conflict;
                for (double s : dec.scores) f << ',' << s;
                f << '\n';
            }
        }
    }
    std::cout << "wrote " << out.path("predictions.csv").string() << '\n';
    return 0;
}

int cmd_experiment(const Common& c) {
    const sb::ExperimentConfig cfg = base_config(c);
    const Output out(c.out, cfg.seed, sb::config_hash(effective(cfg, c)));
    const sb::ExperimentResult r =
        c.data.empty() ? sb::run_experiment(cfg) : sb::run_experiment(cfg, load_or_generate(c, cfg));
    out.write_json("result.json", json{{"config", effective(cfg, c)}, {"result", sb::to_json(r)}});

    auto acc = out.csv("accuracy.csv");
    acc << "mode,classifier,accuracy,ci_lo,ci_hi,rejected,n_test\n";
    auto ks = out.csv("ks.csv");
    ks << "mode,class,feature,p_value,ksstat,n,pass\n";
    auto conf = out.csv("confusion.csv");
    conf << "mode,classifier,true,predicted,count\n";
    for (const auto& o : r.outcomes) {
        const std::string mode = sb::to_string(o.mode);
        write_gate_rows(ks, mode, o.gate);
        if (!o.gate.passed()) print_gate_failures(o.gate);
        for (const auto& res : o.results) {
            acc << mode << ',' << res.classifier << ',' << res.accuracy << ',' << res.ci95.lo << ',' << res.ci95.hi
                << ',' << res.rejected << ',' << res.n_test << '\n';
            for (Eigen::Index i = 0; i < res.confusion.rows(); ++i) {
                for (Eigen::Index k = 0; k < res.confusion.cols(); ++k) {
                    conf << mode << ',' << res.classifier << ',' << i << ',' << k << ',' << res.confusion(i, k)
                         << '\n';
                }
            }
            std::cout << mode << ' ' << res.classifier << ": " << res.accuracy << " % [" << res.ci95.lo << "; "
                      << res.ci95.hi << "]\n";
        }
        if (!o.classified) std::cout << mode << ": not classified, K-S gate failed\n";
    }
    return r.gate_failed() && cfg.enforce_gate ? kExitGate : 0;
}

struct LawFlags {
    double alpha = 1.5;
    double beta = 0.0;
    double gamma = 1.0;
    double delta = 0.0;
    sb::StableParams params() const {
        sb::StableParams p{alpha, beta, gamma, delta};
        p.validate();
        return p;
    }
};

json law_json(const sb::StableParams& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"delta", p.delta}};
}

int cmd_plot_1d(const Common& c, const LawFlags& lf, double from, double to, int points, bool pl) {
    const sb::StableParams p = lf.params();
    if (points < 2 || !(to > from)) throw sb::ConfigError("need --points >= 2 and --from < --to");
    const Output out(c.out, c.seed, sb::config_hash(law_json(p)));
    const std::string name = pl ? "plcurve.csv" : "pdf1d.csv";
    auto f = out.csv(name);
    f << (pl ? "x,pdf,pl\n" : "x,pdf,cdf\n");
    for (int i = 0; i < points; ++i) {
        const double x = from + (to - from) * i / (points - 1);
        f << x << ',' << sb::pdf(p, x) << ',' << (pl ? sb::pl_stable_1d(p, x) : sb::cdf(p, x)) << '\n';
    }
    std::cout << "wrote " << out.path(name).string() << '\n';
    return 0;
}

int cmd_plot_2d(const Common& c, const std::string& cls, const std::string& law_path, int resolution) {
    sb::SpectralStable2D law;
    json key;
    if (!law_path.empty()) {
        key = read_json_file(law_path);
        try {
            law = sb::spectral_from_json(key);
        } catch (const sb::InvalidArgument& e) {
            throw sb::ConfigError(e.what());
        }
    } else {
        const auto g = sb::preset_stable3();
        const auto it = std::find_if(g.stable.begin(), g.stable.end(), [&](const auto& s) { return s.name == cls; });
        if (it == g.stable.end()) throw sb::ConfigError("unknown stable3 class " + cls);
        law = it->law;
        key = sb::to_json(law);
    }
    key["resolution"] = resolution;
    const Output out(c.out, c.seed, sb::config_hash(key));
    const auto grid = sb::pdf_grid(law, sb::Window{}, resolution);
    auto f = out.csv("pdf2d.csv");
    sb::write_csv(grid, f);
    std::cout << "wrote " << out.path("pdf2d.csv").string() << " (window mass " << grid.mass() << ")\n";
    return 0;
}

int cmd_plot_runningvar(const Common& c, const LawFlags& lf, std::size_t n, std::size_t stride) {
    const sb::StableParams p = lf.params();
    json key = law_json(p);
    key["n"] = n;
    key["stride"] = stride;
    const Output out(c.out, c.seed, sb::config_hash(key));
    const auto xs = sb::sample(p, n, c.seed);
    const auto trace = sb::running_variance(xs, stride);
    auto f = out.csv("runningvar.csv");
    f << "n,variance\n";
    for (std::size_t i = 0; i < trace.ns.size(); ++i) f << trace.ns[i] << ',' << trace.variances[i] << '\n';
    std::cout << "wrote " << out.path("runningvar.csv").string() << '\n';
    return 0;
}

int cmd_plot_gmmsweep(const Common& c, int kmax, const std::string& mode_name) {
    sb::ExperimentConfig cfg = base_config(c);
    const auto mode = sb::mode_from_string(mode_name);
    json key = effective(cfg, c);
    key["kmax"] = kmax;
    key["sweep_mode"] = mode_name;
    const Output out(c.out, cfg.seed, sb::config_hash(key));
    const sb::Dataset d = load_or_generate(c, cfg);
    const auto rows = sb::gmm_sweep(cfg, d, kmax, mode);
    // Single stable reference on the same split.
    sb::ExperimentConfig ref = cfg;
    ref.family = sb::Family::Stable;
    ref.modes = {mode};
    ref.enforce_gate = false;
    ref.classifiers = {"belief", "bayes"};
    const auto rr = sb::run_experiment(ref, d);
    auto f = out.csv("gmmsweep.csv");
    f << "model,k,gate_passed,belief_accuracy,bayes_accuracy\n";
    for (const auto& r : rows) {
        f << "gmm," << r.k << ',' << (r.gate_passed ? 1 : 0) << ',' << r.belief_accuracy << ',' << r.bayes_accuracy
          << '\n';
        std::cout << "gmm k=" << r.k << (r.gate_passed ? " gate ok" : " gate rejected") << " belief "
                  << r.belief_accuracy << " bayes " << r.bayes_accuracy << '\n';
    }
    const auto& o = rr.outcomes.front();
    f << "stable,0," << (o.gate.passed() ? 1 : 0) << ',' << o.results[0].accuracy << ',' << o.results[1].accuracy
      << '\n';
    std::cout << "wrote " << out.path("gmmsweep.csv").string() << '\n';
    return 0;
}

int cmd_demo_aircraft(const Common& c, double from, double to, double step) {
    const auto fixture = sb::aircraft_fixture();
    json key{{"from", from}, {"to", to}, {"step", step}};
    for (const auto& a : fixture) key["classes"].push_back({{"name", a.name}, {"law", law_json(a.law)}});
    const Output out(c.out, c.seed, sb::config_hash(key));
    const auto rows = sb::aircraft_sweep(from, to, step);
    std::vector<std::string> names;
    for (const auto& a : fixture) names.push_back(a.name);
    auto f = out.csv("aircraft.csv");
    f << "speed";
    for (const char* tag : {"pl_stable_", "pl_chi2_", "betp_"}) {
        for (const auto& n : names) f << ',' << tag << n;
    }
    for (std::size_t s = 0; s < 8; ++s) {
        f << ",m_";
        if (s == 0) f << "empty";
        bool first = true;
        for (std::size_t k = 0; k < 3; ++k) {
            if (s & (std::size_t{1} << k)) {
                f << (first ? "" : "+") << names[k];
                first = false;
            }
        }
    }
    f << ",decision_stable,decision_chi2\n";
    std::size_t mismatches = 0;
    for (const auto& r : rows) {
        f << r.speed;
        for (double v : r.pl_stable) f << ',' << v;
        for (double v : r.pl_chi2) f << ',' << v;
        for (double v : r.betp) f << ',' << v;
        for (double v : r.masses) f << ',' << v;
        f << ',' << names[static_cast<std::size_t>(r.decision_stable)] << ','
          << names[static_cast<std::size_t>(r.decision_chi2)] << '\n';
        if (r.decision_stable != r.decision_chi2) {
            ++mismatches;
            std::cerr << "decision mismatch at speed " << r.speed << '\n';
        }
    }
    std::cout << "wrote " << out.path("aircraft.csv").string() << "; " << rows.size() << " speeds, "
              << (mismatches == 0 ? "decisions agree everywhere" : "decisions DIFFER") << '\n';
    return mismatches == 0 ? 0 : 1;
}

void add_common(CLI::App* sub, Common& c, bool models) {
    sub->add_option("--seed", c.seed, "random seed (default 1)")->each([&c](const std::string&) { c.seed_given = true; });
    sub->add_option("--out", c.out, std::string("output directory; ") + kOutEnv + " overrides it")
        ->capture_default_str();
    sub->add_option("--preset", c.preset, "gauss3 or stable3");
    sub->add_option("--config", c.config, "experiment config JSON (or a bare generator object)");
    if (!models) return;
    sub->add_option("--data", c.data, "dataset CSV (label,x1[,x2]); generated from the config when absent");
    sub->add_option("--family", c.family, "gaussian, stable or gmm");
    sub->add_option("--mode", c.modes, "1d and/or 2d");
    sub->add_option("--gmm-k", c.gmm_k, "GMM component count");
    sub->add_option("--grid", c.grid, "2D density grid resolution (power of two)");
    sub->add_option("--gate-samples", c.gate_samples, "K-S sample size per class (0 = all)")
        ->each([&c](const std::string&) { c.gate_samples_given = true; });
    sub->add_flag("--no-gate", c.no_gate, "classify even when the K-S gate fails");
    sub->add_option("--priors", c.priors, "class priors overriding learned proportions");
    sub->add_option("--reject", c.reject, "count or uniform");
    sub->add_option("--split", c.split_p, "learning fraction");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evidential classification with alpha-stable class models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sb::version());
    Common c;

    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    add_common(gen, c, false);
    std::size_t n_per_class = 0;
    bool no_window = false;
    std::string gen_name = "dataset.csv";
    gen->add_option("--n", n_per_class, "samples per class");
    gen->add_flag("--no-window", no_window, "keep samples outside the [-4,4]^2 window");
    gen->add_option("--name", gen_name, "output file name")->capture_default_str();

    bool whole = false;
    auto* fit = app.add_subcommand("fit", "fit per-class models");
    add_common(fit, c, true);
    fit->add_flag("--whole", whole, "fit on every row instead of the learning split");

    auto* ks = app.add_subcommand("ks", "K-S validation of fitted models");
    add_common(ks, c, true);
    ks->add_flag("--whole", whole, "test every row instead of the learning split");

    std::string test_path;
    auto* classify = app.add_subcommand("classify", "classify test samples");
    add_common(classify, c, true);
    classify->add_option("--test", test_path, "points to classify; models are then fitted on all of --data");

    auto* experiment = app.add_subcommand("experiment", "full split/fit/gate/classify run");
    add_common(experiment, c, true);

    auto* plot = app.add_subcommand("plotdata", "numeric series behind the figures");
    plot->require_subcommand(1);
    LawFlags lf;
    double from = -10, to = 10;
    int points = 401;
    auto law_opts = [&lf](CLI::App* s) {
        s->add_option("--alpha", lf.alpha, "stability index in (0,2]")->capture_default_str();
        s->add_option("--beta", lf.beta, "skewness")->capture_default_str();
        s->add_option("--gamma", lf.gamma, "scale")->capture_default_str();
        s->add_option("--delta", lf.delta, "location (S0)")->capture_default_str();
    };
    auto* pdf1d = plot->add_subcommand("pdf1d", "x, pdf, cdf of a univariate law");
    auto* plcurve = plot->add_subcommand("plcurve", "x, pdf, plausibility of a univariate law");
    for (auto* s : {pdf1d, plcurve}) {
        add_common(s, c, false);
        law_opts(s);
        s->add_option("--from", from, "first abscissa")->capture_default_str();
        s->add_option("--to", to, "last abscissa")->capture_default_str();
        s->add_option("--points", points, "number of abscissae")->capture_default_str();
    }
    auto* pdf2d = plot->add_subcommand("pdf2d", "bivariate density on the [-4,4]^2 grid");
    add_common(pdf2d, c, false);
    std::string cls = "C1", law_path;
    int resolution = 256;
    pdf2d->add_option("--class", cls, "stable3 class name")->capture_default_str();
    pdf2d->add_option("--law", law_path, "spectral law JSON {alpha, weights, angles, delta}");
    pdf2d->add_option("--resolution", resolution)->capture_default_str();
    auto* runvar = plot->add_subcommand("runningvar", "running sample variance of stable draws");
    add_common(runvar, c, false);
    law_opts(runvar);
    std::size_t rv_n = 100000, rv_stride = 1000;
    runvar->add_option("--n", rv_n)->capture_default_str();
    runvar->add_option("--stride", rv_stride)->capture_default_str();
    auto* gmmsweep = plot->add_subcommand("gmmsweep", "accuracy against GMM component count");
    add_common(gmmsweep, c, true);
    int kmax = 5;
    std::string sweep_mode = "2d";
    gmmsweep->add_option("--kmax", kmax)->capture_default_str();
    gmmsweep->add_option("--sweep-mode", sweep_mode, "1d or 2d")->capture_default_str();

    auto* aircraft = app.add_subcommand("demo-aircraft", "three-class speed example");
    add_common(aircraft, c, false);
    double a_from = 650, a_to = 780, a_step = 1;
    aircraft->add_option("--from", a_from, "lowest speed")->capture_default_str();
    aircraft->add_option("--to", a_to, "highest speed")->capture_default_str();
    aircraft->add_option("--step", a_step, "speed step")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*gen) return cmd_gen(c, n_per_class, no_window, gen_name);
        if (*fit) return cmd_fit(c, whole);
        if (*ks) return cmd_ks(c, whole);
        if (*classify) return cmd_classify(c, test_path);
        if (*experiment) return cmd_experiment(c);
        if (*pdf1d) return cmd_plot_1d(c, lf, from, to, points, false);
        if (*plcurve) return cmd_plot_1d(c, lf, from, to, points, true);
        if (*pdf2d) return cmd_plot_2d(c, cls, law_path, resolution);
        if (*runvar) return cmd_plot_runningvar(c, lf, rv_n, rv_stride);
        if (*gmmsweep) return cmd_plot_gmmsweep(c, kmax, sweep_mode);
        if (*aircraft) return cmd_demo_aircraft(c, a_from, a_to, a_step);
    } catch (const GateFailure& g) {
        print_gate_failures(g.gate);
        return kExitGate;
    } catch (const sb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sb::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sb::EstimatorFailure& e) {
        std::cerr << "estimator failure: " << e.what() << '\n';
        return kExitEstimator;
    } catch (const sb::Error& e) {
        std::cerr << "estimator failure: " << e.what() << '\n';
        return kExitEstimator;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
