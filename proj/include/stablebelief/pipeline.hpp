#pragma once

// Supervised evidential classification: generate or load data, split, fit
// per-class laws, validate them with a K-S gate, then classify with the
// belief (GBT + conjunctive combination + pignistic) and Bayes rules.

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "stablebelief/belief.hpp"
#include "stablebelief/bivariate.hpp"
#include "stablebelief/continuous.hpp"
#include "stablebelief/gmm.hpp"
#include "stablebelief/stats.hpp"
#include "stablebelief/tabulated.hpp"

namespace sb {

struct Dataset {
    Eigen::MatrixXd features;  // N x d, d <= 2
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    std::size_t size() const { return labels.size(); }
    int dim() const { return static_cast<int>(features.cols()); }
    int n_classes() const { return static_cast<int>(class_names.size()); }
    /// Throws InvalidArgument on shape mismatch, non-finite entries or bad labels.
    void validate() const;
    Dataset subset(const std::vector<std::size_t>& rows) const;
    Eigen::MatrixXd rows_of(int label) const;
};

// ----- generation ------------------------------------------------------------

struct GaussianClass {
    std::string name;
    Eigen::Vector2d mean;
    Eigen::Matrix2d cov;
};

struct StableClass {
    std::string name;
    SpectralStable2D law;
};

enum class GeneratorFamily { Gaussian, Stable };

struct GeneratorConfig {
    GeneratorFamily family = GeneratorFamily::Gaussian;
    std::vector<GaussianClass> gaussian;
    std::vector<StableClass> stable;
    std::size_t n_per_class = 3000;
    /// Samples outside the window are redrawn; nullopt keeps everything.
    std::optional<Window> window = Window{};
};

/// Table-1 style Gaussian classes and Table-4 style stable classes.
GeneratorConfig preset_gauss3();
GeneratorConfig preset_stable3();
/// Throws ConfigError for unknown names.
GeneratorConfig preset(const std::string& name);

Dataset generate(const GeneratorConfig& config, std::uint64_t seed);

/// floor(N p) rows to the learning set, the rest to the test set.
std::pair<Dataset, Dataset> split(const Dataset& data, double p, std::uint64_t seed);

// ----- models ----------------------------------------------------------------

enum class Family { Gaussian, Stable, Gmm };
enum class DimensionMode { PerFeature1D, Joint2D };

struct ModelSpec {
    Family family = Family::Stable;
    DimensionMode mode = DimensionMode::PerFeature1D;
    int gmm_components = 4;
    int spectral_directions = 4;
    int grid_resolution = 512;
    Window window{};
    int cut_levels = 256;
    std::uint64_t seed = 0;
};

/// One fitted 1D law.
struct Law1D {
    Family family = Family::Gaussian;
    GaussianParams gaussian;
    std::shared_ptr<const TabulatedStable> stable;
    GmmModel gmm;  // one-dimensional mixture

    double pdf(double x) const;
    double cdf(double x) const;
    /// Consonant plausibility of x.
    double pl(double x) const;
    nlohmann::json to_json() const;
};

/// One fitted 2D law.
struct Law2D {
    Family family = Family::Gaussian;
    MvGaussian gaussian;
    GmmModel gmm;
    SpectralStable2D stable;
    std::shared_ptr<const TabulatedPdf2D> grid;
    std::shared_ptr<const CutTable> cuts;
    std::vector<std::shared_ptr<const TabulatedStable>> marginals;

    double pdf(const Point2& x) const;
    double pl(const Point2& x) const;
    /// Marginal cdf of one coordinate, for the K-S gate.
    double marginal_cdf(int feature, double x) const;
    nlohmann::json to_json() const;
};

struct ClassModel {
    int label = 0;
    std::string name;
    double prior = 0.0;
    std::vector<Law1D> per_feature;
    std::optional<Law2D> joint;
};

/// Per-class fits; priors are class proportions in `learn`. Estimator errors
/// are rethrown as EstimatorFailure carrying the class name.
std::vector<ClassModel> fit_models(const Dataset& learn, const ModelSpec& spec);

// ----- K-S gate ----------------------------------------------------------------

struct GateEntry {
    int label = 0;
    std::string class_name;
    int feature = 0;
    KsReport report;
};

struct GateResult {
    std::vector<GateEntry> entries;
    bool passed() const;
    std::vector<const GateEntry*> failures() const;
};

/// K-S of each class/feature against the fitted (marginal) cdf, on a random
/// subsample of `gate_samples` learning points per class (all when 0).
GateResult ks_gate(const std::vector<ClassModel>& models, const Dataset& learn, const ModelSpec& spec,
                   std::size_t gate_samples, std::uint64_t seed);

// ----- classification ----------------------------------------------------------

enum class RejectPolicy { Count, Uniform };

struct Decision {
    std::optional<int> label;  // nullopt = rejected (total conflict)
    std::vector<double> scores;  // betP or posterior
    double conflict = 0.0;
};

Decision classify_belief(const std::vector<ClassModel>& models, const Eigen::VectorXd& x, DimensionMode mode,
                         RejectPolicy policy = RejectPolicy::Count);
Decision classify_bayes(const std::vector<ClassModel>& models, const Eigen::VectorXd& x, DimensionMode mode);

// ----- experiments -------------------------------------------------------------

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval in percent.
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

struct ClassifierResult {
    std::string classifier;  // "belief" or "bayes"
    DimensionMode mode = DimensionMode::PerFeature1D;
    double accuracy = 0.0;  // percent, rejects count as errors
    Interval ci95;
    Eigen::MatrixXi confusion;
    std::size_t rejected = 0;
    std::size_t n_test = 0;
    std::vector<int> predictions;  // -1 for rejects
};

struct ExperimentConfig {
    std::string preset;  // informational
    GeneratorConfig generator;
    double split_p = 1.0 / 3.0;
    std::uint64_t seed = 1;
    Family family = Family::Stable;
    std::vector<DimensionMode> modes{DimensionMode::PerFeature1D, DimensionMode::Joint2D};
    std::vector<std::string> classifiers{"belief", "bayes"};
    int gmm_components = 4;
    int spectral_directions = 4;
    int grid_resolution = 512;
    int cut_levels = 256;
    std::size_t gate_samples = 170;
    bool enforce_gate = true;
    std::optional<std::vector<double>> priors;  // overrides learned proportions
    RejectPolicy reject_policy = RejectPolicy::Count;
};

struct ModeOutcome {
    DimensionMode mode = DimensionMode::PerFeature1D;
    GateResult gate;
    bool classified = false;
    std::vector<ClassifierResult> results;
    nlohmann::json models;
};

struct ExperimentResult {
    std::vector<ModeOutcome> outcomes;
    std::size_t n_learn = 0;
    std::size_t n_test = 0;
    bool gate_failed() const;
};

/// Config JSON schema:
/// {"generator": {"preset": "stable3"} | {"family": "gaussian"|"stable", "classes": [...],
///   "n_per_class": 3000, "window": [xmin,xmax,ymin,ymax] | null},
///  "split": {"p": 0.333, "seed": 1},
///  "models": {"family": "stable"|"gaussian"|"gmm", "modes": ["1d","2d"], "gmm_components": 4,
///             "spectral_directions": 4, "grid_resolution": 512, "cut_levels": 256,
///             "priors": [..] | null, "reject_policy": "count"|"uniform"},
///  "gate": {"samples": 170, "enforce": true}, "classifiers": ["belief","bayes"]}
/// Throws ConfigError on anything malformed.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

/// Runs every requested mode on the dataset. A mode whose gate fails is not
/// classified when enforce_gate is set.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data);

nlohmann::json to_json(const ExperimentResult& r);
nlohmann::json to_json(const GateResult& g);
std::string to_string(Family f);
std::string to_string(DimensionMode m);
Family family_from_string(const std::string& s);
DimensionMode mode_from_string(const std::string& s);

/// Dataset CSV: header "label,<feature names>", class names in the label column.
void write_dataset_csv(const Dataset& d, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);

}  // namespace sb
