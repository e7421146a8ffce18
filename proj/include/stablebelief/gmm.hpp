#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "json.hpp"

namespace sb {

/// Multivariate normal law with a Cholesky factor cached at construction.
class MvGaussian {
public:
    MvGaussian() = default;
    /// Throws SingularCovariance when cov is not symmetric (1e-12) or not
    /// positive definite.
    MvGaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }
    int dim() const { return static_cast<int>(mean_.size()); }

    double mahalanobis2(const Eigen::VectorXd& x) const;
    double log_pdf(const Eigen::VectorXd& x) const;
    double pdf(const Eigen::VectorXd& x) const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::MatrixXd chol_;  // lower factor
    double log_norm_ = 0.0;
};

struct GmmComponent {
    double weight = 1.0;
    MvGaussian gaussian;
};

struct GmmModel {
    std::vector<GmmComponent> components;

    int dim() const { return components.empty() ? 0 : components.front().gaussian.dim(); }
    /// Throws InvalidArgument unless weights are nonnegative and sum to 1 (1e-9).
    void validate() const;
};

/// Sample mean and unbiased covariance of the rows of data.
MvGaussian fit_gaussian(const Eigen::MatrixXd& data);

struct EmOptions {
    int restarts = 5;
    int max_iterations = 500;
    double tolerance = 1e-6;  // relative log-likelihood change
    double eigen_floor = 1e-6;
};

struct EmTrace {
    GmmModel model;
    std::vector<double> log_likelihood;  // one entry per completed iteration of the kept run
    int restart = 0;
    bool converged = false;
};

/// EM with k-means++ seeding; keeps the best of several restarts. Throws
/// InsufficientData below 10 k d rows and DegenerateComponent when every
/// restart ends with a component weight under 1/N.
EmTrace fit_gmm_em_traced(const Eigen::MatrixXd& data, int n_components, std::uint64_t seed,
                          const EmOptions& opt = {});
GmmModel fit_gmm_em(const Eigen::MatrixXd& data, int n_components, std::uint64_t seed, const EmOptions& opt = {});

double gmm_pdf(const GmmModel& model, const Eigen::VectorXd& x);
double gmm_log_likelihood(const GmmModel& model, const Eigen::MatrixXd& data);

nlohmann::json to_json(const MvGaussian& g);
nlohmann::json to_json(const GmmModel& m);
MvGaussian mv_gaussian_from_json(const nlohmann::json& j);
GmmModel gmm_from_json(const nlohmann::json& j);

}  // namespace sb
