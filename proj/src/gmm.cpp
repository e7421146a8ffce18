#include "stablebelief/gmm.hpp"

#include "stablebelief/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sb {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double log_sum_exp(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

Eigen::MatrixXd floor_eigenvalues(const Eigen::MatrixXd& cov, double floor) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
    Eigen::MatrixXd out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

// k-means++ centres, then one hard assignment to seed weights and covariances.
std::vector<GmmComponent> seed_components(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng, double floor) {
    const Eigen::Index n = x.rows();
    std::vector<Eigen::Index> centres;
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centres.push_back(pick(rng));
    Eigen::VectorXd d2 = (x.rowwise() - x.row(centres[0])).rowwise().squaredNorm();
    while (static_cast<int>(centres.size()) < k) {
        const double total = d2.sum();
        Eigen::Index next = pick(rng);
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double r = u(rng);
            for (next = 0; next < n - 1 && r >= d2[next]; ++next) r -= d2[next];
        }
        centres.push_back(next);
        d2 = d2.cwiseMin((x.rowwise() - x.row(next)).rowwise().squaredNorm());
    }
    std::vector<std::vector<Eigen::Index>> members(k);
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const double d = (x.row(i) - x.row(centres[c])).squaredNorm();
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        members[best].push_back(i);
    }
    const Eigen::MatrixXd global = [&] {
        const Eigen::RowVectorXd mu = x.colwise().mean();
        const Eigen::MatrixXd c = x.rowwise() - mu;
        return Eigen::MatrixXd((c.transpose() * c) / static_cast<double>(n));
    }();
    std::vector<GmmComponent> comps;
    for (int c = 0; c < k; ++c) {
        const auto& idx = members[c];
        Eigen::VectorXd mu = x.row(centres[c]).transpose();
        Eigen::MatrixXd cov = global;
        if (idx.size() > static_cast<std::size_t>(x.cols())) {
            Eigen::MatrixXd sub(idx.size(), x.cols());
            for (std::size_t r = 0; r < idx.size(); ++r) sub.row(r) = x.row(idx[r]);
            mu = sub.colwise().mean().transpose();
            const Eigen::MatrixXd cen = sub.rowwise() - mu.transpose();
            cov = (cen.transpose() * cen) / static_cast<double>(idx.size());
        }
        const double w = std::max<double>(1.0, static_cast<double>(idx.size())) / static_cast<double>(n);
        comps.push_back({w, MvGaussian(mu, floor_eigenvalues(cov, floor))});
    }
    double wsum = 0.0;
    for (const auto& c : comps) wsum += c.weight;
    for (auto& c : comps) c.weight /= wsum;
    return comps;
}

struct EmRun {
    GmmModel model;
    std::vector<double> ll;
    bool converged = false;
    bool degenerate = false;
};

EmRun run_em(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng, const EmOptions& opt) {
    const Eigen::Index n = x.rows();
    EmRun run;
    run.model.components = seed_components(x, k, rng, opt.eigen_floor);
    Eigen::MatrixXd logr(n, k);
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iterations; ++it) {
        // E step
        for (int c = 0; c < k; ++c) {
            const auto& comp = run.model.components[c];
            const double lw = std::log(comp.weight);
            for (Eigen::Index i = 0; i < n; ++i) logr(i, c) = lw + comp.gaussian.log_pdf(x.row(i).transpose());
        }
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double lse = log_sum_exp(logr.row(i).transpose());
            ll += lse;
            logr.row(i).array() -= lse;
        }
        run.ll.push_back(ll);
        if (std::isfinite(prev) && std::abs(ll - prev) <= opt.tolerance * std::abs(ll)) {
            run.converged = true;
            break;
        }
        prev = ll;
        // M step
        const Eigen::MatrixXd r = logr.array().exp().matrix();
        std::vector<GmmComponent> next;
        for (int c = 0; c < k; ++c) {
            const double nk = r.col(c).sum();
            if (nk < 1.0) {
                run.degenerate = true;
                return run;
            }
            const Eigen::VectorXd mu = (x.transpose() * r.col(c)) / nk;
            const Eigen::MatrixXd cen = x.rowwise() - mu.transpose();
            const Eigen::MatrixXd cov = (cen.transpose() * r.col(c).asDiagonal() * cen) / nk;
            next.push_back({nk / static_cast<double>(n), MvGaussian(mu, floor_eigenvalues(cov, opt.eigen_floor))});
        }
        run.model.components = std::move(next);
    }
    return run;
}

}  // namespace

MvGaussian::MvGaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (mean_.size() == 0 || cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
        throw InvalidArgument("mean and covariance dimensions differ");
    }
    if (!mean_.allFinite() || !cov_.allFinite()) throw InvalidArgument("non-finite gaussian parameters");
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cov_.cwiseAbs().maxCoeff())) {
        throw SingularCovariance("covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov_);
    if (llt.info() != Eigen::Success) throw SingularCovariance("covariance is not positive definite");
    chol_ = llt.matrixL();
    const double log_det = 2.0 * chol_.diagonal().array().log().sum();
    if (!std::isfinite(log_det)) throw SingularCovariance("covariance is not positive definite");
    log_norm_ = -0.5 * (static_cast<double>(mean_.size()) * kLog2Pi + log_det);
}

double MvGaussian::mahalanobis2(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd z = chol_.triangularView<Eigen::Lower>().solve(x - mean_);
    return z.squaredNorm();
}

double MvGaussian::log_pdf(const Eigen::VectorXd& x) const { return log_norm_ - 0.5 * mahalanobis2(x); }

double MvGaussian::pdf(const Eigen::VectorXd& x) const { return std::exp(log_pdf(x)); }

void GmmModel::validate() const {
    if (components.empty()) throw InvalidArgument("mixture has no components");
    double s = 0.0;
    for (const auto& c : components) {
        if (!(c.weight >= 0.0)) throw InvalidArgument("mixture weights must be nonnegative");
        if (c.gaussian.dim() != dim()) throw InvalidArgument("mixture components differ in dimension");
        s += c.weight;
    }
    if (std::abs(s - 1.0) > 1e-9) throw InvalidArgument("mixture weights must sum to 1");
}

MvGaussian fit_gaussian(const Eigen::MatrixXd& data) {
    const Eigen::Index n = data.rows();
    if (n < 2) throw InsufficientData("need at least two rows to fit a gaussian");
    if (n <= data.cols()) throw SingularCovariance("fewer rows than needed to span the feature space");
    const Eigen::VectorXd mu = data.colwise().mean().transpose();
    const Eigen::MatrixXd cen = data.rowwise() - mu.transpose();
    Eigen::MatrixXd cov = (cen.transpose() * cen) / static_cast<double>(n - 1);
    cov = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
        throw SingularCovariance("data lie in a proper subspace");
    }
    return MvGaussian(mu, cov);
}

EmTrace fit_gmm_em_traced(const Eigen::MatrixXd& data, int n_components, std::uint64_t seed, const EmOptions& opt) {
    if (n_components < 1) throw InvalidArgument("need at least one component");
    if (data.rows() < 10 * n_components * data.cols()) throw InsufficientData("too few rows for the requested mixture");
    if (!data.allFinite()) throw InvalidArgument("non-finite data");
    std::mt19937_64 rng(seed);
    EmTrace best;
    double best_ll = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (int r = 0; r < std::max(1, opt.restarts); ++r) {
        EmRun run = run_em(data, n_components, rng, opt);
        if (run.degenerate) continue;
        // weight under 1/N after the final step also counts as a collapse
        bool tiny = false;
        for (const auto& c : run.model.components) tiny |= c.weight < 1.0 / static_cast<double>(data.rows());
        if (tiny) continue;
        const double ll = run.ll.back();
        if (!found || ll > best_ll) {
            found = true;
            best_ll = ll;
            best.model = std::move(run.model);
            best.log_likelihood = std::move(run.ll);
            best.restart = r;
            best.converged = run.converged;
        }
    }
    if (!found) throw DegenerateComponent("every EM restart collapsed a component");
    return best;
}

GmmModel fit_gmm_em(const Eigen::MatrixXd& data, int n_components, std::uint64_t seed, const EmOptions& opt) {
    return fit_gmm_em_traced(data, n_components, seed, opt).model;
}

double gmm_pdf(const GmmModel& model, const Eigen::VectorXd& x) {
    double s = 0.0;
    for (const auto& c : model.components) s += c.weight * c.gaussian.pdf(x);
    return s;
}

double gmm_log_likelihood(const GmmModel& model, const Eigen::MatrixXd& data) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) ll += std::log(gmm_pdf(model, data.row(i).transpose()));
    return ll;
}

nlohmann::json to_json(const MvGaussian& g) {
    nlohmann::json j;
    j["mean"] = std::vector<double>(g.mean().data(), g.mean().data() + g.mean().size());
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < g.cov().rows(); ++r) {
        std::vector<double> row(g.cov().cols());
        for (Eigen::Index c = 0; c < g.cov().cols(); ++c) row[c] = g.cov()(r, c);
        rows.push_back(row);
    }
    j["cov"] = rows;
    return j;
}

nlohmann::json to_json(const GmmModel& m) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : m.components) {
        nlohmann::json j = to_json(c.gaussian);
        j["weight"] = c.weight;
        comps.push_back(j);
    }
    return {{"components", comps}};
}

MvGaussian mv_gaussian_from_json(const nlohmann::json& j) {
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto rows = j.at("cov").get<std::vector<std::vector<double>>>();
    const auto d = static_cast<Eigen::Index>(mean.size());
    Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(mean.data(), d);
    if (static_cast<Eigen::Index>(rows.size()) != d) throw InvalidArgument("covariance shape mismatch");
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != d) throw InvalidArgument("covariance shape mismatch");
        for (Eigen::Index c = 0; c < d; ++c) cov(r, c) = rows[r][c];
    }
    return MvGaussian(mu, cov);
}

GmmModel gmm_from_json(const nlohmann::json& j) {
    GmmModel m;
    for (const auto& c : j.at("components")) m.components.push_back({c.at("weight").get<double>(), mv_gaussian_from_json(c)});
    m.validate();
    return m;
}

}  // namespace sb
