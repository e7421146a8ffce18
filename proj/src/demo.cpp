#include "stablebelief/demo.hpp"

#include "stablebelief/error.hpp"

#include <cmath>

namespace sb {

std::vector<AircraftClass> aircraft_fixture() {
    return {{"Commercial", {2, 0, 8, 722.5}}, {"Bomber", {2, 0, 7, 690}}, {"Fighter", {2, 0, 10, 730}}};
}

std::vector<AircraftRow> aircraft_sweep(double from, double to, double step) {
    if (!(step > 0.0) || !(to >= from)) throw InvalidArgument("sweep needs from <= to and a positive step");
    const auto classes = aircraft_fixture();
    std::vector<std::string> names;
    std::vector<MvGaussian> gs;
    for (const auto& c : classes) {
        names.push_back(c.name);
        // S(2, 0, gamma, delta) is N(delta, 2 gamma^2).
        Eigen::MatrixXd cov(1, 1);
        cov << 2 * c.law.gamma * c.law.gamma;
        gs.emplace_back(Eigen::VectorXd::Constant(1, c.law.delta), cov);
    }
    const Frame frame(names);
    std::vector<AircraftRow> out;
    const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
        AircraftRow r;
        r.speed = from + static_cast<double>(i) * step;
        for (std::size_t c = 0; c < 3; ++c) {
            r.pl_stable[c] = pl_stable_1d(classes[c].law, r.speed);
            r.pl_chi2[c] = pl_gaussian_mv(gs[c], Eigen::VectorXd::Constant(1, r.speed));
        }
        const MassFunction ms = gbt_mass(r.pl_stable, frame);
        const MassFunction mc = gbt_mass(r.pl_chi2, frame);
        r.masses = ms.dense();
        const auto bs = pignistic(ms);
        for (std::size_t c = 0; c < 3; ++c) r.betp[c] = bs[c];
        r.decision_stable = static_cast<int>(decide(bs));
        r.decision_chi2 = static_cast<int>(decide(pignistic(mc)));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<GmmSweepRow> gmm_sweep(const ExperimentConfig& base, int kmax, DimensionMode mode) {
    return gmm_sweep(base, generate(base.generator, base.seed), kmax, mode);
}

std::vector<GmmSweepRow> gmm_sweep(const ExperimentConfig& base, const Dataset& data, int kmax, DimensionMode mode) {
    if (kmax < 1) throw ConfigError("kmax must be positive");
    std::vector<GmmSweepRow> rows;
    for (int k = 1; k <= kmax; ++k) {
        ExperimentConfig c = base;
        c.family = Family::Gmm;
        c.gmm_components = k;
        c.modes = {mode};
        c.classifiers = {"belief", "bayes"};
        c.enforce_gate = false;
        const auto r = run_experiment(c, data);
        GmmSweepRow row;
        row.k = k;
        row.gate_passed = r.outcomes.front().gate.passed();
        for (const auto& res : r.outcomes.front().results) {
            (res.classifier == "belief" ? row.belief_accuracy : row.bayes_accuracy) = res.accuracy;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sb
