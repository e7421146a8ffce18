#pragma once

// Canned studies shared by the CLI and the acceptance runner.

#include <array>
#include <string>
#include <vector>

#include "stablebelief/pipeline.hpp"

namespace sb {

/// Three speed classes (km/h) written as alpha = 2 stable laws.
struct AircraftClass {
    std::string name;
    StableParams law;
};
std::vector<AircraftClass> aircraft_fixture();

struct AircraftRow {
    double speed = 0.0;
    std::array<double, 3> pl_stable{};  // least-commitment path on the stable form
    std::array<double, 3> pl_chi2{};    // Gaussian chi-square path
    std::vector<double> masses;         // GBT masses of the stable path, by subset bitmask
    std::array<double, 3> betp{};
    int decision_stable = 0;
    int decision_chi2 = 0;
};

std::vector<AircraftRow> aircraft_sweep(double from, double to, double step);

struct GmmSweepRow {
    int k = 0;
    bool gate_passed = false;
    double belief_accuracy = 0.0;
    double bayes_accuracy = 0.0;
};

/// Runs `base` once per component count 1..kmax with GMM class models in one
/// dimension mode. The gate is reported, not enforced.
std::vector<GmmSweepRow> gmm_sweep(const ExperimentConfig& base, int kmax, DimensionMode mode);
std::vector<GmmSweepRow> gmm_sweep(const ExperimentConfig& base, const Dataset& data, int kmax, DimensionMode mode);

}  // namespace sb
