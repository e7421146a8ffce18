#pragma once

// Discrete belief functions on a frame of at most 16 classes. Subsets are
// bitmasks over class indices; bit i set means class i belongs to the set.
// The empty set may carry mass (open world).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace sb {

using Subset = std::uint32_t;

class Frame {
public:
    Frame() = default;
    explicit Frame(std::vector<std::string> names);
    /// Frame with labels C1..Cn.
    static Frame numbered(std::size_t n);

    std::size_t size() const { return names_.size(); }
    Subset full() const { return (Subset{1} << names_.size()) - 1; }
    std::size_t power_size() const { return std::size_t{1} << names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    std::vector<std::string> names_;
};

inline constexpr std::size_t kMaxFrameSize = 16;

class MassFunction {
public:
    /// Dense masses indexed by subset bitmask. Throws InvalidArgument on a size
    /// mismatch, negative entries or a total away from 1 by more than 1e-9.
    MassFunction(Frame frame, std::vector<double> masses);
    static MassFunction vacuous(const Frame& frame);
    /// All mass on one subset.
    static MassFunction categorical(const Frame& frame, Subset a);

    const Frame& frame() const { return frame_; }
    double mass(Subset a) const { return m_.at(a); }
    double conflict() const { return m_[0]; }
    const std::vector<double>& dense() const { return m_; }
    /// Subsets with strictly positive mass, in increasing bitmask order.
    std::vector<Subset> focal_elements() const;

private:
    Frame frame_;
    std::vector<double> m_;
};

double bel(const MassFunction& m, Subset a);
double pl(const MassFunction& m, Subset a);
double commonality(const MassFunction& m, Subset a);

/// Commonality of every subset, via the superset zeta transform.
std::vector<double> commonality_all(const MassFunction& m);

/// Mobius inversion of a dense commonality vector. Negative results above
/// -1e-9 are treated as round-off and zeroed; anything lower throws
/// InvalidCommonality.
MassFunction from_commonality(std::span<const double> q, const Frame& frame);

/// Unnormalized conjunctive rule through the pointwise product of
/// commonalities. Throws FrameMismatch when frames differ.
MassFunction combine_conjunctive(std::span<const MassFunction> ms);

/// Pignistic probabilities. Throws TotalConflict when m(empty) = 1.
std::vector<double> pignistic(const MassFunction& m);

/// Argmax with ties going to the lowest index.
std::size_t decide(std::span<const double> betp);

nlohmann::json to_json(const MassFunction& m);

}  // namespace sb
