#include "stablebelief/belief.hpp"

#include "stablebelief/error.hpp"

#include <bit>
#include <cmath>
#include <set>

namespace sb {

namespace {

constexpr double kMassTolerance = 1e-9;

void superset_zeta(std::vector<double>& v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const Subset bit = Subset{1} << i;
        for (Subset a = 0; a < v.size(); ++a) {
            if (!(a & bit)) v[a] += v[a | bit];
        }
    }
}

void superset_mobius(std::vector<double>& v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const Subset bit = Subset{1} << i;
        for (Subset a = 0; a < v.size(); ++a) {
            if (!(a & bit)) v[a] -= v[a | bit];
        }
    }
}

void check_subset(const Frame& f, Subset a) {
    if (a > f.full()) throw InvalidArgument("subset outside the frame");
}

}  // namespace

Frame::Frame(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw InvalidArgument("frame must contain at least one class");
    if (names_.size() > kMaxFrameSize) throw InvalidArgument("frame holds at most 16 classes");
    if (std::set<std::string>(names_.begin(), names_.end()).size() != names_.size()) {
        throw InvalidArgument("frame labels must be unique");
    }
}

Frame Frame::numbered(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("C" + std::to_string(i + 1));
    return Frame(std::move(names));
}

MassFunction::MassFunction(Frame frame, std::vector<double> masses) : frame_(std::move(frame)), m_(std::move(masses)) {
    if (m_.size() != frame_.power_size()) throw InvalidArgument("mass vector size must be 2^|frame|");
    double total = 0.0;
    for (double v : m_) {
        if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("masses must be finite and nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > kMassTolerance) throw InvalidArgument("masses must sum to 1");
}

MassFunction MassFunction::vacuous(const Frame& frame) { return categorical(frame, frame.full()); }

MassFunction MassFunction::categorical(const Frame& frame, Subset a) {
    check_subset(frame, a);
    std::vector<double> m(frame.power_size(), 0.0);
    m[a] = 1.0;
    return MassFunction(frame, std::move(m));
}

std::vector<Subset> MassFunction::focal_elements() const {
    std::vector<Subset> out;
    for (Subset a = 0; a < m_.size(); ++a) {
        if (m_[a] > 0.0) out.push_back(a);
    }
    return out;
}

double bel(const MassFunction& m, Subset a) {
    check_subset(m.frame(), a);
    double s = 0.0;
    // nonempty subsets of a
    for (Subset b = a; b != 0; b = (b - 1) & a) s += m.mass(b);
    return s;
}

double pl(const MassFunction& m, Subset a) {
    check_subset(m.frame(), a);
    double s = 0.0;
    const auto& d = m.dense();
    for (Subset b = 0; b < d.size(); ++b) {
        if (b & a) s += d[b];
    }
    return s;
}

double commonality(const MassFunction& m, Subset a) {
    check_subset(m.frame(), a);
    double s = 0.0;
    const auto& d = m.dense();
    for (Subset b = 0; b < d.size(); ++b) {
        if ((b & a) == a) s += d[b];
    }
    return s;
}

std::vector<double> commonality_all(const MassFunction& m) {
    std::vector<double> q = m.dense();
    superset_zeta(q, m.frame().size());
    return q;
}

MassFunction from_commonality(std::span<const double> q, const Frame& frame) {
    if (q.size() != frame.power_size()) throw InvalidArgument("commonality vector size must be 2^|frame|");
    std::vector<double> m(q.begin(), q.end());
    superset_mobius(m, frame.size());
    double total = 0.0;
    for (double& v : m) {
        if (v < -kMassTolerance) throw InvalidCommonality("Moebius inversion gave a negative mass");
        if (v < 0.0) v = 0.0;
        total += v;
    }
    // Round-off from the clamp is folded back so the total stays exactly 1.
    if (std::abs(total - 1.0) > 1e-6) throw InvalidCommonality("commonality does not come from a normalized mass");
    for (double& v : m) v /= total;
    return MassFunction(frame, std::move(m));
}

MassFunction combine_conjunctive(std::span<const MassFunction> ms) {
    if (ms.empty()) throw InvalidArgument("nothing to combine");
    const Frame& frame = ms.front().frame();
    std::vector<double> q(frame.power_size(), 1.0);
    for (const auto& m : ms) {
        if (!(m.frame() == frame)) throw FrameMismatch("mass functions live on different frames");
        const auto qi = commonality_all(m);
        for (std::size_t a = 0; a < q.size(); ++a) q[a] *= qi[a];
    }
    return from_commonality(q, frame);
}

std::vector<double> pignistic(const MassFunction& m) {
    const double conflict = m.conflict();
    if (conflict >= 1.0 - 1e-12) throw TotalConflict("all mass on the empty set");
    const std::size_t n = m.frame().size();
    std::vector<double> p(n, 0.0);
    const auto& d = m.dense();
    for (Subset a = 1; a < d.size(); ++a) {
        if (d[a] == 0.0) continue;
        const double share = d[a] / std::popcount(a);
        for (std::size_t i = 0; i < n; ++i) {
            if (a & (Subset{1} << i)) p[i] += share;
        }
    }
    for (double& v : p) v /= 1.0 - conflict;
    return p;
}

std::size_t decide(std::span<const double> betp) {
    if (betp.empty()) throw InvalidArgument("empty probability vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < betp.size(); ++i) {
        if (betp[i] > betp[best]) best = i;
    }
    return best;
}

nlohmann::json to_json(const MassFunction& m) {
    nlohmann::json j;
    j["frame"] = m.frame().names();
    nlohmann::json masses = nlohmann::json::object();
    const std::size_t n = m.frame().size();
    for (Subset a : m.focal_elements()) {
        std::string key = "0b";
        for (std::size_t i = n; i-- > 0;) key += (a >> i) & 1 ? '1' : '0';
        masses[key] = m.mass(a);
    }
    j["masses"] = masses;
    return j;
}

}  // namespace sb
