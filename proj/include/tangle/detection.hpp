#pragma once

// Parasite-chain detection: distances between measured and reference
// approver-count distributions, sliding sample windows fed along random
// walks, threshold calibration on honest Tangles, and future-cone sampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "probability_vector.hpp"
#include "rng.hpp"
#include "tangle.hpp"
#include "tip_selection.hpp"

namespace tangle {

enum class Metric : std::uint8_t { dp, dq };

inline std::string_view to_string(Metric m) { return m == Metric::dp ? "dp" : "dq"; }

inline Metric parse_metric(std::string_view s) {
    if (s == "dp" || s == "DP") return Metric::dp;
    if (s == "dq" || s == "DQ") return Metric::dq;
    throw Error("unknown metric: " + std::string(s));
}

/// Half L1 distance (total variation) between two distributions.
inline double distance_dp(const ProbabilityVector& p, const ProbabilityVector& ref) {
    double d = 0.0;
    const std::size_t n = std::max(p.size(), ref.size());
    for (std::size_t i = 0; i < n; ++i) d += std::abs(p[i] - ref[i]);
    return 0.5 * d;
}

/// Half L1 distance between the survival functions Q(n) = sum_{m >= n} P(m).
inline double distance_dq(const ProbabilityVector& p, const ProbabilityVector& ref) {
    const std::size_t n = std::max(p.size(), ref.size());
    double qp = 0.0;
    double qr = 0.0;
    double d = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        qp += p[i];
        qr += ref[i];
        d += std::abs(qp - qr);
    }
    return 0.5 * d;
}

inline double distance(Metric metric, const ProbabilityVector& p, const ProbabilityVector& ref) {
    return metric == Metric::dp ? distance_dp(p, ref) : distance_dq(p, ref);
}

inline ProbabilityVector empirical_distribution(std::span<const std::size_t> sample) {
    return ProbabilityVector::from_sample(sample);
}

/// FIFO of the last S approver counts.
class SampleWindow {
public:
    explicit SampleWindow(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw Error("sample window size must be positive");
    }

    void push(std::size_t n) {
        buffer_.push_back(n);
        if (buffer_.size() > capacity_) buffer_.pop_front();
    }

    void clear() { buffer_.clear(); }
    bool warm() const { return buffer_.size() == capacity_; }
    std::size_t size() const { return buffer_.size(); }
    std::size_t capacity() const { return capacity_; }

    ProbabilityVector distribution() const {
        const std::vector<std::size_t> v(buffer_.begin(), buffer_.end());
        return empirical_distribution(v);
    }

private:
    std::size_t capacity_;
    std::deque<std::size_t> buffer_;
};

struct DetectorConfig {
    std::size_t sample_size = 10;
    Metric metric = Metric::dp;
    double eta = 1.0;
    ProbabilityVector reference;
    /// Walk bias used after a detection.
    double safe_alpha = 0.1;
    /// Keep scoring (without acting) while in safe mode.
    bool detect_in_safe_mode = false;

    void validate() const {
        if (sample_size == 0) throw Error("sample size S must be at least 1");
        if (!(eta >= 0.0 && eta <= 1.0)) throw Error("threshold eta must lie in [0, 1]");
        if (reference.size() == 0) throw Error("detector needs a reference distribution");
        if (safe_alpha < 0.0) throw Error("safe alpha must be non-negative");
    }
};

struct DetectionStep {
    bool flagged = false;
    /// Only computed once the window is warm.
    std::optional<double> distance;
};

/// Pushes one approver count and tests the window once it holds S counts.
inline DetectionStep walk_detect_step(SampleWindow& window, std::size_t approver_count, const DetectorConfig& config) {
    window.push(approver_count);
    if (!window.warm()) return {};
    const double d = distance(config.metric, window.distribution(), config.reference);
    return {d > config.eta, d};
}

enum class WalkMode : std::uint8_t { standard, safe };

inline std::string_view to_string(WalkMode m) { return m == WalkMode::standard ? "standard" : "safe"; }

struct DetectionLogEntry {
    std::size_t step = 0;
    TxId tx = kGenesis;
    std::size_t n = 0;
    std::optional<double> d;
    bool flagged = false;
    WalkMode mode = WalkMode::standard;
};

struct GuardedSelection {
    TxId tip = kGenesis;
    bool entered_safe_mode = false;
    std::vector<DetectionLogEntry> log;
};

/// Random-walk tip selection with per-step detection. On the first flag the
/// walk restarts from its initial tx in safe mode (alpha = safe_alpha) and
/// detection stops acting for the rest of the selection.
inline GuardedSelection guarded_tip_selection(const Tangle& tangle, const WalkConfig& walk,
                                              const DetectorConfig& detector, Time at, Rng& rng,
                                              WeightOracle* weights = nullptr) {
    detector.validate();
    if (!tangle.is_revealed(walk.start, at)) throw Error("walk start is not revealed");
    std::optional<WeightCache> local;
    if ((walk.alpha != 0.0 || detector.safe_alpha != 0.0) && !weights) weights = &local.emplace(tangle, at);
    WalkConfig safe = walk;
    safe.alpha = detector.safe_alpha;

    GuardedSelection out;
    SampleWindow window(detector.sample_size);
    WalkMode mode = WalkMode::standard;
    TxId tx = walk.start;
    std::size_t step = 0;
    while (!tangle.is_tip(tx, at)) {
        ++step;
        if (mode == WalkMode::safe) {
            tx = walk_step(tangle, tx, safe, at, rng, weights);
            const std::size_t n = tangle.edge_count_at(tx, at);
            DetectionLogEntry entry{step, tx, n, std::nullopt, false, mode};
            if (detector.detect_in_safe_mode && n > 0) {
                const auto r = walk_detect_step(window, n, detector);
                entry.d = r.distance;
                entry.flagged = r.flagged;
            }
            out.log.push_back(entry);
            continue;
        }
        tx = walk_step(tangle, tx, walk, at, rng, weights);
        const std::size_t n = tangle.edge_count_at(tx, at);
        DetectionLogEntry entry{step, tx, n, std::nullopt, false, mode};
        if (n > 0) {  // the tip's zero count is outside the reference support
            const auto r = walk_detect_step(window, n, detector);
            entry.d = r.distance;
            entry.flagged = r.flagged;
        }
        out.log.push_back(entry);
        if (entry.flagged) {
            mode = WalkMode::safe;
            out.entered_safe_mode = true;
            window.clear();
            tx = walk.start;
        }
    }
    out.tip = tx;
    return out;
}

/// Distances of every length-S sliding window over `counts`.
inline std::vector<double> window_distances(std::span<const std::size_t> counts, std::size_t sample_size,
                                            Metric metric, const ProbabilityVector& reference) {
    std::vector<double> out;
    if (sample_size == 0) throw Error("sample size S must be at least 1");
    if (counts.size() < sample_size) return out;
    for (std::size_t i = 0; i + sample_size <= counts.size(); ++i)
        out.push_back(distance(metric, empirical_distribution(counts.subspan(i, sample_size)), reference));
    return out;
}

inline double flag_rate(std::span<const double> distances, double eta) {
    if (distances.empty()) return 0.0;
    const auto flagged = std::count_if(distances.begin(), distances.end(), [eta](double d) { return d > eta; });
    return static_cast<double>(flagged) / static_cast<double>(distances.size());
}

/// Empirical CDF of a set of distances.
class DistanceCdf {
public:
    DistanceCdf() = default;
    explicit DistanceCdf(std::vector<double> distances) : sorted_(std::move(distances)) {
        std::sort(sorted_.begin(), sorted_.end());
    }

    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

    /// P(d <= x).
    double operator()(double x) const {
        if (sorted_.empty()) return 0.0;
        const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

    /// (distinct distance, cumulative probability) pairs; values closer than
    /// `tol` are merged.
    std::vector<std::pair<double, double>> steps(double tol = 1e-12) const {
        std::vector<std::pair<double, double>> out;
        for (std::size_t i = 0; i < sorted_.size(); ++i) {
            const double c = static_cast<double>(i + 1) / static_cast<double>(sorted_.size());
            if (!out.empty() && sorted_[i] - out.back().first <= tol) out.back().second = c;
            else out.emplace_back(sorted_[i], c);
        }
        return out;
    }

    std::size_t distinct_values(double tol = 1e-12) const { return steps(tol).size(); }

    /// Smallest observed d with P(d' > d) <= fpr.
    double threshold_for_false_positive_rate(double fpr) const {
        if (sorted_.empty()) throw Error("empty distance sample");
        if (!(fpr >= 0.0 && fpr < 1.0)) throw Error("false-positive target must lie in [0, 1)");
        const auto n = sorted_.size();
        auto k = static_cast<std::size_t>(std::ceil((1.0 - fpr) * static_cast<double>(n) - 1e-9));
        k = std::clamp<std::size_t>(k, 1, n);
        return sorted_[k - 1];
    }

private:
    std::vector<double> sorted_;
};

enum class CalibrationUnit : std::uint8_t {
    /// One sample per sliding window position.
    window,
    /// One sample per walk: the largest window distance along it, so the
    /// threshold bounds the per-selection false-positive rate.
    walk,
};

struct CalibrationOptions {
    std::size_t sample_size = 10;
    Metric metric = Metric::dp;
    ProbabilityVector reference;
    std::size_t num_samples = 10000;
    double fpr_target = 0.01;
    CalibrationUnit unit = CalibrationUnit::window;
    Time at = 0.0;
    TxId start = kGenesis;
    /// Path entries issued before this are not sampled (burn-in near genesis).
    Time min_issue_time = 0.0;
    std::size_t max_walks = 1000000;
    std::uint64_t seed = 1;
};

struct Calibration {
    DistanceCdf cdf;
    double eta = 1.0;
    std::size_t walks = 0;
};

/// Approver counts seen by one unbiased walk: every entry after the start,
/// the final tip excluded, restricted to txs issued at or after min_issue_time.
inline std::vector<std::size_t> walk_sample(const Tangle& tangle, TxId start, Time at, Time min_issue_time, Rng& rng,
                                            double alpha = 0.0, WeightOracle* weights = nullptr) {
    const WalkConfig walk{alpha, start, DuplicateEdgeWeighting::once};
    const WalkTrace trace = walk_select(tangle, walk, at, rng, weights);
    std::vector<std::size_t> counts;
    for (std::size_t i = 1; i + 1 < trace.path.size(); ++i)
        if (tangle.tx(trace.path[i]).issue_time >= min_issue_time) counts.push_back(trace.approver_counts[i]);
    return counts;
}

/// Distances of honest walk windows.
inline std::vector<double> honest_distances(const Tangle& honest, const CalibrationOptions& options,
                                            std::size_t* walks_used = nullptr) {
    if (options.reference.size() == 0) throw Error("calibration needs a reference distribution");
    Rng rng = make_stream(options.seed, "calibration-walks");
    std::vector<double> out;
    std::size_t walks = 0;
    while (out.size() < options.num_samples && walks < options.max_walks) {
        ++walks;
        const auto counts = walk_sample(honest, options.start, options.at, options.min_issue_time, rng);
        auto ds = window_distances(counts, options.sample_size, options.metric, options.reference);
        if (ds.empty()) continue;
        if (options.unit == CalibrationUnit::walk) {
            out.push_back(*std::max_element(ds.begin(), ds.end()));
        } else {
            const std::size_t take = std::min(ds.size(), options.num_samples - out.size());
            out.insert(out.end(), ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(take));
        }
    }
    if (walks_used) *walks_used = walks;
    if (out.size() < options.num_samples) throw Error("insufficient windows: walks too short for sample size");
    return out;
}

inline Calibration calibrate_eta(const Tangle& honest, const CalibrationOptions& options) {
    Calibration c;
    c.cdf = DistanceCdf(honest_distances(honest, options, &c.walks));
    c.eta = c.cdf.threshold_for_false_positive_rate(options.fpr_target);
    return c;
}

struct ConeOptions {
    std::optional<std::size_t> max_size;
    /// Txs younger than this at sampling time are left out (still collecting approvals).
    Time maturity = 2.0;
    std::size_t min_sample = 10;
};

struct ConeDetection {
    double d = 0.0;
    bool flagged = false;
    std::size_t sample_size = 0;
    bool truncated = false;
    ProbabilityVector distribution;
};

/// Compares the approver counts of `root`'s mature future cone with the
/// detector's (whole-Tangle) reference distribution.
inline ConeDetection cone_detect(const Tangle& tangle, TxId root, const DetectorConfig& config, Time at,
                                 const ConeOptions& options = {}) {
    const ConeSample cone = tangle.future_cone(root, at, options.max_size);
    std::vector<std::size_t> counts;
    for (TxId y : cone.members)
        if (at - tangle.tx(y).issue_time >= options.maturity) counts.push_back(tangle.edge_count_at(y, at));
    if (counts.empty()) throw Error("future cone is empty after maturity exclusion");
    if (counts.size() < options.min_sample) throw Error("insufficient cone sample");
    ConeDetection out;
    out.sample_size = counts.size();
    out.truncated = cone.truncated;
    out.distribution = empirical_distribution(counts);
    out.d = distance(config.metric, out.distribution, config.reference);
    out.flagged = out.d > config.eta;
    return out;
}

} // namespace tangle
