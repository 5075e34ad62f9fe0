#pragma once

// Tip selection: uniform random tip selection (URTS) and the cumulative-weight
// random walk (URW for alpha = 0, BRW for alpha > 0), without backtracking.

#include <cmath>
#include <optional>
#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "tangle.hpp"

namespace tangle {

/// How a MEM double approval y => x counts as a walk candidate at x.
enum class DuplicateEdgeWeighting : std::uint8_t { once, twice };

struct WalkConfig {
    double alpha = 0.0;
    TxId start = kGenesis;
    DuplicateEdgeWeighting duplicates = DuplicateEdgeWeighting::once;
};

struct WalkTrace {
    std::vector<TxId> path;
    /// Visible approval-edge count of each path entry at walk time.
    std::vector<std::size_t> approver_counts;

    TxId tip() const { return path.back(); }
};

/// Source of cumulative weights for biased walks.
class WeightOracle {
public:
    virtual ~WeightOracle() = default;
    virtual std::size_t weight(TxId x) = 0;
};

/// Memoized cumulative weights of one snapshot (fixed visibility time).
class WeightCache final : public WeightOracle {
public:
    WeightCache(const Tangle& tangle, Time at) : tangle_(&tangle), at_(at) {}

    Time at() const { return at_; }

    std::size_t weight(TxId x) override {
        if (x >= weights_.size()) weights_.resize(tangle_->size(), 0);
        if (weights_[x] == 0) weights_[x] = compute(x);
        return weights_[x];
    }

private:
    std::size_t compute(TxId x) {
        if (stamp_.size() < tangle_->size()) stamp_.resize(tangle_->size(), 0);
        ++epoch_;
        frontier_.assign(1, x);
        stamp_[x] = epoch_;
        for (std::size_t head = 0; head < frontier_.size(); ++head)
            for (TxId y : tangle_->approvers(frontier_[head])) {
                if (stamp_[y] == epoch_ || !tangle_->is_revealed(y, at_)) continue;
                stamp_[y] = epoch_;
                frontier_.push_back(y);
            }
        return frontier_.size();
    }

    const Tangle* tangle_;
    Time at_;
    std::vector<std::size_t> weights_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
    std::vector<TxId> frontier_;
};

/// Two independent uniform draws from `tips`; the draws may coincide.
inline std::pair<TxId, TxId> urts_select(std::span<const TxId> tips, Rng& rng) {
    if (tips.empty()) throw Error("no tips to select from");
    std::uniform_int_distribution<std::size_t> pick(0, tips.size() - 1);
    const TxId first = tips[pick(rng)];
    return {first, tips[pick(rng)]};
}

inline std::pair<TxId, TxId> urts_select(const Tangle& tangle, Time at, Rng& rng) {
    const auto tips = tangle.tips(at);
    return urts_select(tips, rng);
}

namespace detail {

template <class Visit>
void for_each_candidate(const Tangle& tangle, TxId x, Time at, DuplicateEdgeWeighting dup, Visit&& visit) {
    TxId prev = kGenesis;
    bool have_prev = false;
    for (TxId y : tangle.approvers(x)) {
        if (!tangle.is_revealed(y, at)) continue;
        if (dup == DuplicateEdgeWeighting::once && have_prev && y == prev) continue;
        prev = y;
        have_prev = true;
        visit(y);
    }
}

} // namespace detail

/// Candidate approvers of `x` with their transition probabilities
/// exp(alpha * w_y) / sum_z exp(alpha * w_z).
inline std::vector<std::pair<TxId, double>> transition_probabilities(const Tangle& tangle, TxId x,
                                                                     const WalkConfig& config, Time at,
                                                                     WeightOracle* weights = nullptr) {
    std::vector<std::pair<TxId, double>> out;
    detail::for_each_candidate(tangle, x, at, config.duplicates, [&](TxId y) { out.emplace_back(y, 0.0); });
    if (out.empty()) return out;
    if (config.alpha == 0.0) {
        for (auto& c : out) c.second = 1.0 / static_cast<double>(out.size());
        return out;
    }
    std::optional<WeightCache> local;
    if (!weights) weights = &local.emplace(tangle, at);
    double w_max = 0.0;
    for (auto& c : out) {
        c.second = static_cast<double>(weights->weight(c.first));
        w_max = std::max(w_max, c.second);
    }
    double total = 0.0;
    for (auto& c : out) {
        c.second = std::exp(config.alpha * (c.second - w_max));
        total += c.second;
    }
    for (auto& c : out) c.second /= total;
    return out;
}

/// One random-walk transition from `x` to one of its visible approvers.
inline TxId walk_step(const Tangle& tangle, TxId x, const WalkConfig& config, Time at, Rng& rng,
                      WeightOracle* weights = nullptr) {
    if (config.alpha == 0.0) {
        std::size_t count = 0;
        detail::for_each_candidate(tangle, x, at, config.duplicates, [&](TxId) { ++count; });
        if (count == 0) throw Error("walk step from tip " + std::to_string(x));
        std::size_t k = std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
        TxId chosen = x;
        detail::for_each_candidate(tangle, x, at, config.duplicates, [&](TxId y) {
            if (k-- == 0) chosen = y;
        });
        return chosen;
    }
    const auto probs = transition_probabilities(tangle, x, config, at, weights);
    if (probs.empty()) throw Error("walk step from tip " + std::to_string(x));
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (const auto& [y, p] : probs) {
        if (u < p) return y;
        u -= p;
    }
    return probs.back().first;
}

/// Walks from config.start until a tip visible at `at` is reached.
inline TxId walk_tip(const Tangle& tangle, const WalkConfig& config, Time at, Rng& rng,
                     WeightOracle* weights = nullptr) {
    if (!tangle.is_revealed(config.start, at)) throw Error("walk start is not revealed");
    std::optional<WeightCache> local;
    if (config.alpha != 0.0 && !weights) weights = &local.emplace(tangle, at);
    TxId x = config.start;
    while (!tangle.is_tip(x, at)) x = walk_step(tangle, x, config, at, rng, weights);
    return x;
}

inline WalkTrace walk_select(const Tangle& tangle, const WalkConfig& config, Time at, Rng& rng,
                             WeightOracle* weights = nullptr) {
    if (!tangle.is_revealed(config.start, at)) throw Error("walk start is not revealed");
    std::optional<WeightCache> local;
    if (config.alpha != 0.0 && !weights) weights = &local.emplace(tangle, at);
    WalkTrace trace;
    TxId x = config.start;
    while (true) {
        trace.path.push_back(x);
        trace.approver_counts.push_back(tangle.edge_count_at(x, at));
        if (trace.approver_counts.back() == 0) break;
        x = walk_step(tangle, x, config, at, rng, weights);
    }
    return trace;
}

} // namespace tangle
