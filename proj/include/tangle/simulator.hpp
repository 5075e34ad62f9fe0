#pragma once

// Discrete-event generation of honest Tangles: Poisson arrivals at rate lambda
// (per reveal delay h = 1), each arrival selecting two tips against the
// Tangle as visible at its issue time, revealed h later.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "probability_vector.hpp"
#include "rng.hpp"
#include "tangle.hpp"
#include "tip_selection.hpp"

namespace tangle {

enum class TipSelectorKind : std::uint8_t { urts, walk };

struct SimConfig {
    double lambda = 100.0;
    EdgePolicy policy = EdgePolicy::sem;
    TipSelectorKind selector = TipSelectorKind::urts;
    double alpha = 0.0;
    DuplicateEdgeWeighting duplicates = DuplicateEdgeWeighting::once;
    Time horizon = 200.0;
    Time warmup = 100.0;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error("lambda must be positive");
        if (alpha < 0.0) throw Error("alpha must be non-negative");
        if (!(warmup < horizon)) throw Error("warmup must be shorter than the horizon");
        if (warmup < 0.0) throw Error("warmup must be non-negative");
    }

    WalkConfig walk() const { return WalkConfig{alpha, kGenesis, duplicates}; }
};

/// An additional arrival stream merged into the honest event loop by time.
class ArrivalProcess {
public:
    virtual ~ArrivalProcess() = default;
    /// Time of the next arrival, or kNever when exhausted.
    virtual Time next_arrival() const = 0;
    /// Attach the next arrival's transaction(s) at next_arrival().
    virtual void arrive(Tangle& tangle) = 0;
};

/// Cumulative weights kept current as transactions are revealed: revealing y
/// adds one to the weight of every tx in y's past cone.
class LiveWeights final : public WeightOracle {
public:
    explicit LiveWeights(const Tangle& tangle) : tangle_(&tangle) {}

    std::size_t weight(TxId x) override { return x < weights_.size() ? weights_[x] : 1; }

    void on_reveal(TxId y) {
        if (weights_.size() < tangle_->size()) {
            weights_.resize(tangle_->size(), 1);
            stamp_.resize(tangle_->size(), 0);
        }
        ++epoch_;
        stack_.assign(1, y);
        while (!stack_.empty()) {
            const TxId v = stack_.back();
            stack_.pop_back();
            for (TxId a : tangle_->tx(v).approvees()) {
                if (stamp_[a] == epoch_) continue;
                stamp_[a] = epoch_;
                ++weights_[a];
                stack_.push_back(a);
            }
        }
    }

private:
    const Tangle* tangle_;
    std::vector<std::size_t> weights_{1};
    std::vector<std::uint32_t> stamp_{0};
    std::uint32_t epoch_ = 0;
    std::vector<TxId> stack_;
};

class Simulation {
public:
    explicit Simulation(SimConfig config)
        : config_(config),
          tangle_(config.policy),
          arrivals_(make_stream(config.seed, "arrivals")),
          selection_(make_stream(config.seed, "tip-selection")),
          weights_(tangle_) {
        config_.validate();
        tips_.push_back(kGenesis);
        tip_pos_.push_back(0);
        revealed_approvers_.push_back(0);
        next_honest_ = draw_gap();
    }

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    const SimConfig& config() const { return config_; }
    const Tangle& tangle() const { return tangle_; }
    Time now() const { return now_; }

    /// Tips visible at now().
    std::span<const TxId> visible_tips() const { return tips_; }

    WeightOracle& live_weights() { return weights_; }

    /// Mean visible tip count seen by honest arrivals issued after warmup.
    double mean_tip_count() const {
        return tip_samples_ ? tip_sum_ / static_cast<double>(tip_samples_) : 0.0;
    }
    std::size_t honest_arrivals() const { return honest_count_; }

    /// Processes every event up to and including time t.
    void run_until(Time t, ArrivalProcess* extra = nullptr) {
        while (true) {
            const Time extra_next = extra ? extra->next_arrival() : kNever;
            const Time next = std::min(next_honest_, extra_next);
            if (next > t) break;
            reveal_until(next);
            now_ = next;
            if (extra && extra_next < next_honest_) {
                const std::size_t before = tangle_.size();
                extra->arrive(tangle_);
                for (std::size_t id = before; id < tangle_.size(); ++id)
                    pending_.emplace(tangle_.tx(static_cast<TxId>(id)).reveal_time, static_cast<TxId>(id));
            } else {
                honest_arrival(next);
                next_honest_ = next + draw_gap();
            }
        }
        reveal_until(t);
        now_ = std::max(now_, t);
        if (t > tangle_.clock() && std::isfinite(t)) tangle_.advance_clock(t);
    }

private:
    Time draw_gap() { return std::exponential_distribution<double>(config_.lambda)(arrivals_); }

    void reveal_until(Time t) {
        while (!pending_.empty() && pending_.top().first <= t) {
            const TxId y = pending_.top().second;
            pending_.pop();
            reveal(y);
        }
    }

    void reveal(TxId y) {
        revealed_approvers_.resize(tangle_.size(), 0);
        tip_pos_.resize(tangle_.size(), kNotTip);
        const auto approvees = tangle_.tx(y).approvees();
        for (std::size_t i = 0; i < approvees.size(); ++i) {
            const TxId a = approvees[i];
            if (i == 1 && a == approvees[0]) continue;
            if (revealed_approvers_[a]++ == 0) remove_tip(a);
        }
        if (revealed_approvers_[y] == 0) add_tip(y);
        if (config_.selector == TipSelectorKind::walk && config_.alpha != 0.0) weights_.on_reveal(y);
    }

    void add_tip(TxId y) {
        if (tip_pos_[y] != kNotTip) return;
        tip_pos_[y] = tips_.size();
        tips_.push_back(y);
    }

    void remove_tip(TxId a) {
        const std::size_t pos = tip_pos_[a];
        if (pos == kNotTip) return;
        const TxId last = tips_.back();
        tips_[pos] = last;
        tip_pos_[last] = pos;
        tips_.pop_back();
        tip_pos_[a] = kNotTip;
    }

    void honest_arrival(Time t) {
        if (t >= config_.warmup) {
            tip_sum_ += static_cast<double>(tips_.size());
            ++tip_samples_;
        }
        std::array<TxId, 2> chosen{};
        if (config_.selector == TipSelectorKind::urts) {
            const auto [a, b] = urts_select(tips_, selection_);
            chosen = {a, b};
        } else {
            WeightOracle* w = config_.alpha != 0.0 ? &weights_ : nullptr;
            chosen[0] = walk_tip(tangle_, config_.walk(), t, selection_, w);
            chosen[1] = walk_tip(tangle_, config_.walk(), t, selection_, w);
        }
        const TxId id = tangle_.attach(t, chosen);
        pending_.emplace(tangle_.tx(id).reveal_time, id);
        ++honest_count_;
    }

    static constexpr std::size_t kNotTip = static_cast<std::size_t>(-1);
    using Event = std::pair<Time, TxId>;

    SimConfig config_;
    Tangle tangle_;
    Rng arrivals_;
    Rng selection_;
    LiveWeights weights_;
    Time now_ = 0.0;
    Time next_honest_ = 0.0;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> pending_;
    std::vector<TxId> tips_;
    std::vector<std::size_t> tip_pos_;
    std::vector<std::uint32_t> revealed_approvers_;
    double tip_sum_ = 0.0;
    std::size_t tip_samples_ = 0;
    std::size_t honest_count_ = 0;
};

/// Runs an honest simulation to config.horizon.
inline Tangle run(const SimConfig& config) {
    Simulation sim(config);
    sim.run_until(config.horizon);
    return sim.tangle();
}

// ---------------------------------------------------------------------------
// Approver statistics

struct ApproverHistogram {
    std::map<std::size_t, std::uint64_t> counts;
    std::uint64_t sample_size = 0;

    void add(std::size_t n, std::uint64_t times = 1) {
        counts[n] += times;
        sample_size += times;
    }

    ProbabilityVector distribution() const {
        if (sample_size == 0) throw Error("empty histogram");
        std::vector<double> p(counts.empty() ? 1 : counts.rbegin()->first + 1, 0.0);
        for (const auto& [n, c] : counts) p[n] = static_cast<double>(c) / static_cast<double>(sample_size);
        return ProbabilityVector(std::move(p));
    }
};

enum class Sampling : std::uint8_t { all, along_walks };

struct MeasureOptions {
    Sampling sampling = Sampling::all;
    /// Number of unbiased walks for along_walks sampling.
    std::size_t walks = 1000;
    Time warmup = 0.0;
    /// End of the arrival process; kNever treats the tangle as final.
    Time horizon = kNever;
    std::uint64_t seed = 1;
};

/// Whether a tx's approver count is complete and inside the measurement window.
/// The window is anchored at the first approval t_i: all approvals arrive in
/// [t_i, t_i + h], so t_i + h <= horizon. Never-approved txs are only counted
/// (as n = 0) in a final tangle, since with a finite horizon they may still be
/// waiting for their first approver.
inline bool approval_window_complete(const Tangle& tangle, TxId x, Time warmup, Time horizon) {
    const Time first = tangle.first_approval_time(x);
    if (first == kNever) return horizon == kNever && tangle.tx(x).issue_time >= warmup;
    return first >= warmup && first + tangle.reveal_delay() <= horizon;
}

inline ApproverHistogram measure_approver_distribution(const Tangle& tangle, const MeasureOptions& options) {
    ApproverHistogram hist;
    if (options.sampling == Sampling::all) {
        for (TxId x = 0; x < tangle.size(); ++x)
            if (approval_window_complete(tangle, x, options.warmup, options.horizon))
                hist.add(tangle.edge_count(x));
    } else {
        Rng rng = make_stream(options.seed, "measure-walks");
        const Time at = options.horizon;
        const WalkConfig walk{};
        std::vector<char> eligible(tangle.size());
        for (TxId x = 0; x < tangle.size(); ++x)
            eligible[x] = approval_window_complete(tangle, x, options.warmup, options.horizon);
        for (std::size_t w = 0; w < options.walks; ++w) {
            TxId x = kGenesis;
            while (true) {
                if (eligible[x]) hist.add(tangle.edge_count(x));
                if (tangle.is_tip(x, at)) break;
                x = walk_step(tangle, x, walk, at, rng);
            }
        }
    }
    if (hist.sample_size == 0) throw Error("no eligible transactions to measure");
    return hist;
}

// ---------------------------------------------------------------------------
// Exit profiles

struct ExitProfile {
    std::vector<double> x;
    std::vector<double> e;
    std::size_t num_snapshots = 0;
    std::size_t walks_per_snapshot = 0;
    double mean_tip_count = 0.0;
};

/// Averages L-normalized exit probabilities of several tip sets on the grid
/// x_k = k / grid. Each snapshot's exits are sorted descending (rank 1 is the
/// most likely tip) and rank i covers relative indices ((i-1)/L, i/L].
inline ExitProfile exit_profile_from_counts(const std::vector<std::vector<std::uint64_t>>& exits_per_snapshot,
                                            std::size_t walks_per_snapshot, std::size_t grid) {
    if (grid == 0) throw Error("exit profile grid must be non-empty");
    if (walks_per_snapshot == 0) throw Error("need at least one walk per snapshot");
    ExitProfile profile;
    profile.num_snapshots = exits_per_snapshot.size();
    profile.walks_per_snapshot = walks_per_snapshot;
    profile.x.resize(grid);
    profile.e.assign(grid, 0.0);
    for (std::size_t k = 0; k < grid; ++k)
        profile.x[k] = static_cast<double>(k + 1) / static_cast<double>(grid);
    double tip_total = 0.0;
    for (auto counts : exits_per_snapshot) {
        if (counts.empty()) throw Error("snapshot without tips");
        std::sort(counts.begin(), counts.end(), std::greater<>());
        const double tips = static_cast<double>(counts.size());
        tip_total += tips;
        for (std::size_t k = 0; k < grid; ++k) {
            // ceil(x_k * L) computed in integers to avoid rounding at exact multiples.
            const std::size_t rank = ((k + 1) * counts.size() + grid - 1) / grid;
            profile.e[k] += tips * static_cast<double>(counts[rank - 1]) / static_cast<double>(walks_per_snapshot);
        }
    }
    if (profile.num_snapshots > 0) {
        for (double& v : profile.e) v /= static_cast<double>(profile.num_snapshots);
        profile.mean_tip_count = tip_total / static_cast<double>(profile.num_snapshots);
    }
    return profile;
}

/// Exit counts of `walks` tip selections on the tip set visible at the end of
/// one simulation; tips are reported in the order of visible_tips().
inline std::vector<std::uint64_t> snapshot_exit_counts(Simulation& sim, std::size_t walks, Rng& rng) {
    const Time at = sim.now();
    const auto tips = sim.visible_tips();
    std::vector<std::uint64_t> counts(tips.size(), 0);
    std::vector<std::size_t> index(sim.tangle().size(), 0);
    for (std::size_t i = 0; i < tips.size(); ++i) index[tips[i]] = i;
    const SimConfig& cfg = sim.config();
    if (cfg.selector == TipSelectorKind::urts) {
        std::uniform_int_distribution<std::size_t> pick(0, tips.size() - 1);
        for (std::size_t w = 0; w < walks; ++w) ++counts[pick(rng)];
    } else {
        WeightOracle* weights = cfg.alpha != 0.0 ? &sim.live_weights() : nullptr;
        for (std::size_t w = 0; w < walks; ++w)
            ++counts[index[walk_tip(sim.tangle(), cfg.walk(), at, rng, weights)]];
    }
    return counts;
}

/// Exit profile over `snapshots` independent simulations of length
/// config.horizon, each probed with `walks` tip selections.
inline ExitProfile measure_exit_profile(const SimConfig& config, std::size_t snapshots, std::size_t walks,
                                        std::size_t grid = 100) {
    config.validate();
    std::vector<std::vector<std::uint64_t>> exits;
    exits.reserve(snapshots);
    for (std::size_t k = 0; k < snapshots; ++k) {
        SimConfig c = config;
        c.seed = derive_seed(config.seed, "snapshot", k);
        Simulation sim(c);
        sim.run_until(c.horizon);
        Rng rng = make_stream(config.seed, "exit-walks", k);
        exits.push_back(snapshot_exit_counts(sim, walks, rng));
    }
    return exit_profile_from_counts(exits, walks, grid);
}

/// Least-squares slope of e(x) = 1 + a (x - 0.5), returned as |a| clamped to
/// [0, 2]. The linear exit model is symmetric under x -> 1 - x, so profiles
/// ranked in descending order (negative slope) give the same a.
inline double fit_linear_exit(const ExitProfile& profile) {
    if (profile.x.size() < 2 || profile.x.size() != profile.e.size())
        throw Error("need at least two profile points to fit");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < profile.x.size(); ++i) {
        const double dx = profile.x[i] - 0.5;
        num += dx * (profile.e[i] - 1.0);
        den += dx * dx;
    }
    if (den == 0.0) throw Error("degenerate exit profile");
    return std::clamp(std::abs(num / den), 0.0, 2.0);
}

} // namespace tangle
