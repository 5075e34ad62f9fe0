#pragma once

// 1-pinned parasite chains built in secret and revealed atomically.
//
// Every chain starts with the double-spend tx D approving the root. The main
// PC is the sequence D = m_0, m_1, ... where m_k approves {root, m_{k-1}}.
// Kinds differ in how the remaining malicious txs are spent:
//
//   spc    every tx extends the main PC (p_root = 1, r = mu)
//   pc1    with probability p_root extend the main PC, otherwise approve two
//          main-PC txs whose in-PC approver count is below count_cap (raised
//          when fewer than two qualify)
//   mimic  greedily extend the main PC or add one approval to a recent main-PC
//          tx, whichever brings the main-PC approver-count distribution closest
//          (d_P) to `target`; side txs also approve the previous side tx

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "probability_vector.hpp"
#include "rng.hpp"
#include "simulator.hpp"
#include "tangle.hpp"

namespace tangle {

enum class AttackKind : std::uint8_t { spc, pc1, mimic };

inline std::string_view to_string(AttackKind k) {
    switch (k) {
    case AttackKind::spc: return "spc";
    case AttackKind::pc1: return "pc1";
    case AttackKind::mimic: return "mimic";
    }
    return "?";
}

inline AttackKind parse_attack_kind(std::string_view s) {
    if (s == "spc" || s == "SPC") return AttackKind::spc;
    if (s == "pc1" || s == "PC1") return AttackKind::pc1;
    if (s == "mimic" || s == "MIMIC") return AttackKind::mimic;
    throw Error("unknown attack kind: " + std::string(s));
}

struct AttackSpec {
    AttackKind kind = AttackKind::spc;
    double mu = 50.0;
    double p_root = 1.0;
    TxId root = kGenesis;
    Time start = 0.0;
    Time build_duration = 10.0;
    /// Atomic reveal of the whole chain; kNever means start + build_duration.
    Time reveal_time = kNever;
    /// mimic: distribution the main PC should reproduce.
    ProbabilityVector target;
    /// pc1: side txs only raise main-PC txs with fewer in-PC approvers than this.
    std::size_t count_cap = 2;
    /// mimic: number of most recent main-PC txs eligible for extra approvals.
    std::size_t locality = 10;
    std::uint64_t seed = 1;

    Time reveal() const { return reveal_time == kNever ? start + build_duration : reveal_time; }
    Time build_end() const { return std::min(start + build_duration, reveal()); }

    void validate() const {
        if (!(mu > 0.0)) throw Error("attacker rate mu must be positive");
        if (!(p_root > 0.0 && p_root <= 1.0)) throw Error("p_root must lie in (0, 1]");
        if (build_duration < 0.0) throw Error("build duration must be non-negative");
        if (reveal() < start) throw Error("reveal precedes attack start");
        if (kind == AttackKind::mimic) {
            if (target.size() < 2 || std::abs(target.sum() - 1.0) > 1e-9)
                throw Error("mimic target must be a normalized distribution");
            if (target[0] > 0.0) throw Error("mimic target cannot put mass on n = 0");
            if (locality == 0) throw Error("mimic locality must be positive");
        }
        if (kind == AttackKind::pc1 && count_cap < 2) throw Error("pc1 count cap must be at least 2");
    }
};

struct AttackReport {
    AttackKind kind = AttackKind::spc;
    double mu = 0.0;
    double p_root = 1.0;
    std::size_t num_malicious = 0;
    /// Malicious txs directly approving the root.
    std::size_t root_links = 0;
    /// Approvee slots pointing at PC txs / at main-Tangle txs other than the root.
    std::size_t pc_slots = 0;
    std::size_t root_slots = 0;
    std::size_t other_slots = 0;
    double effective_rate_r = 0.0;
    /// In-PC approver counts over all PC txs, before reveal.
    ProbabilityVector pc_internal_distribution;
    double mean_n_pc = 0.0;
    /// d_P between the main-PC count distribution (head excluded) and the
    /// mimic target, or NaN when there is no target.
    double residual_dp = std::nan("");
    TxId double_spend = kGenesis;
    std::vector<TxId> main_chain;
    std::vector<TxId> members;
    /// In-PC approver counts along the main PC, oldest first, head excluded.
    std::vector<std::size_t> main_chain_counts;
};

/// Root links per unit of build time.
inline double effective_rate(const AttackReport& report, Time duration) {
    if (!(duration > 0.0)) throw Error("duration must be positive");
    return static_cast<double>(report.root_links) / duration;
}

namespace detail {

inline double half_l1(const std::vector<std::uint64_t>& hist, std::uint64_t total, const ProbabilityVector& target) {
    double d = 0.0;
    const std::size_t n = std::max(hist.size(), target.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double p = i < hist.size() ? static_cast<double>(hist[i]) / static_cast<double>(total) : 0.0;
        d += std::abs(p - target[i]);
    }
    return 0.5 * d;
}

} // namespace detail

/// Attacker arrival process; also usable stand-alone on a Tangle.
class ParasiteChainBuilder final : public ArrivalProcess {
public:
    explicit ParasiteChainBuilder(AttackSpec spec) : spec_(std::move(spec)), rng_(make_stream(spec_.seed, "attack")) {
        spec_.validate();
        next_ = spec_.start + gap();
        if (next_ >= spec_.build_end() || spec_.build_duration == 0.0) next_ = kNever;
    }

    const AttackSpec& spec() const { return spec_; }

    Time next_arrival() const override { return next_; }

    void arrive(Tangle& tangle) override {
        const Time t = next_;
        if (main_.empty()) {
            if (spec_.root >= tangle.size() || !tangle.is_revealed(spec_.root, spec_.start))
                throw Error("parasite chain root is not revealed at attack start");
            extend(tangle, t, {spec_.root, spec_.root});
        } else {
            switch (spec_.kind) {
            case AttackKind::spc: extend(tangle, t, {spec_.root, main_.back()}); break;
            case AttackKind::pc1: arrive_pc1(tangle, t); break;
            case AttackKind::mimic: arrive_mimic(tangle, t); break;
            }
        }
        next_ = t + gap();
        if (next_ >= spec_.build_end()) next_ = kNever;
    }

    AttackReport report() const {
        AttackReport r;
        r.kind = spec_.kind;
        r.mu = spec_.mu;
        r.p_root = spec_.kind == AttackKind::spc ? 1.0 : spec_.p_root;
        r.num_malicious = members_.size();
        r.root_links = root_links_;
        r.pc_slots = pc_slots_;
        r.root_slots = root_slots_;
        r.other_slots = other_slots_;
        r.effective_rate_r =
            spec_.build_duration > 0.0 ? static_cast<double>(root_links_) / (spec_.build_end() - spec_.start) : 0.0;
        r.double_spend = main_.empty() ? kGenesis : main_.front();
        r.main_chain = main_;
        r.members = members_;
        if (!members_.empty()) {
            std::vector<std::size_t> counts;
            counts.reserve(members_.size());
            for (TxId m : members_) counts.push_back(in_pc_.at(m));
            r.pc_internal_distribution = ProbabilityVector::from_sample<std::size_t>(counts);
            r.mean_n_pc = r.pc_internal_distribution.mean();
        }
        for (std::size_t k = 0; k + 1 < main_.size(); ++k) r.main_chain_counts.push_back(in_pc_.at(main_[k]));
        if (spec_.target.size() > 0 && !r.main_chain_counts.empty()) {
            std::vector<std::uint64_t> hist;
            for (std::size_t n : r.main_chain_counts) {
                if (hist.size() <= n) hist.resize(n + 1, 0);
                ++hist[n];
            }
            r.residual_dp = detail::half_l1(hist, r.main_chain_counts.size(), spec_.target);
        }
        return r;
    }

private:
    Time gap() { return std::exponential_distribution<double>(spec_.mu)(rng_); }

    TxId attach(Tangle& tangle, Time t, std::array<TxId, 2> approvees) {
        for (TxId a : approvees) {
            if (a == spec_.root) ++root_slots_;
            else if (in_pc_.count(a)) ++pc_slots_;
            else ++other_slots_;
        }
        const TxId id = tangle.attach(t, approvees, Provenance::malicious, spec_.reveal());
        for (TxId a : tangle.tx(id).approvees()) {
            auto it = in_pc_.find(a);
            if (it != in_pc_.end()) {
                ++it->second;
                if (auto pos = main_index_.find(a); pos != main_index_.end()) bump_main(pos->second);
            }
        }
        const auto av = tangle.tx(id).approvees();
        if (std::find(av.begin(), av.end(), spec_.root) != av.end()) ++root_links_;
        in_pc_.emplace(id, 0);
        members_.push_back(id);
        return id;
    }

    void extend(Tangle& tangle, Time t, std::array<TxId, 2> approvees) {
        const TxId id = attach(tangle, t, approvees);
        if (!main_.empty()) {
            // The old head leaves the tracked head slot and joins the histogram.
            add_to_hist(in_pc_.at(main_.back()));
        }
        main_index_.emplace(id, main_.size());
        main_.push_back(id);
    }

    void add_to_hist(std::size_t n) {
        if (hist_.size() <= n) hist_.resize(n + 1, 0);
        ++hist_[n];
        ++hist_total_;
    }

    // Keeps the non-head histogram in sync when a main-PC tx gains an approver.
    void bump_main(std::size_t index) {
        if (index + 1 == main_.size()) return;  // head, not in histogram yet
        const std::size_t now = in_pc_.at(main_[index]);
        --hist_[now - 1];
        if (hist_.size() <= now) hist_.resize(now + 1, 0);
        ++hist_[now];
    }

    void arrive_pc1(Tangle& tangle, Time t) {
        // No draw at p_root = 1 so the stream matches an SPC with the same seed.
        if (main_.size() < 3 || spec_.p_root >= 1.0 || std::bernoulli_distribution(spec_.p_root)(rng_)) {
            extend(tangle, t, {spec_.root, main_.back()});
            return;
        }
        // Side txs never link the root, so r = p_root mu. When fewer than two
        // non-head main-PC txs are below the cap, the cap is raised to the
        // second-lowest count plus one.
        std::vector<std::size_t> counts;
        counts.reserve(main_.size() - 1);
        for (std::size_t k = 0; k + 1 < main_.size(); ++k) counts.push_back(in_pc_.at(main_[k]));
        std::size_t cap = spec_.count_cap;
        if (std::count_if(counts.begin(), counts.end(), [&](std::size_t n) { return n < cap; }) < 2) {
            std::vector<std::size_t> sorted = counts;
            std::nth_element(sorted.begin(), sorted.begin() + 1, sorted.end());
            cap = std::max(sorted[0], sorted[1]) + 1;
        }
        std::vector<TxId> eligible;
        for (std::size_t k = 0; k < counts.size(); ++k)
            if (counts[k] < cap) eligible.push_back(main_[k]);
        std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
        const std::size_t i = pick(rng_);
        std::size_t j = pick(rng_);
        while (j == i) j = pick(rng_);
        attach(tangle, t, {eligible[i], eligible[j]});
    }

    void arrive_mimic(Tangle& tangle, Time t) {
        const std::size_t completed = main_.size() - 1;  // non-head main-PC txs
        if (completed == 0) {
            extend(tangle, t, {spec_.root, main_.back()});
            return;
        }
        // Candidates: one extra approval on a recent main-PC tx, kept only if it
        // strictly lowers the current distance, and extending the chain, which
        // adds the head's final count to the histogram. The smallest distance
        // wins; ties go to the oldest tx, then to extension.
        std::vector<std::uint64_t> trial = hist_;
        const double current = detail::half_l1(hist_, hist_total_, spec_.target);
        const std::size_t first = completed > spec_.locality ? completed - spec_.locality : 0;
        double best = kNever;
        std::size_t best_index = completed;  // completed == extend
        for (std::size_t k = first; k < completed; ++k) {
            const std::size_t n = in_pc_.at(main_[k]);
            if (trial.size() <= n + 1) trial.resize(n + 2, 0);
            --trial[n];
            ++trial[n + 1];
            const double d = detail::half_l1(trial, hist_total_, spec_.target);
            ++trial[n];
            --trial[n + 1];
            if (d < current && d < best) {
                best = d;
                best_index = k;
            }
        }
        {
            const std::size_t head_final = in_pc_.at(main_.back()) + 1;
            if (trial.size() <= head_final) trial.resize(head_final + 1, 0);
            ++trial[head_final];
            const double d = detail::half_l1(trial, hist_total_ + 1, spec_.target);
            if (d < best) best_index = completed;
        }
        if (best_index == completed) {
            extend(tangle, t, {spec_.root, main_.back()});
            return;
        }
        const TxId target_tx = main_[best_index];
        const TxId tail = last_side_ ? *last_side_ : target_tx;
        last_side_ = attach(tangle, t, {target_tx, tail});
    }

    AttackSpec spec_;
    Rng rng_;
    Time next_ = kNever;
    std::vector<TxId> main_;
    std::unordered_map<TxId, std::size_t> main_index_;
    std::vector<TxId> members_;
    std::unordered_map<TxId, std::size_t> in_pc_;
    std::optional<TxId> last_side_;
    std::vector<std::uint64_t> hist_;
    std::uint64_t hist_total_ = 0;
    std::size_t root_links_ = 0;
    std::size_t root_slots_ = 0;
    std::size_t pc_slots_ = 0;
    std::size_t other_slots_ = 0;
};

/// Builds the chain on a Tangle without honest traffic.
inline AttackReport build_parasite_chain(Tangle& tangle, const AttackSpec& spec) {
    ParasiteChainBuilder builder(spec);
    if (spec.root >= tangle.size() || !tangle.is_revealed(spec.root, spec.start))
        throw Error("parasite chain root is not revealed at attack start");
    while (builder.next_arrival() != kNever) builder.arrive(tangle);
    if (tangle.clock() < spec.reveal()) tangle.advance_clock(spec.reveal());
    return builder.report();
}

/// Builds the chain interleaved with the simulation's honest arrivals; the
/// simulation is advanced to the reveal time.
inline AttackReport build_parasite_chain(Simulation& sim, const AttackSpec& spec) {
    if (sim.now() > spec.start) throw Error("simulation is already past the attack start");
    ParasiteChainBuilder builder(spec);
    sim.run_until(spec.start);
    if (spec.root >= sim.tangle().size() || !sim.tangle().is_revealed(spec.root, spec.start))
        throw Error("parasite chain root is not revealed at attack start");
    sim.run_until(spec.reveal(), &builder);
    return builder.report();
}

namespace detail {
inline void require_kind(const AttackSpec& spec, AttackKind kind) {
    if (spec.kind != kind) throw Error("attack spec kind mismatch");
}
} // namespace detail

template <class Host>
AttackReport build_spc(Host& host, const AttackSpec& spec) {
    detail::require_kind(spec, AttackKind::spc);
    return build_parasite_chain(host, spec);
}

template <class Host>
AttackReport build_pc1(Host& host, const AttackSpec& spec) {
    detail::require_kind(spec, AttackKind::pc1);
    return build_parasite_chain(host, spec);
}

template <class Host>
AttackReport build_mimic(Host& host, const AttackSpec& spec) {
    detail::require_kind(spec, AttackKind::mimic);
    return build_parasite_chain(host, spec);
}

/// p_root of the PC_A strategy: on average 0.5 P*(2) side txs per main-PC tx,
/// lifting a fraction P*(2) of main-PC txs to two approvers.
inline double pc_a_root_probability(const ProbabilityVector& walk_reference) {
    return 1.0 / (1.0 + 0.5 * walk_reference[2]);
}

/// Root-link rate of a main PC whose counts follow `target`, one tx per
/// extra approval: (1 + sum_n (n - 1) P(n))^-1.
inline double mimic_rate_fraction(const ProbabilityVector& target) {
    double extra = 0.0;
    for (std::size_t n = 1; n < target.size(); ++n) extra += static_cast<double>(n - 1) * target[n];
    return 1.0 / (1.0 + extra);
}

} // namespace tangle
