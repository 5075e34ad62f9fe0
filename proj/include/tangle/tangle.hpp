#pragma once

// The Tangle: an append-only DAG of transactions with time-indexed visibility.
//
// Every transaction becomes visible to honest participants at its reveal
// time; approvals are visible only once the approving tx is revealed.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "types.hpp"

namespace tangle {

struct Transaction {
    TxId id = kGenesis;
    Time issue_time = 0.0;
    Time reveal_time = 0.0;
    Provenance provenance = Provenance::honest;

    std::span<const TxId> approvees() const { return {slots_.data(), num_approvees_}; }

private:
    friend class Tangle;
    std::array<TxId, 2> slots_{};
    std::uint8_t num_approvees_ = 0;
};

struct ConeSample {
    std::vector<TxId> members;
    bool truncated = false;
};

class Tangle {
public:
    explicit Tangle(EdgePolicy policy = EdgePolicy::sem, Time reveal_delay = 1.0)
        : policy_(policy), reveal_delay_(reveal_delay) {
        if (!(reveal_delay > 0.0)) throw Error("reveal delay must be positive");
        Transaction genesis;
        txs_.push_back(genesis);
        approvers_.emplace_back();
        first_approval_.push_back(kNever);
    }

    /// Appends a transaction approving `approvees` (one or two ids; a repeated id
    /// is one edge under SEM and two under MEM). Honest transactions may only
    /// approve txs revealed by `issue_time`. The reveal time defaults to
    /// issue_time + h; a later one models a withheld (secret) transaction.
    TxId attach(Time issue_time, std::span<const TxId> approvees,
                Provenance provenance = Provenance::honest,
                std::optional<Time> reveal_time = std::nullopt) {
        if (approvees.empty() || approvees.size() > 2)
            throw Error("a transaction approves one or two transactions");
        if (issue_time < clock_)
            throw Error("issue time " + std::to_string(issue_time) + " is before the tangle clock " +
                        std::to_string(clock_));
        for (TxId a : approvees) {
            if (a >= txs_.size()) throw Error("unknown approvee id " + std::to_string(a));
            if (provenance == Provenance::honest && txs_[a].reveal_time > issue_time)
                throw Error("approvee " + std::to_string(a) + " is not revealed at issue time");
        }
        const Time reveal = reveal_time.value_or(issue_time + reveal_delay_);
        if (reveal < issue_time) throw Error("reveal time precedes issue time");

        Transaction tx;
        tx.id = static_cast<TxId>(txs_.size());
        tx.issue_time = issue_time;
        tx.reveal_time = reveal;
        tx.provenance = provenance;
        tx.slots_[0] = approvees[0];
        tx.num_approvees_ = 1;
        if (approvees.size() == 2 && (approvees[1] != approvees[0] || policy_ == EdgePolicy::mem)) {
            tx.slots_[1] = approvees[1];
            tx.num_approvees_ = 2;
        }
        for (TxId a : tx.approvees()) {
            approvers_[a].push_back(tx.id);
            first_approval_[a] = std::min(first_approval_[a], issue_time);
        }
        txs_.push_back(tx);
        approvers_.emplace_back();
        first_approval_.push_back(kNever);
        clock_ = issue_time;
        return tx.id;
    }

    TxId attach(Time issue_time, std::initializer_list<TxId> approvees,
                Provenance provenance = Provenance::honest,
                std::optional<Time> reveal_time = std::nullopt) {
        return attach(issue_time, std::span<const TxId>(approvees.begin(), approvees.size()), provenance,
                      reveal_time);
    }

    void advance_clock(Time t) {
        if (t < clock_) throw Error("clock cannot move backwards");
        clock_ = t;
    }

    std::size_t size() const { return txs_.size(); }
    Time clock() const { return clock_; }
    EdgePolicy policy() const { return policy_; }
    Time reveal_delay() const { return reveal_delay_; }

    const Transaction& tx(TxId id) const { return txs_.at(id); }
    const std::vector<Transaction>& transactions() const { return txs_; }

    /// Approval edges pointing at `id`, one entry per edge (a MEM double
    /// approval appears twice, adjacently), in increasing approver id.
    std::span<const TxId> approvers(TxId id) const { return approvers_.at(id); }

    bool is_revealed(TxId id, Time at) const { return txs_[id].reveal_time <= at; }

    /// Number of approval edges regardless of visibility.
    std::size_t edge_count(TxId id) const { return approvers_.at(id).size(); }

    /// Number of approval edges whose approver is revealed at `at`.
    std::size_t edge_count_at(TxId id, Time at) const {
        std::size_t n = 0;
        for (TxId y : approvers_.at(id))
            if (txs_[y].reveal_time <= at) ++n;
        return n;
    }

    std::size_t distinct_approver_count(TxId id) const {
        const auto& ys = approvers_.at(id);
        std::size_t n = 0;
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (i == 0 || ys[i] != ys[i - 1]) ++n;
        return n;
    }

    /// Issue time of the first approver, or kNever.
    Time first_approval_time(TxId id) const { return first_approval_.at(id); }

    bool is_tip(TxId id, Time at) const {
        if (!is_revealed(id, at)) return false;
        for (TxId y : approvers_[id])
            if (txs_[y].reveal_time <= at) return false;
        return true;
    }

    std::vector<TxId> tips(Time at) const {
        std::vector<TxId> out;
        for (TxId i = 0; i < txs_.size(); ++i)
            if (is_tip(i, at)) out.push_back(i);
        return out;
    }

    /// Transactions revealed at `at` that directly or indirectly approve `x`.
    /// Stops after `max_size` members and sets the truncation flag.
    ConeSample future_cone(TxId x, Time at, std::optional<std::size_t> max_size = std::nullopt) const {
        ConeSample cone;
        if (x >= txs_.size()) throw Error("unknown transaction id " + std::to_string(x));
        std::vector<char> seen(txs_.size(), 0);
        std::vector<TxId> frontier{x};
        seen[x] = 1;
        for (std::size_t head = 0; head < frontier.size(); ++head) {
            for (TxId y : approvers_[frontier[head]]) {
                if (seen[y] || txs_[y].reveal_time > at) continue;
                if (max_size && cone.members.size() >= *max_size) {
                    cone.truncated = true;
                    return cone;
                }
                seen[y] = 1;
                cone.members.push_back(y);
                frontier.push_back(y);
            }
        }
        return cone;
    }

    /// Transactions directly or indirectly approved by `x`.
    std::vector<TxId> past_cone(TxId x) const {
        if (x >= txs_.size()) throw Error("unknown transaction id " + std::to_string(x));
        std::vector<char> seen(txs_.size(), 0);
        std::vector<TxId> out;
        std::vector<TxId> stack{x};
        while (!stack.empty()) {
            const TxId v = stack.back();
            stack.pop_back();
            for (TxId a : txs_[v].approvees()) {
                if (seen[a]) continue;
                seen[a] = 1;
                out.push_back(a);
                stack.push_back(a);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Own weight 1 plus the size of the visible future cone.
    std::size_t cumulative_weight(TxId x, Time at) const {
        if (x >= txs_.size() || !is_revealed(x, at))
            throw Error("transaction " + std::to_string(x) + " is not revealed");
        return 1 + future_cone(x, at).members.size();
    }

private:
    EdgePolicy policy_;
    Time reveal_delay_;
    Time clock_ = 0.0;
    std::vector<Transaction> txs_;
    std::vector<std::vector<TxId>> approvers_;
    std::vector<Time> first_approval_;
};

} // namespace tangle
