#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "types.hpp"

namespace tangle {

/// Finite distribution over approver counts n = 0, 1, 2, ...
/// Entries beyond the stored support read as zero.
class ProbabilityVector {
public:
    ProbabilityVector() = default;
    explicit ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
        for (double p : probs_)
            if (!(p >= 0.0)) throw Error("probabilities must be non-negative");
    }

    /// Normalized histogram of the counts in `sample`.
    template <class Int>
    static ProbabilityVector from_sample(std::span<const Int> sample) {
        if (sample.empty()) throw Error("empty sample");
        const auto max = *std::max_element(sample.begin(), sample.end());
        std::vector<double> p(static_cast<std::size_t>(max) + 1, 0.0);
        for (auto n : sample) p[static_cast<std::size_t>(n)] += 1.0;
        for (double& v : p) v /= static_cast<double>(sample.size());
        return ProbabilityVector(std::move(p));
    }

    static ProbabilityVector point_mass(std::size_t n) {
        std::vector<double> p(n + 1, 0.0);
        p[n] = 1.0;
        return ProbabilityVector(std::move(p));
    }

    double operator[](std::size_t n) const { return n < probs_.size() ? probs_[n] : 0.0; }
    std::size_t size() const { return probs_.size(); }
    const std::vector<double>& values() const { return probs_; }

    double sum() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

    double mean() const {
        double m = 0.0;
        for (std::size_t n = 0; n < probs_.size(); ++n) m += static_cast<double>(n) * probs_[n];
        return m;
    }

    /// Q(n) = sum_{m >= n} P(m).
    double survival(std::size_t n) const {
        double q = 0.0;
        for (std::size_t m = n; m < probs_.size(); ++m) q += probs_[m];
        return q;
    }

    void normalize() {
        const double s = sum();
        if (!(s > 0.0)) throw Error("cannot normalize a zero vector");
        for (double& p : probs_) p /= s;
    }

private:
    std::vector<double> probs_;
};

} // namespace tangle
