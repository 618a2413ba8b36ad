#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "driftstream/core.hpp"
#include "driftstream/streams.hpp"

namespace driftstream::testing {

// Straightforward ADWIN mirror: same bucket rules as the production
// detector but with naive bookkeeping (aggregates recomputed from scratch
// every step). Used to cross-check the incremental implementation.
class NaiveAdwin {
  public:
    explicit NaiveAdwin(double delta = 0.002, int max_per_level = 5)
        : delta_(delta), max_per_level_(max_per_level) {}

    bool update(double value) {
        buckets_.push_back({value, 1, 0});
        // compress levels with more than M buckets: merge the two oldest
        for (int level = 0;; ++level) {
            std::vector<std::size_t> at_level;
            for (std::size_t i = 0; i < buckets_.size(); ++i)
                if (buckets_[i].level == level)
                    at_level.push_back(i);
            if (at_level.size() <= static_cast<std::size_t>(max_per_level_))
                break;
            const std::size_t a = at_level[0], b = at_level[1];
            Bucket merged{buckets_[a].sum + buckets_[b].sum,
                          buckets_[a].count + buckets_[b].count, level + 1};
            // merged bucket takes the position just before the remaining
            // buckets of this level (i.e. newest of level+1)
            std::vector<Bucket> rebuilt;
            for (std::size_t i = 0; i < buckets_.size(); ++i) {
                if (i == a)
                    rebuilt.push_back(merged);
                else if (i != b)
                    rebuilt.push_back(buckets_[i]);
            }
            buckets_ = std::move(rebuilt);
        }

        bool dropped = false;
        for (;;) {
            if (buckets_.size() < 2)
                break;
            std::uint64_t total_n = 0;
            double total_s = 0.0;
            for (const auto& b : buckets_) {
                total_n += b.count;
                total_s += b.sum;
            }
            std::ptrdiff_t cut = -1;
            std::uint64_t n0 = 0;
            double s0 = 0.0;
            for (std::size_t i = 0; i + 1 < buckets_.size(); ++i) {
                n0 += buckets_[i].count;
                s0 += buckets_[i].sum;
                const std::uint64_t n1 = total_n - n0;
                const double m = 1.0 / (1.0 / double(n0) + 1.0 / double(n1));
                const double eps =
                    std::sqrt(std::log(4.0 * double(total_n) / delta_) / (2.0 * m));
                if (std::fabs(s0 / double(n0) - (total_s - s0) / double(n1)) >= eps)
                    cut = static_cast<std::ptrdiff_t>(i);
            }
            if (cut < 0)
                break;
            buckets_.erase(buckets_.begin(), buckets_.begin() + cut + 1);
            dropped = true;
        }
        return dropped;
    }

    std::uint64_t window_length() const {
        std::uint64_t n = 0;
        for (const auto& b : buckets_)
            n += b.count;
        return n;
    }

  private:
    struct Bucket {
        double sum;
        std::uint64_t count;
        int level;
    };
    double delta_;
    int max_per_level_;
    std::vector<Bucket> buckets_;  // oldest first
};

// Scalar DDM recurrence evaluated directly from the definitions. Returns
// the 0-based indices of the first Warning and first Drift (-1 = never).
struct DdmOracleResult {
    long first_warning = -1;
    long first_drift = -1;
};

inline DdmOracleResult ddm_oracle(const std::vector<int>& errors, double warn_coeff = 2.0,
                                  double drift_coeff = 3.0, int min_instances = 30) {
    DdmOracleResult out;
    double n = 0, bad = 0;
    double pmin = 0, smin = 0;
    bool has_min = false;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        n += 1;
        bad += errors[i];
        if (n < min_instances)
            continue;
        const double p = bad / n;
        const double s = std::sqrt(p * (1 - p) / n);
        if (!has_min || p + s < pmin + smin) {
            pmin = p;
            smin = s;
            has_min = true;
        }
        if (p + s > pmin + drift_coeff * smin) {
            if (out.first_drift < 0)
                out.first_drift = static_cast<long>(i);
            n = bad = 0;
            has_min = false;
            pmin = smin = 0;
            continue;
        }
        if (p + s > pmin + warn_coeff * smin && out.first_warning < 0)
            out.first_warning = static_cast<long>(i);
    }
    return out;
}

// Independent entropy / information gain, for checking split decisions.
inline double oracle_entropy(const std::vector<double>& counts) {
    double total = 0;
    for (double c : counts)
        total += c;
    if (total <= 0)
        return 0.0;
    double h = 0;
    for (double c : counts)
        if (c > 0)
            h -= (c / total) * std::log2(c / total);
    return h;
}

inline double oracle_gain(const std::vector<double>& parent, const std::vector<double>& left,
                          const std::vector<double>& right) {
    double n = 0, nl = 0, nr = 0;
    for (double c : parent)
        n += c;
    for (double c : left)
        nl += c;
    for (double c : right)
        nr += c;
    if (n <= 0 || nl <= 0 || nr <= 0)
        return 0.0;
    return oracle_entropy(parent) - (nl / n) * oracle_entropy(left) -
           (nr / n) * oracle_entropy(right);
}

inline double percentile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const std::size_t idx = static_cast<std::size_t>(q * (values.size() - 1));
    return values[idx];
}

// 1-D threshold stream: label = (f1 > cut), optional label noise.
inline std::vector<LabeledInstance> threshold_stream(std::size_t n, double cut,
                                                     std::uint64_t seed, int extra_features = 0,
                                                     double noise = 0.0) {
    SeededRng rng(seed);
    std::vector<LabeledInstance> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LabeledInstance rec;
        rec.instance.features.resize(1 + extra_features);
        for (double& f : rec.instance.features)
            f = rng.uniform();
        rec.label = rec.instance.features[0] > cut ? 1 : 0;
        if (noise > 0 && rng.bernoulli(noise))
            rec.label = 1 - rec.label;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace driftstream::testing
