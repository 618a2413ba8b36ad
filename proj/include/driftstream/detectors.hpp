#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "driftstream/core.hpp"

namespace driftstream {

struct AdwinConfig {
    double delta = 0.002;          // cut confidence
    int max_buckets_per_level = 5; // M
    void validate() const;
};

// Adaptive windowing over an exponential histogram. Buckets at level L hold
// 2^L elements; when a level exceeds M buckets its two oldest are merged one
// level up. Every insertion checks all bucket-boundary splits of the window
// and drops the older sub-window whenever two sub-window means differ by
// more than the Hoeffding-style cut threshold.
class AdwinDetector {
  public:
    explicit AdwinDetector(AdwinConfig cfg = {});

    // value must lie in [0,1]; 0/1 error indicators in practice
    DriftSignal update(double value);
    void reset();

    std::uint64_t window_length() const { return total_count_; }
    double window_sum() const { return total_sum_; }
    double mean() const { return total_count_ ? total_sum_ / total_count_ : 0.0; }
    const AdwinConfig& config() const { return cfg_; }

    struct Bucket {
        double sum = 0.0;
        std::uint64_t count = 0;
    };
    // Oldest-first view of the window's buckets.
    std::vector<Bucket> buckets_oldest_first() const;
    std::size_t bucket_count() const;

    // Cut threshold for sub-windows of sizes n0/n1 within a window of
    // length `window`: eps = sqrt(ln(4/delta') / (2m)) with
    // m = 1/(1/n0 + 1/n1) and delta' = delta / window.
    static double cut_threshold(double delta, std::uint64_t window, std::uint64_t n0,
                                std::uint64_t n1);

  private:
    bool drop_oldest_while_cut();

    AdwinConfig cfg_;
    // levels_[L] holds buckets of 2^L elements, oldest first
    std::vector<std::deque<Bucket>> levels_;
    std::uint64_t total_count_ = 0;
    double total_sum_ = 0.0;
};

struct DdmConfig {
    double warning_coeff = 2.0;
    double drift_coeff = 3.0;
    int min_instances = 30;
    void validate() const;
};

// Error-rate monitor: tracks p (running error probability) and
// s = sqrt(p(1-p)/n), records the joint minimum of p+s, and signals
// Warning / Drift when p+s climbs past p_min + coeff*s_min.
class DdmDetector {
  public:
    explicit DdmDetector(DdmConfig cfg = {});

    DriftSignal update(int error);  // error in {0,1}
    void reset();

    std::uint64_t instances() const { return n_; }
    double error_rate() const;
    double deviation() const;
    double p_min() const { return p_min_; }
    double s_min() const { return s_min_; }
    const DdmConfig& config() const { return cfg_; }

  private:
    DdmConfig cfg_;
    std::uint64_t n_ = 0;
    std::uint64_t errors_ = 0;
    double p_min_ = 0.0;
    double s_min_ = 0.0;
    bool has_min_ = false;
};

}  // namespace driftstream
