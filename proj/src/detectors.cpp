#include "driftstream/detectors.hpp"

#include <cmath>

namespace driftstream {

void AdwinConfig::validate() const {
    if (!(delta > 0.0 && delta < 1.0))
        throw ConfigError("adwin: delta must be in (0,1)");
    if (max_buckets_per_level < 1)
        throw ConfigError("adwin: max_buckets_per_level must be >= 1");
}

AdwinDetector::AdwinDetector(AdwinConfig cfg) : cfg_(cfg) {
    cfg_.validate();
}

void AdwinDetector::reset() {
    levels_.clear();
    total_count_ = 0;
    total_sum_ = 0.0;
}

std::size_t AdwinDetector::bucket_count() const {
    std::size_t n = 0;
    for (const auto& level : levels_)
        n += level.size();
    return n;
}

std::vector<AdwinDetector::Bucket> AdwinDetector::buckets_oldest_first() const {
    std::vector<Bucket> out;
    out.reserve(bucket_count());
    for (auto level = levels_.rbegin(); level != levels_.rend(); ++level)
        for (const Bucket& b : *level)
            out.push_back(b);
    return out;
}

double AdwinDetector::cut_threshold(double delta, std::uint64_t window, std::uint64_t n0,
                                    std::uint64_t n1) {
    const double m = 1.0 / (1.0 / static_cast<double>(n0) + 1.0 / static_cast<double>(n1));
    const double delta_prime = delta / static_cast<double>(window);
    return std::sqrt(std::log(4.0 / delta_prime) / (2.0 * m));
}

DriftSignal AdwinDetector::update(double value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw ConfigError("adwin: value must be in [0,1]");

    if (levels_.empty())
        levels_.emplace_back();
    levels_[0].push_back(Bucket{value, 1});
    total_sum_ += value;
    total_count_ += 1;

    // compress: merge the two oldest buckets of any level holding more than M
    for (std::size_t lvl = 0; lvl < levels_.size(); ++lvl) {
        if (levels_[lvl].size() <= static_cast<std::size_t>(cfg_.max_buckets_per_level))
            break;
        Bucket a = levels_[lvl].front();
        levels_[lvl].pop_front();
        Bucket b = levels_[lvl].front();
        levels_[lvl].pop_front();
        if (lvl + 1 >= levels_.size())
            levels_.emplace_back();
        levels_[lvl + 1].push_back(Bucket{a.sum + b.sum, a.count + b.count});
    }

    return drop_oldest_while_cut() ? DriftSignal::Drift : DriftSignal::Stable;
}

bool AdwinDetector::drop_oldest_while_cut() {
    bool dropped_any = false;
    for (;;) {
        const std::vector<Bucket> window = buckets_oldest_first();
        if (window.size() < 2)
            break;

        // newest boundary whose two sub-windows differ by more than the cut
        std::uint64_t n0 = 0;
        double s0 = 0.0;
        std::ptrdiff_t cut_at = -1;
        for (std::size_t i = 0; i + 1 < window.size(); ++i) {
            n0 += window[i].count;
            s0 += window[i].sum;
            const std::uint64_t n1 = total_count_ - n0;
            const double mean0 = s0 / static_cast<double>(n0);
            const double mean1 = (total_sum_ - s0) / static_cast<double>(n1);
            if (std::fabs(mean0 - mean1) >=
                cut_threshold(cfg_.delta, total_count_, n0, n1))
                cut_at = static_cast<std::ptrdiff_t>(i);
        }
        if (cut_at < 0)
            break;

        // drop W0: all buckets up to and including the cut boundary
        std::ptrdiff_t remaining = cut_at + 1;
        for (auto level = levels_.rbegin(); level != levels_.rend() && remaining > 0; ++level) {
            while (!level->empty() && remaining > 0) {
                total_sum_ -= level->front().sum;
                total_count_ -= level->front().count;
                level->pop_front();
                --remaining;
            }
        }
        while (!levels_.empty() && levels_.back().empty())
            levels_.pop_back();
        dropped_any = true;
    }
    return dropped_any;
}

void DdmConfig::validate() const {
    if (warning_coeff <= 0.0 || drift_coeff <= 0.0)
        throw ConfigError("ddm: coefficients must be positive");
    if (drift_coeff < warning_coeff)
        throw ConfigError("ddm: drift_coeff must be >= warning_coeff");
    if (min_instances < 1)
        throw ConfigError("ddm: min_instances must be >= 1");
}

DdmDetector::DdmDetector(DdmConfig cfg) : cfg_(cfg) {
    cfg_.validate();
}

void DdmDetector::reset() {
    n_ = 0;
    errors_ = 0;
    p_min_ = 0.0;
    s_min_ = 0.0;
    has_min_ = false;
}

double DdmDetector::error_rate() const {
    return n_ ? static_cast<double>(errors_) / static_cast<double>(n_) : 0.0;
}

double DdmDetector::deviation() const {
    if (n_ == 0)
        return 0.0;
    const double p = error_rate();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n_));
}

DriftSignal DdmDetector::update(int error) {
    if (error != 0 && error != 1)
        throw ConfigError("ddm: error must be 0 or 1");
    n_ += 1;
    errors_ += error;

    if (n_ < static_cast<std::uint64_t>(cfg_.min_instances))
        return DriftSignal::Stable;

    const double p = error_rate();
    const double s = deviation();
    if (!has_min_ || p + s < p_min_ + s_min_) {
        p_min_ = p;
        s_min_ = s;
        has_min_ = true;
    }

    // strict comparisons: a flat-zero error stream never signals
    if (p + s > p_min_ + cfg_.drift_coeff * s_min_) {
        reset();
        return DriftSignal::Drift;
    }
    if (p + s > p_min_ + cfg_.warning_coeff * s_min_)
        return DriftSignal::Warning;
    return DriftSignal::Stable;
}

}  // namespace driftstream
