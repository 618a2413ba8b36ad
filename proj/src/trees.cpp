#include "driftstream/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace driftstream {

void HoeffdingTreeConfig::validate() const {
    if (!(delta > 0.0 && delta < 1.0))
        throw ConfigError("tree: delta must be in (0,1)");
    if (grace_period < 1)
        throw ConfigError("tree: grace_period must be >= 1");
    if (tie_threshold < 0.0)
        throw ConfigError("tree: tie_threshold must be >= 0");
    if (numeric_bins < 2)
        throw ConfigError("tree: numeric_bins must be >= 2");
    if (max_depth && *max_depth < 1)
        throw ConfigError("tree: max_depth must be >= 1");
}

double hoeffding_bound(double range, double delta, double n) {
    if (!(range > 0.0))
        throw ConfigError("hoeffding_bound: range must be positive");
    if (!(delta > 0.0 && delta < 1.0))
        throw ConfigError("hoeffding_bound: delta must be in (0,1)");
    if (!(n >= 1.0))
        throw ConfigError("hoeffding_bound: n must be >= 1");
    return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

FeatureHistogram::FeatureHistogram(int bins, int classes)
    : bins_(bins), classes_(classes), counts_(static_cast<std::size_t>(bins) * classes, 0.0) {}

int FeatureHistogram::bin_index(double value) const {
    if (hi_ <= lo_)
        return 0;
    const double t = (value - lo_) / (hi_ - lo_);
    const int idx = static_cast<int>(t * bins_);
    return std::clamp(idx, 0, bins_ - 1);
}

void FeatureHistogram::add(double value, int cls, double weight) {
    if (!seen_) {
        seen_ = true;
        lo_ = hi_ = value;
    } else if (value < lo_ || value > hi_) {
        widen(std::min(lo_, value), std::max(hi_, value));
    }
    counts_[static_cast<std::size_t>(bin_index(value)) * classes_ + cls] += weight;
}

void FeatureHistogram::widen(double new_lo, double new_hi) {
    std::vector<double> fresh(counts_.size(), 0.0);
    const double new_width = (new_hi - new_lo) / bins_;
    if (hi_ <= lo_) {
        // all existing mass sits at the single point lo_
        const double t = (lo_ - new_lo) / (new_hi - new_lo);
        const int idx = std::clamp(static_cast<int>(t * bins_), 0, bins_ - 1);
        for (int c = 0; c < classes_; ++c)
            for (int b = 0; b < bins_; ++b)
                fresh[static_cast<std::size_t>(idx) * classes_ + c] +=
                    counts_[static_cast<std::size_t>(b) * classes_ + c];
    } else {
        const double old_width = (hi_ - lo_) / bins_;
        for (int b = 0; b < bins_; ++b) {
            const double a0 = lo_ + b * old_width;
            const double a1 = (b == bins_ - 1) ? hi_ : a0 + old_width;
            int nb_lo = std::clamp(static_cast<int>((a0 - new_lo) / new_width), 0, bins_ - 1);
            int nb_hi = std::clamp(static_cast<int>((a1 - new_lo) / new_width), 0, bins_ - 1);
            for (int nb = nb_lo; nb <= nb_hi; ++nb) {
                const double e0 = new_lo + nb * new_width;
                const double e1 = (nb == bins_ - 1) ? new_hi : e0 + new_width;
                const double overlap = std::min(a1, e1) - std::max(a0, e0);
                if (overlap <= 0.0)
                    continue;
                const double frac = overlap / (a1 - a0);
                for (int c = 0; c < classes_; ++c)
                    fresh[static_cast<std::size_t>(nb) * classes_ + c] +=
                        frac * counts_[static_cast<std::size_t>(b) * classes_ + c];
            }
        }
    }
    counts_ = std::move(fresh);
    lo_ = new_lo;
    hi_ = new_hi;
}

double FeatureHistogram::total_weight() const {
    return std::accumulate(counts_.begin(), counts_.end(), 0.0);
}

std::vector<double> FeatureHistogram::class_totals() const {
    std::vector<double> totals(classes_, 0.0);
    for (int b = 0; b < bins_; ++b)
        for (int c = 0; c < classes_; ++c)
            totals[c] += count(b, c);
    return totals;
}

double FeatureHistogram::boundary_value(int i) const {
    return lo_ + i * (hi_ - lo_) / bins_;
}

std::pair<std::vector<double>, std::vector<double>> FeatureHistogram::partition(
    int boundary) const {
    std::vector<double> below(classes_, 0.0), above(classes_, 0.0);
    for (int b = 0; b < bins_; ++b)
        for (int c = 0; c < classes_; ++c)
            (b < boundary ? below : above)[c] += count(b, c);
    return {below, above};
}

namespace {

double entropy_bits(const std::vector<double>& counts, double total) {
    if (total <= 0.0)
        return 0.0;
    double h = 0.0;
    for (double c : counts) {
        if (c <= 0.0)
            continue;
        const double p = c / total;
        h -= p * std::log2(p);
    }
    return h;
}

double info_gain(const std::vector<double>& parent, const std::vector<double>& below,
                 const std::vector<double>& above) {
    const double n = std::accumulate(parent.begin(), parent.end(), 0.0);
    const double nb = std::accumulate(below.begin(), below.end(), 0.0);
    const double na = std::accumulate(above.begin(), above.end(), 0.0);
    if (n <= 0.0 || nb <= 0.0 || na <= 0.0)
        return 0.0;
    return entropy_bits(parent, n) -
           (nb / n) * entropy_bits(below, nb) - (na / n) * entropy_bits(above, na);
}

}  // namespace

IncrementalTree::IncrementalTree(TreeKind kind, int feature_count, int class_count,
                                 HoeffdingTreeConfig cfg, std::vector<int> allowed_features,
                                 int leaf_subspace, std::uint64_t rng_seed)
    : kind_(kind),
      feature_count_(feature_count),
      class_count_(class_count),
      cfg_(cfg),
      allowed_features_(std::move(allowed_features)),
      leaf_subspace_(leaf_subspace),
      rng_(rng_seed) {
    cfg_.validate();
    if (feature_count_ < 1)
        throw ConfigError("tree: feature_count must be >= 1");
    if (class_count_ < 2)
        throw ConfigError("tree: class_count must be >= 2");
    if (allowed_features_.empty()) {
        allowed_features_.resize(feature_count_);
        std::iota(allowed_features_.begin(), allowed_features_.end(), 0);
    }
    for (int f : allowed_features_)
        if (f < 0 || f >= feature_count_)
            throw ConfigError("tree: allowed feature index out of range");
    std::sort(allowed_features_.begin(), allowed_features_.end());
    if (leaf_subspace_ < 0 || leaf_subspace_ > static_cast<int>(allowed_features_.size()))
        throw ConfigError("tree: leaf_subspace out of range");
    root_ = make_leaf(0, std::vector<double>(class_count_, 0.0));
}

std::unique_ptr<NodeStats> IncrementalTree::make_stats(int /*depth*/) {
    auto stats = std::make_unique<NodeStats>();
    stats->class_counts.assign(class_count_, 0.0);
    if (leaf_subspace_ > 0 &&
        leaf_subspace_ < static_cast<int>(allowed_features_.size())) {
        // partial Fisher-Yates over a copy, then sorted for determinism
        std::vector<int> pool = allowed_features_;
        for (int i = 0; i < leaf_subspace_; ++i) {
            const std::size_t j =
                i + static_cast<std::size_t>(rng_.uniform_below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(leaf_subspace_);
        std::sort(pool.begin(), pool.end());
        stats->candidate_features = std::move(pool);
    } else {
        stats->candidate_features = allowed_features_;
    }
    stats->hists.reserve(stats->candidate_features.size());
    for (std::size_t i = 0; i < stats->candidate_features.size(); ++i)
        stats->hists.emplace_back(cfg_.numeric_bins, class_count_);
    return stats;
}

std::unique_ptr<TreeNode> IncrementalTree::make_leaf(int depth,
                                                     std::vector<double> inherited_counts) {
    auto node = std::make_unique<TreeNode>();
    node->depth = depth;
    node->stats = make_stats(depth);
    node->stats->class_counts = std::move(inherited_counts);
    return node;
}

void IncrementalTree::update_stats(NodeStats& stats, const LabeledInstance& xi, double weight) {
    stats.class_counts[xi.label] += weight;
    stats.trained_weight += weight;
    stats.weight_since_attempt += weight;
    for (std::size_t i = 0; i < stats.candidate_features.size(); ++i)
        stats.hists[i].add(xi.instance.features[stats.candidate_features[i]], xi.label, weight);
}

bool IncrementalTree::depth_allows_split(const TreeNode& node) const {
    return !cfg_.max_depth || node.depth < *cfg_.max_depth;
}

std::pair<IncrementalTree::CandidateSplit, double> IncrementalTree::best_and_second(
    const NodeStats& stats) const {
    CandidateSplit best;
    double second_gain = 0.0;
    for (std::size_t slot = 0; slot < stats.candidate_features.size(); ++slot) {
        const FeatureHistogram& hist = stats.hists[slot];
        if (!hist.seen() || hist.hi() <= hist.lo())
            continue;
        const std::vector<double> parent = hist.class_totals();
        CandidateSplit feature_best;
        for (int b = 1; b < hist.bins(); ++b) {
            auto [below, above] = hist.partition(b);
            const double gain = info_gain(parent, below, above);
            if (gain > feature_best.gain) {
                feature_best = CandidateSplit{stats.candidate_features[slot],
                                              static_cast<int>(slot), b,
                                              hist.boundary_value(b), gain};
            }
        }
        if (feature_best.feature < 0)
            continue;
        if (feature_best.gain > best.gain || best.feature < 0) {
            second_gain = (best.feature >= 0) ? best.gain : second_gain;
            best = feature_best;
        } else if (feature_best.gain > second_gain) {
            second_gain = feature_best.gain;
        }
    }
    return {best, second_gain};
}

double IncrementalTree::best_gain_for_feature(const NodeStats& stats, int feature) const {
    for (std::size_t slot = 0; slot < stats.candidate_features.size(); ++slot) {
        if (stats.candidate_features[slot] != feature)
            continue;
        const FeatureHistogram& hist = stats.hists[slot];
        if (!hist.seen() || hist.hi() <= hist.lo())
            return 0.0;
        const std::vector<double> parent = hist.class_totals();
        double best = 0.0;
        for (int b = 1; b < hist.bins(); ++b) {
            auto [below, above] = hist.partition(b);
            best = std::max(best, info_gain(parent, below, above));
        }
        return best;
    }
    return 0.0;
}

void IncrementalTree::apply_split(TreeNode& node, const NodeStats& basis,
                                  const CandidateSplit& chosen) {
    auto [below, above] = basis.hists[chosen.hist_slot].partition(chosen.boundary);
    node.split_feature = chosen.feature;
    node.threshold = chosen.threshold;
    node.left = make_leaf(node.depth + 1, std::move(below));
    node.right = make_leaf(node.depth + 1, std::move(above));
}

bool IncrementalTree::attempt_leaf_split(TreeNode& node) {
    NodeStats& stats = *node.stats;
    attempt_log_.push_back(stats.trained_weight);

    if (stats.hists.empty())
        return false;
    int trained_classes = 0;
    for (double c : stats.hists[0].class_totals())
        if (c > 0.0)
            ++trained_classes;
    if (trained_classes <= 1)
        return false;

    auto [best, second_gain] = best_and_second(stats);
    if (best.feature < 0 || best.gain <= 0.0)
        return false;

    const double eps =
        hoeffding_bound(std::log2(class_count_), cfg_.delta, std::max(1.0, stats.trained_weight));
    bool do_split = false;
    if (kind_ == TreeKind::Hoeffding)
        do_split = (best.gain - second_gain > eps) || (eps < cfg_.tie_threshold);
    else
        do_split = best.gain > eps;  // race against the null split only
    if (!do_split)
        return false;

    apply_split(node, stats, best);
    if (kind_ == TreeKind::Hoeffding)
        node.stats.reset();  // internal HT nodes carry no statistics
    return true;
}

bool IncrementalTree::reevaluate_internal(TreeNode& node) {
    NodeStats& stats = *node.stats;
    auto [best, second_gain] = best_and_second(stats);
    (void)second_gain;
    if (best.feature < 0 || best.feature == node.split_feature)
        return false;
    const double current_gain = best_gain_for_feature(stats, node.split_feature);
    const double eps =
        hoeffding_bound(std::log2(class_count_), cfg_.delta, std::max(1.0, stats.trained_weight));
    if (best.gain - current_gain <= eps)
        return false;

    // strictly better feature confirmed: replace the split, discard subtree
    apply_split(node, stats, best);
    ++split_replacements_;
    return true;
}

void IncrementalTree::train_weighted(const LabeledInstance& xi, double weight) {
    if (static_cast<int>(xi.instance.features.size()) != feature_count_)
        throw DataError("tree: instance feature count mismatch");
    if (xi.label < 0 || xi.label >= class_count_)
        throw DataError("tree: label out of range");
    if (!(weight > 0.0))
        return;
    trained_weight_ += weight;

    TreeNode* node = root_.get();
    for (;;) {
        if (node->is_leaf()) {
            update_stats(*node->stats, xi, weight);
            if (node->stats->weight_since_attempt >= cfg_.grace_period &&
                depth_allows_split(*node)) {
                node->stats->weight_since_attempt = 0.0;
                attempt_leaf_split(*node);
            }
            return;
        }
        if (kind_ == TreeKind::ExtremelyFast) {
            update_stats(*node->stats, xi, weight);
            if (node->stats->weight_since_attempt >= cfg_.grace_period) {
                node->stats->weight_since_attempt = 0.0;
                if (reevaluate_internal(*node))
                    return;  // instance is accounted for in the new children's inherited counts
            }
        }
        node = (xi.instance.features[node->split_feature] <= node->threshold)
                   ? node->left.get()
                   : node->right.get();
    }
}

ClassDistribution IncrementalTree::predict_proba(const Instance& x) const {
    if (static_cast<int>(x.features.size()) != feature_count_)
        throw DataError("tree: instance feature count mismatch");
    const TreeNode* node = root_.get();
    while (!node->is_leaf())
        node = (x.features[node->split_feature] <= node->threshold) ? node->left.get()
                                                                    : node->right.get();
    return normalize(ClassDistribution{node->stats->class_counts});
}

namespace {

std::size_t count_nodes(const TreeNode& node, bool leaves_only) {
    if (node.is_leaf())
        return 1;
    const std::size_t self = leaves_only ? 0 : 1;
    return self + count_nodes(*node.left, leaves_only) + count_nodes(*node.right, leaves_only);
}

void dump_node(const TreeNode& node, std::ostringstream& out, int indent) {
    for (int i = 0; i < indent; ++i)
        out << "  ";
    if (node.is_leaf()) {
        out << "leaf [";
        for (std::size_t c = 0; c < node.stats->class_counts.size(); ++c) {
            if (c)
                out << ", ";
            out << node.stats->class_counts[c];
        }
        out << "]\n";
        return;
    }
    out << "f" << node.split_feature << " <= " << node.threshold << "\n";
    dump_node(*node.left, out, indent + 1);
    dump_node(*node.right, out, indent + 1);
}

}  // namespace

std::size_t IncrementalTree::leaf_count() const {
    return count_nodes(*root_, true);
}

std::size_t IncrementalTree::node_count() const {
    return count_nodes(*root_, false);
}

std::string IncrementalTree::to_text() const {
    std::ostringstream out;
    dump_node(*root_, out, 0);
    return out.str();
}

}  // namespace driftstream
