#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "driftstream/core.hpp"

namespace driftstream {

struct HoeffdingTreeConfig {
    double delta = 1e-7;        // split confidence
    int grace_period = 200;     // instances between split attempts at a leaf
    double tie_threshold = 0.05;
    int numeric_bins = 10;      // equal-width histogram bins per feature
    std::optional<int> max_depth;

    void validate() const;
};

// Confidence radius sqrt(range^2 * ln(1/delta) / (2n)). Strictly decreasing
// in n; halves when n quadruples.
double hoeffding_bound(double range, double delta, double n);

// Per-class equal-width histogram over the observed value range. When the
// range widens, existing mass is redistributed by interval overlap so the
// bin count stays fixed.
class FeatureHistogram {
  public:
    FeatureHistogram(int bins, int classes);

    void add(double value, int cls, double weight);

    bool seen() const { return seen_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int bins() const { return bins_; }
    double total_weight() const;
    std::vector<double> class_totals() const;

    // boundary i (1..bins-1) sits at lo + i*(hi-lo)/bins
    double boundary_value(int i) const;
    // per-class mass strictly below boundary i / at-or-above it
    std::pair<std::vector<double>, std::vector<double>> partition(int boundary) const;

    double count(int bin, int cls) const { return counts_[bin * classes_ + cls]; }

  private:
    int bin_index(double value) const;
    void widen(double new_lo, double new_hi);

    int bins_;
    int classes_;
    bool seen_ = false;
    double lo_ = 0.0;
    double hi_ = 0.0;
    std::vector<double> counts_;  // [bin * classes + cls]
};

enum class TreeKind { Hoeffding, ExtremelyFast };

struct NodeStats {
    std::vector<double> class_counts;    // inherited + trained, drives prediction
    std::vector<int> candidate_features; // global feature indices, ascending
    std::vector<FeatureHistogram> hists; // trained evidence only, parallel to candidates
    double trained_weight = 0.0;
    double weight_since_attempt = 0.0;
};

struct TreeNode {
    int split_feature = -1;
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
    std::unique_ptr<NodeStats> stats;  // leaves always; ExtremelyFast keeps them on internals too
    int depth = 0;

    bool is_leaf() const { return left == nullptr; }
};

// Incremental decision tree over numeric features. Hoeffding kind splits a
// leaf when the best candidate's gain beats the second-best feature's by the
// Hoeffding bound (or on ties); ExtremelyFast kind splits as soon as the
// best candidate beats the null split, and revisits internal-node splits
// every grace period, replacing the split (and killing the subtree) when a
// strictly better feature is confirmed.
class IncrementalTree : public AdaptiveLearner {
  public:
    IncrementalTree(TreeKind kind, int feature_count, int class_count,
                    HoeffdingTreeConfig cfg = {}, std::vector<int> allowed_features = {},
                    int leaf_subspace = 0, std::uint64_t rng_seed = 0);

    ClassDistribution predict_proba(const Instance& x) const override;
    void train_one(const LabeledInstance& xi) override { train_weighted(xi, 1.0); }
    void train_weighted(const LabeledInstance& xi, double weight);
    int class_count() const override { return class_count_; }
    std::string name() const override {
        return kind_ == TreeKind::Hoeffding ? "ht" : "efdt";
    }

    const TreeNode& root() const { return *root_; }
    const HoeffdingTreeConfig& config() const { return cfg_; }
    std::size_t leaf_count() const;
    std::size_t node_count() const;
    double trained_weight() const { return trained_weight_; }
    // trained weight at the leaf each time a split attempt ran
    const std::vector<double>& attempt_log() const { return attempt_log_; }
    std::uint64_t split_replacements() const { return split_replacements_; }

    std::string to_text() const;

  private:
    struct CandidateSplit {
        int feature = -1;       // global index
        int hist_slot = -1;     // position in candidate_features
        int boundary = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    std::unique_ptr<NodeStats> make_stats(int depth);
    std::unique_ptr<TreeNode> make_leaf(int depth, std::vector<double> inherited_counts);
    void update_stats(NodeStats& stats, const LabeledInstance& xi, double weight);
    // best split per candidate feature, plus the runner-up feature's gain
    std::pair<CandidateSplit, double> best_and_second(const NodeStats& stats) const;
    double best_gain_for_feature(const NodeStats& stats, int feature) const;
    bool attempt_leaf_split(TreeNode& node);
    bool reevaluate_internal(TreeNode& node);
    void apply_split(TreeNode& node, const NodeStats& basis, const CandidateSplit& chosen);
    bool depth_allows_split(const TreeNode& node) const;

    TreeKind kind_;
    int feature_count_;
    int class_count_;
    HoeffdingTreeConfig cfg_;
    std::vector<int> allowed_features_;
    int leaf_subspace_;
    SeededRng rng_;
    std::unique_ptr<TreeNode> root_;
    double trained_weight_ = 0.0;
    std::vector<double> attempt_log_;
    std::uint64_t split_replacements_ = 0;
};

}  // namespace driftstream
