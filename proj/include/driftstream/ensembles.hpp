#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "driftstream/core.hpp"
#include "driftstream/detectors.hpp"
#include "driftstream/trees.hpp"

namespace driftstream {

enum class DetectorKind { Adwin, Ddm };
enum class SubspaceMode { Local, Global, None };
enum class EnsembleKind { ARF, SRP, LB };

const char* to_string(EnsembleKind kind);

struct EnsembleConfig {
    int n_members = 10;
    double lambda = 6.0;                       // Poisson bagging rate
    DetectorKind detector = DetectorKind::Adwin;
    std::optional<SubspaceMode> subspace_mode; // normally derived from the ensemble kind
    double subspace_fraction = 0.6;            // global mode only
    HoeffdingTreeConfig tree_config;
    AdwinConfig adwin;
    DdmConfig ddm;
    std::uint64_t seed = 1;

    void validate() const;
};

struct MemberEvent {
    int member = -1;
    DriftSignal signal = DriftSignal::Stable;
    bool replaced = false;
    bool promoted_background = false;
};

// One bagging member: a Hoeffding tree watched by its own drift detector.
// DDM members grow a background tree during Warning and promote it on Drift;
// ADWIN has no warning level, so ADWIN members replace immediately on Drift.
struct EnsembleMember {
    std::unique_ptr<IncrementalTree> tree;
    std::variant<AdwinDetector, DdmDetector> detector;
    std::unique_ptr<IncrementalTree> background;
    std::vector<int> feature_mask;  // empty = all features (local / none modes)
    SeededRng rng;

    explicit EnsembleMember(SeededRng member_rng) : rng(member_rng) {}
};

class OnlineBaggingEnsemble : public AdaptiveLearner {
  public:
    OnlineBaggingEnsemble(EnsembleKind kind, int feature_count, int class_count,
                          EnsembleConfig cfg);

    ClassDistribution predict_proba(const Instance& x) const override;
    void train_one(const LabeledInstance& xi) override { train_one_events(xi); }
    std::vector<MemberEvent> train_one_events(const LabeledInstance& xi);
    int class_count() const override { return class_count_; }
    std::string name() const override;

    EnsembleKind kind() const { return kind_; }
    SubspaceMode subspace_mode() const { return mode_; }
    const EnsembleConfig& config() const { return cfg_; }
    int per_split_features() const { return leaf_subspace_; }

    std::vector<EnsembleMember>& members() { return members_; }
    const std::vector<EnsembleMember>& members() const { return members_; }
    std::uint64_t total_replacements() const { return total_replacements_; }
    std::uint64_t total_poisson_weight() const { return total_poisson_weight_; }
    std::uint64_t instances_trained() const { return instances_trained_; }

  private:
    std::unique_ptr<IncrementalTree> make_tree(EnsembleMember& m);
    std::vector<int> sample_mask(EnsembleMember& m) const;

    EnsembleKind kind_;
    int feature_count_;
    int class_count_;
    EnsembleConfig cfg_;
    SubspaceMode mode_;
    int leaf_subspace_ = 0;  // local mode: floor(sqrt(d)) + 1
    int mask_size_ = 0;      // global mode: ceil(fraction * d)
    std::vector<EnsembleMember> members_;
    std::uint64_t total_replacements_ = 0;
    std::uint64_t total_poisson_weight_ = 0;
    std::uint64_t instances_trained_ = 0;
};

std::unique_ptr<OnlineBaggingEnsemble> build_ensemble(EnsembleKind kind, int feature_count,
                                                      int class_count, EnsembleConfig cfg);

}  // namespace driftstream
