#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "driftstream/core.hpp"
#include "driftstream/ensembles.hpp"

namespace driftstream {

// Cumulative real-time error rate: misclassified / processed. An untested
// learner counts as perfect so all weights start equal.
double pwpae_error_rate(std::uint64_t processed, std::uint64_t misclassified);

// Reciprocal weighting: w = 1 / (error + epsilon). A perfect learner gets
// the cap 1/epsilon.
double pwpae_weight(double error_rt, double epsilon);

// Weighted probability averaging: fused score per class is
// sum_j w_j * p_j(class) / k. Returns the normalized fusion. When
// ops_counter is given it is incremented once per score accumulation, which
// makes the per-instance fusion cost (k*c) observable.
ClassDistribution pwpae_fuse(const std::vector<ClassDistribution>& dists,
                             const std::vector<double>& weights,
                             std::uint64_t* ops_counter = nullptr);

struct PwpaeConfig {
    double epsilon = 0.001;
    EnsembleConfig base;            // shared by all four base learners
    std::uint64_t seed = 1;
    std::uint64_t snapshot_interval = 50;  // weight-trace cadence, 0 = off

    void validate() const;
};

struct LearnerWeightSnapshot {
    std::uint64_t instance_index = 0;  // instances processed so far
    std::array<double, 4> error_rate{};
    std::array<double, 4> weight{};
};

struct PredictionRecord {
    int fused_class = 0;
    ClassDistribution fused;
    std::array<int, 4> learner_class{};
    LearnerWeightSnapshot weights;  // the weights this prediction used
};

// Performance weighted probability averaging over the four fixed base
// learners ARF-ADWIN, ARF-DDM, SRP-ADWIN and SRP-DDM. Weights for instance
// t come from the error counters through instance t-1, so no label ever
// leaks into the prediction that is scored on it.
class PwpaeModel : public AdaptiveLearner {
  public:
    static constexpr int kLearnerCount = 4;

    PwpaeModel(int feature_count, int class_count, PwpaeConfig cfg = {});

    ClassDistribution predict_proba(const Instance& x) const override;
    void train_one(const LabeledInstance& xi) override;
    int class_count() const override { return class_count_; }
    std::string name() const override { return "pwpae"; }

    // predict + counter update + train in one step, returning the record
    PredictionRecord process_one(const LabeledInstance& xi);

    std::array<double, kLearnerCount> current_weights() const;
    std::array<double, kLearnerCount> current_error_rates() const;
    std::uint64_t processed(int learner) const { return processed_[learner]; }
    std::uint64_t misclassified(int learner) const { return misclassified_[learner]; }
    std::uint64_t instances_processed() const { return instances_; }
    const OnlineBaggingEnsemble& learner(int j) const { return *learners_[j]; }
    std::array<std::string, kLearnerCount> learner_names() const;
    const std::vector<LearnerWeightSnapshot>& weight_trace() const { return trace_; }
    std::uint64_t fusion_ops() const { return fusion_ops_; }
    const PwpaeConfig& config() const { return cfg_; }

  private:
    std::vector<ClassDistribution> learner_predictions(const Instance& x) const;
    LearnerWeightSnapshot snapshot() const;

    int feature_count_;
    int class_count_;
    PwpaeConfig cfg_;
    std::array<std::unique_ptr<OnlineBaggingEnsemble>, kLearnerCount> learners_;
    std::array<std::uint64_t, kLearnerCount> processed_{};
    std::array<std::uint64_t, kLearnerCount> misclassified_{};
    std::uint64_t instances_ = 0;
    std::vector<LearnerWeightSnapshot> trace_;
    mutable std::uint64_t fusion_ops_ = 0;
};

}  // namespace driftstream
