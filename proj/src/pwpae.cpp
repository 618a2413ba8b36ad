#include "driftstream/pwpae.hpp"

namespace driftstream {

double pwpae_error_rate(std::uint64_t processed, std::uint64_t misclassified) {
    if (misclassified > processed)
        throw InternalError("pwpae: misclassified exceeds processed");
    if (processed == 0)
        return 0.0;
    return static_cast<double>(misclassified) / static_cast<double>(processed);
}

double pwpae_weight(double error_rt, double epsilon) {
    if (!(error_rt >= 0.0 && error_rt <= 1.0))
        throw ConfigError("pwpae: error rate must be in [0,1]");
    if (!(epsilon > 0.0))
        throw ConfigError("pwpae: epsilon must be positive");
    return 1.0 / (error_rt + epsilon);
}

ClassDistribution pwpae_fuse(const std::vector<ClassDistribution>& dists,
                             const std::vector<double>& weights,
                             std::uint64_t* ops_counter) {
    if (dists.empty() || dists.size() != weights.size())
        throw ConfigError("pwpae: need one weight per learner distribution");
    const std::size_t k = dists.size();
    const int classes = dists[0].size();
    ClassDistribution fused{std::vector<double>(classes, 0.0)};
    for (std::size_t j = 0; j < k; ++j) {
        if (dists[j].size() != classes)
            throw ConfigError("pwpae: learner distributions disagree on class count");
        for (int c = 0; c < classes; ++c) {
            fused.probs[c] += weights[j] * dists[j].probs[c];
            if (ops_counter)
                ++*ops_counter;
        }
    }
    for (int c = 0; c < classes; ++c)
        fused.probs[c] /= static_cast<double>(k);
    return normalize(fused);
}

void PwpaeConfig::validate() const {
    if (!(epsilon > 0.0))
        throw ConfigError("pwpae: epsilon must be positive");
    base.validate();
}

PwpaeModel::PwpaeModel(int feature_count, int class_count, PwpaeConfig cfg)
    : feature_count_(feature_count), class_count_(class_count), cfg_(cfg) {
    cfg_.validate();

    // identical tree configuration, distinct derived seeds: detector and
    // subspace strategy stay the only diversity sources
    const struct {
        EnsembleKind kind;
        DetectorKind detector;
    } specs[kLearnerCount] = {
        {EnsembleKind::ARF, DetectorKind::Adwin},
        {EnsembleKind::ARF, DetectorKind::Ddm},
        {EnsembleKind::SRP, DetectorKind::Adwin},
        {EnsembleKind::SRP, DetectorKind::Ddm},
    };
    for (int j = 0; j < kLearnerCount; ++j) {
        EnsembleConfig base = cfg_.base;
        base.detector = specs[j].detector;
        base.subspace_mode.reset();
        base.seed = SeededRng::mix_seed(cfg_.seed, static_cast<std::uint64_t>(j));
        learners_[j] =
            build_ensemble(specs[j].kind, feature_count_, class_count_, std::move(base));
    }
}

std::array<std::string, PwpaeModel::kLearnerCount> PwpaeModel::learner_names() const {
    std::array<std::string, kLearnerCount> names;
    for (int j = 0; j < kLearnerCount; ++j)
        names[j] = learners_[j]->name();
    return names;
}

std::array<double, PwpaeModel::kLearnerCount> PwpaeModel::current_error_rates() const {
    std::array<double, kLearnerCount> rates{};
    for (int j = 0; j < kLearnerCount; ++j)
        rates[j] = pwpae_error_rate(processed_[j], misclassified_[j]);
    return rates;
}

std::array<double, PwpaeModel::kLearnerCount> PwpaeModel::current_weights() const {
    std::array<double, kLearnerCount> weights{};
    const auto rates = current_error_rates();
    for (int j = 0; j < kLearnerCount; ++j)
        weights[j] = pwpae_weight(rates[j], cfg_.epsilon);
    return weights;
}

LearnerWeightSnapshot PwpaeModel::snapshot() const {
    LearnerWeightSnapshot snap;
    snap.instance_index = instances_;
    snap.error_rate = current_error_rates();
    snap.weight = current_weights();
    return snap;
}

std::vector<ClassDistribution> PwpaeModel::learner_predictions(const Instance& x) const {
    std::vector<ClassDistribution> dists;
    dists.reserve(kLearnerCount);
    for (const auto& learner : learners_)
        dists.push_back(learner->predict_proba(x));
    return dists;
}

ClassDistribution PwpaeModel::predict_proba(const Instance& x) const {
    const auto dists = learner_predictions(x);
    const auto weights = current_weights();
    return pwpae_fuse(dists, std::vector<double>(weights.begin(), weights.end()), &fusion_ops_);
}

PredictionRecord PwpaeModel::process_one(const LabeledInstance& xi) {
    PredictionRecord rec;
    rec.weights = snapshot();

    // 1. learner predictions, 2. fusion under pre-instance weights
    const auto dists = learner_predictions(xi.instance);
    rec.fused = pwpae_fuse(dists, std::vector<double>(rec.weights.weight.begin(),
                                                      rec.weights.weight.end()),
                           &fusion_ops_);
    rec.fused_class = argmax_class(rec.fused);

    // 3. per-learner counters from each learner's own prediction
    for (int j = 0; j < kLearnerCount; ++j) {
        rec.learner_class[j] = argmax_class(dists[j]);
        processed_[j] += 1;
        if (rec.learner_class[j] != xi.label)
            misclassified_[j] += 1;
    }

    // 4. train every learner
    for (auto& learner : learners_)
        learner->train_one(xi);

    ++instances_;
    if (cfg_.snapshot_interval > 0 &&
        (instances_ % cfg_.snapshot_interval == 0 || instances_ == 1))
        trace_.push_back(snapshot());
    return rec;
}

void PwpaeModel::train_one(const LabeledInstance& xi) {
    // Same steps as process_one minus the fused prediction, which the
    // prequential caller has already requested through predict_proba.
    const auto dists = learner_predictions(xi.instance);
    for (int j = 0; j < kLearnerCount; ++j) {
        processed_[j] += 1;
        if (argmax_class(dists[j]) != xi.label)
            misclassified_[j] += 1;
    }
    for (auto& learner : learners_)
        learner->train_one(xi);
    ++instances_;
    if (cfg_.snapshot_interval > 0 &&
        (instances_ % cfg_.snapshot_interval == 0 || instances_ == 1))
        trace_.push_back(snapshot());
}

}  // namespace driftstream
