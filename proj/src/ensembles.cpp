#include "driftstream/ensembles.hpp"

#include <algorithm>
#include <cmath>

namespace driftstream {

const char* to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::ARF: return "arf";
        case EnsembleKind::SRP: return "srp";
        case EnsembleKind::LB: return "lb";
    }
    return "?";
}

void EnsembleConfig::validate() const {
    if (n_members < 1)
        throw ConfigError("ensemble: n_members must be >= 1");
    if (!(lambda > 0.0))
        throw ConfigError("ensemble: lambda must be positive");
    if (!(subspace_fraction > 0.0 && subspace_fraction <= 1.0))
        throw ConfigError("ensemble: subspace_fraction must be in (0,1]");
    tree_config.validate();
    adwin.validate();
    ddm.validate();
}

namespace {

SubspaceMode canonical_mode(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::ARF: return SubspaceMode::Local;
        case EnsembleKind::SRP: return SubspaceMode::Global;
        case EnsembleKind::LB: return SubspaceMode::None;
    }
    return SubspaceMode::None;
}

}  // namespace

OnlineBaggingEnsemble::OnlineBaggingEnsemble(EnsembleKind kind, int feature_count,
                                             int class_count, EnsembleConfig cfg)
    : kind_(kind), feature_count_(feature_count), class_count_(class_count), cfg_(cfg) {
    cfg_.validate();
    if (feature_count_ < 1)
        throw ConfigError("ensemble: feature_count must be >= 1");

    mode_ = canonical_mode(kind);
    if (cfg_.subspace_mode && *cfg_.subspace_mode != mode_)
        throw ConfigError("ensemble: subspace mode override conflicts with ensemble kind");
    if (kind == EnsembleKind::LB && cfg_.detector != DetectorKind::Adwin)
        throw ConfigError("ensemble: leveraging bagging members use ADWIN");

    if (mode_ == SubspaceMode::Local)
        leaf_subspace_ = static_cast<int>(std::floor(std::sqrt(feature_count_))) + 1;
    if (mode_ == SubspaceMode::Global)
        mask_size_ = std::min(feature_count_,
                              static_cast<int>(std::ceil(cfg_.subspace_fraction * feature_count_)));

    members_.reserve(cfg_.n_members);
    SeededRng base(cfg_.seed);
    for (int i = 0; i < cfg_.n_members; ++i) {
        EnsembleMember m(base.derive(static_cast<std::uint64_t>(i)));
        if (cfg_.detector == DetectorKind::Adwin)
            m.detector = AdwinDetector(cfg_.adwin);
        else
            m.detector = DdmDetector(cfg_.ddm);
        if (mode_ == SubspaceMode::Global)
            m.feature_mask = sample_mask(m);
        m.tree = make_tree(m);
        members_.push_back(std::move(m));
    }
}

std::vector<int> OnlineBaggingEnsemble::sample_mask(EnsembleMember& m) const {
    std::vector<int> pool(feature_count_);
    for (int i = 0; i < feature_count_; ++i)
        pool[i] = i;
    for (int i = 0; i < mask_size_; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(m.rng.uniform_below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(mask_size_);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::unique_ptr<IncrementalTree> OnlineBaggingEnsemble::make_tree(EnsembleMember& m) {
    const int subspace = std::min<int>(leaf_subspace_, feature_count_);
    return std::make_unique<IncrementalTree>(TreeKind::Hoeffding, feature_count_, class_count_,
                                             cfg_.tree_config, m.feature_mask, subspace,
                                             m.rng.next_u64());
}

ClassDistribution OnlineBaggingEnsemble::predict_proba(const Instance& x) const {
    std::vector<std::vector<double>> member_probs;
    member_probs.reserve(members_.size());
    for (const auto& m : members_)
        member_probs.push_back(m.tree->predict_proba(x).probs);

    // per-class sums run over sorted addends so the fused distribution is
    // identical under any permutation of the members
    ClassDistribution fused{std::vector<double>(class_count_, 0.0)};
    std::vector<double> column(members_.size());
    for (int c = 0; c < class_count_; ++c) {
        for (std::size_t i = 0; i < members_.size(); ++i)
            column[i] = member_probs[i][c];
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (double v : column)
            sum += v;
        fused.probs[c] = sum / static_cast<double>(members_.size());
    }
    return normalize(fused);
}

std::vector<MemberEvent> OnlineBaggingEnsemble::train_one_events(const LabeledInstance& xi) {
    ++instances_trained_;
    std::vector<MemberEvent> events;
    events.reserve(members_.size());

    for (std::size_t i = 0; i < members_.size(); ++i) {
        EnsembleMember& m = members_[i];
        MemberEvent ev;
        ev.member = static_cast<int>(i);

        // prequential-style error indicator from the pre-training prediction
        const int predicted = argmax_class(m.tree->predict_proba(xi.instance));
        const int error = predicted != xi.label ? 1 : 0;

        const int k = m.rng.poisson(cfg_.lambda);
        total_poisson_weight_ += static_cast<std::uint64_t>(k);
        for (int rep = 0; rep < k; ++rep) {
            m.tree->train_one(xi);
            if (m.background)
                m.background->train_one(xi);
        }

        if (std::holds_alternative<AdwinDetector>(m.detector)) {
            auto& adwin = std::get<AdwinDetector>(m.detector);
            const double mean_before = adwin.mean();
            ev.signal = adwin.update(error);
            // a cut where the surviving window's error is lower means the
            // member improved; only a rising error costs it the tree
            if (ev.signal == DriftSignal::Drift && adwin.mean() >= mean_before) {
                if (mode_ == SubspaceMode::Global)
                    m.feature_mask = sample_mask(m);
                m.tree = make_tree(m);
                adwin.reset();
                ev.replaced = true;
                ++total_replacements_;
            }
        } else {
            ev.signal = std::get<DdmDetector>(m.detector).update(error);
            switch (ev.signal) {
                case DriftSignal::Warning:
                    if (!m.background)
                        m.background = make_tree(m);
                    break;
                case DriftSignal::Drift:
                    if (m.background) {
                        // keep the mask the background was trained under
                        m.tree = std::move(m.background);
                        ev.promoted_background = true;
                    } else {
                        if (mode_ == SubspaceMode::Global)
                            m.feature_mask = sample_mask(m);
                        m.tree = make_tree(m);
                    }
                    std::get<DdmDetector>(m.detector).reset();
                    ev.replaced = true;
                    ++total_replacements_;
                    break;
                case DriftSignal::Stable:
                    m.background.reset();
                    break;
            }
        }
        events.push_back(ev);
    }
    return events;
}

std::string OnlineBaggingEnsemble::name() const {
    if (kind_ == EnsembleKind::LB)
        return "lb";
    return std::string(to_string(kind_)) +
           (cfg_.detector == DetectorKind::Adwin ? "-adwin" : "-ddm");
}

std::unique_ptr<OnlineBaggingEnsemble> build_ensemble(EnsembleKind kind, int feature_count,
                                                      int class_count, EnsembleConfig cfg) {
    return std::make_unique<OnlineBaggingEnsemble>(kind, feature_count, class_count,
                                                   std::move(cfg));
}

}  // namespace driftstream
