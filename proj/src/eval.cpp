#include "driftstream/eval.hpp"

#include <chrono>
#include <cmath>

namespace driftstream {

void ConfusionCounts::add(int predicted, int actual) {
    if (actual == 1)
        predicted == 1 ? ++tp : ++fn;
    else
        predicted == 1 ? ++fp : ++tn;
}

Metrics compute_metrics(const ConfusionCounts& c) {
    const std::uint64_t total = c.total();
    if (total == 0)
        throw ConfigError("compute_metrics: no instances");
    Metrics m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
    m.precision = (c.tp + c.fp) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                                : 0.0;
    m.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    m.f1 = (m.precision + m.recall > 0.0)
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

std::pair<std::span<const LabeledInstance>, std::span<const LabeledInstance>> holdout_split(
    const std::vector<LabeledInstance>& data, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("holdout_split: train_fraction must be in (0,1)");
    const std::size_t train_n =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(data.size())));
    if (train_n == 0)
        throw ConfigError("holdout_split: training partition is empty");
    if (train_n >= data.size())
        throw ConfigError("holdout_split: test partition is empty");
    std::span<const LabeledInstance> all(data);
    return {all.subspan(0, train_n), all.subspan(train_n)};
}

PrequentialReport prequential_run(AdaptiveLearner& model,
                                  std::span<const LabeledInstance> warmup,
                                  StreamSource& test_stream, PrequentialOptions opts) {
    if (opts.checkpoint_interval == 0)
        throw ConfigError("prequential_run: checkpoint_interval must be positive");
    const int classes = model.class_count();
    if (test_stream.schema().class_count != classes)
        throw ConfigError("prequential_run: stream and model disagree on class count");

    PrequentialReport report;
    report.model_name = opts.model_name.empty() ? model.name() : opts.model_name;
    report.config_fingerprint = opts.config_fingerprint;
    report.seed = opts.seed;

    for (const LabeledInstance& xi : warmup)
        model.train_one(xi);

    const bool binary = classes == 2;
    std::uint64_t correct = 0;
    double test_time_s = 0.0;
    using clock = std::chrono::steady_clock;

    while (auto xi = test_stream.next()) {
        try {
            const auto t0 = clock::now();
            const ClassDistribution dist = model.predict_proba(xi->instance);
            const auto t1 = clock::now();
            test_time_s += std::chrono::duration<double>(t1 - t0).count();

            const int predicted = argmax_class(dist);
            report.prediction_log.emplace_back(predicted, xi->label);
            if (predicted == xi->label)
                ++correct;
            if (binary)
                report.confusion.add(predicted, xi->label);
            ++report.instances;

            if (report.instances % opts.checkpoint_interval == 0)
                report.curve.push_back(
                    {report.instances,
                     static_cast<double>(correct) / static_cast<double>(report.instances)});

            model.train_one(*xi);
        } catch (const ConfigError& e) {
            throw ConfigError("instance " + std::to_string(report.instances) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("instance " + std::to_string(report.instances) + ": " + e.what());
        } catch (const InternalError& e) {
            throw InternalError("instance " + std::to_string(report.instances) + ": " + e.what());
        }
    }

    if (report.instances == 0)
        throw ConfigError("prequential_run: empty test stream");

    report.accuracy = static_cast<double>(correct) / static_cast<double>(report.instances);
    if (report.curve.empty() || report.curve.back().instance_index != report.instances)
        report.curve.push_back({report.instances, report.accuracy});
    report.mean_test_time_s = test_time_s / static_cast<double>(report.instances);
    if (binary)
        report.binary = compute_metrics(report.confusion);

    // cross-check the streamed counters against the stored log
    std::uint64_t recount_correct = 0;
    ConfusionCounts recount;
    for (auto [p, a] : report.prediction_log) {
        if (p == a)
            ++recount_correct;
        if (binary)
            recount.add(p, a);
    }
    if (recount_correct != correct ||
        (binary && (recount.tp != report.confusion.tp || recount.fp != report.confusion.fp ||
                    recount.tn != report.confusion.tn || recount.fn != report.confusion.fn)))
        throw InternalError("prequential_run: prediction log disagrees with streamed counts");

    return report;
}

}  // namespace driftstream
