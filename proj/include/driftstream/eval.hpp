#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "driftstream/core.hpp"
#include "driftstream/streams.hpp"

namespace driftstream {

// Binary confusion counts; positive class is "abnormal" = class index 1.
struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    void add(int predicted, int actual);
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// accuracy=(tp+tn)/total, precision=tp/(tp+fp), recall=tp/(tp+fn),
// f1 = harmonic mean; undefined ratios fall back to 0.
Metrics compute_metrics(const ConfusionCounts& c);

// Order-preserving split: first floor(train_fraction*n) records train, the
// rest test. Streams are chronological, so no shuffling.
std::pair<std::span<const LabeledInstance>, std::span<const LabeledInstance>> holdout_split(
    const std::vector<LabeledInstance>& data, double train_fraction);

struct CurvePoint {
    std::uint64_t instance_index = 0;
    double cumulative_accuracy = 0.0;
};

struct PrequentialReport {
    std::string model_name;
    std::string config_fingerprint;
    std::uint64_t seed = 0;
    std::uint64_t instances = 0;
    std::vector<CurvePoint> curve;
    double accuracy = 0.0;
    std::optional<Metrics> binary;  // only for two-class streams
    ConfusionCounts confusion;      // meaningful when binary is set
    double mean_test_time_s = 0.0;  // predict-only wall clock per instance
    std::vector<std::pair<int, int>> prediction_log;  // (predicted, actual)
};

struct PrequentialOptions {
    std::uint64_t checkpoint_interval = 50;
    std::string model_name;
    std::string config_fingerprint;
    std::uint64_t seed = 0;
};

// Test-then-train: warmup records train silently, then every test instance
// is predicted (and timed) strictly before the model trains on it.
PrequentialReport prequential_run(AdaptiveLearner& model,
                                  std::span<const LabeledInstance> warmup,
                                  StreamSource& test_stream, PrequentialOptions opts = {});

}  // namespace driftstream
