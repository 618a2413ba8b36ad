#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "driftstream/core.hpp"

namespace driftstream {

// Single-consumer pull source. Yields each record exactly once, in an order
// that is fixed by the source configuration and seed.
struct StreamSource {
    virtual ~StreamSource() = default;
    virtual const StreamSchema& schema() const = 0;
    virtual std::optional<LabeledInstance> next() = 0;
};

class MaterializedStream : public StreamSource {
  public:
    MaterializedStream(StreamSchema schema, std::vector<LabeledInstance> records)
        : schema_(std::move(schema)), records_(std::move(records)) {}

    const StreamSchema& schema() const override { return schema_; }
    std::optional<LabeledInstance> next() override {
        if (pos_ >= records_.size())
            return std::nullopt;
        return records_[pos_++];
    }
    const std::vector<LabeledInstance>& records() const { return records_; }

  private:
    StreamSchema schema_;
    std::vector<LabeledInstance> records_;
    std::size_t pos_ = 0;
};

struct CsvData {
    StreamSchema schema;
    std::vector<LabeledInstance> records;
    std::vector<std::string> label_names;  // dense class index -> label text, first-seen order
};

// Eager CSV ingestion: header row required, label column named, every other
// column numeric. Labels are mapped to dense integers in first-seen order.
// Row numbers in error messages are 1-based file lines (header = row 1).
CsvData read_labeled_csv(const std::filesystem::path& path, const std::string& label_column,
                         std::optional<std::size_t> limit = std::nullopt);

std::unique_ptr<MaterializedStream> open_csv_stream(const std::filesystem::path& path,
                                                    const std::string& label_column,
                                                    std::optional<std::size_t> limit = std::nullopt);

void write_labeled_csv(const std::filesystem::path& path, const StreamSchema& schema,
                       const std::vector<LabeledInstance>& records,
                       const std::vector<std::string>* label_names = nullptr);

// Shortest round-trip decimal rendering, shared by every CSV writer so that
// identical runs produce byte-identical files.
std::string format_double(double value);

struct BernoulliSegment {
    double p = 0.0;
    std::size_t length = 0;
};

// Detector test harness: piecewise-stationary 0/1 stream.
std::vector<int> generate_bernoulli_stream(const std::vector<BernoulliSegment>& segments,
                                           std::uint64_t seed);

// Labeling concept: class 1 iff w.x >= threshold.
struct LinearThresholdConcept {
    std::vector<double> weights;
    double threshold = 0.0;

    int label(const Instance& x) const;

    // Random hyperplane through the centre of [0,1]^d.
    static LinearThresholdConcept random(int features, SeededRng& rng);
    // Single-feature threshold concept, e.g. "f1 > 0.5".
    static LinearThresholdConcept axis(int features, int feature, double cut);
};

enum class DriftKind { Abrupt, Gradual };

struct ConceptSwitchConfig {
    LinearThresholdConcept concept_a;
    LinearThresholdConcept concept_b;
    DriftKind drift_kind = DriftKind::Abrupt;
    std::size_t drift_position = 0;
    std::size_t drift_width = 0;  // abrupt => 0
    double noise = 0.0;           // label flip probability, [0, 0.5)
    std::size_t length = 0;
    int feature_count = 2;
    std::uint64_t seed = 1;

    void validate() const;
};

// Materialized synthetic stream with ground-truth traces for drift oracles.
class ConceptSwitchStream : public StreamSource {
  public:
    explicit ConceptSwitchStream(const ConceptSwitchConfig& cfg);

    const StreamSchema& schema() const override { return schema_; }
    std::optional<LabeledInstance> next() override {
        if (pos_ >= records_.size())
            return std::nullopt;
        return records_[pos_++];
    }

    const std::vector<LabeledInstance>& records() const { return records_; }
    const std::vector<std::uint8_t>& from_concept_b() const { return from_concept_b_; }
    const std::vector<std::uint8_t>& label_flipped() const { return label_flipped_; }
    const ConceptSwitchConfig& config() const { return cfg_; }

  private:
    ConceptSwitchConfig cfg_;
    StreamSchema schema_;
    std::vector<LabeledInstance> records_;
    std::vector<std::uint8_t> from_concept_b_;
    std::vector<std::uint8_t> label_flipped_;
    std::size_t pos_ = 0;
};

std::unique_ptr<ConceptSwitchStream> generate_concept_switch(const ConceptSwitchConfig& cfg);

}  // namespace driftstream
