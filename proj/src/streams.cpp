#include "driftstream/streams.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace driftstream {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

CsvData read_labeled_csv(const std::filesystem::path& path, const std::string& label_column,
                         std::optional<std::size_t> limit) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open file: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw DataError("empty file: " + path.string());

    const std::vector<std::string> header = split_csv_line(line);
    int label_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == label_column)
            label_idx = static_cast<int>(i);
    if (label_idx < 0)
        throw DataError("label column '" + label_column + "' not found in " + path.string());

    CsvData data;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (static_cast<int>(i) != label_idx)
            data.schema.feature_names.push_back(trim(header[i]));
    data.schema.label_name = label_column;
    if (data.schema.feature_names.empty())
        throw DataError("no feature columns in " + path.string());

    std::unordered_map<std::string, int> label_map;
    std::size_t row = 1;  // header consumed
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty())
            continue;
        if (limit && data.records.size() >= *limit)
            break;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));

        LabeledInstance rec;
        rec.instance.features.reserve(data.schema.feature_names.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string cell = trim(cells[i]);
            if (cell.empty())
                throw DataError("row " + std::to_string(row) + ": empty cell in column '" +
                                trim(header[i]) + "'");
            if (static_cast<int>(i) == label_idx)
                continue;
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                throw DataError("row " + std::to_string(row) + ": non-numeric value '" + cell +
                                "' in feature column '" + trim(header[i]) + "'");
            if (!std::isfinite(v))
                throw DataError("row " + std::to_string(row) + ": non-finite value in column '" +
                                trim(header[i]) + "'");
            rec.instance.features.push_back(v);
        }

        const std::string label_text = trim(cells[label_idx]);
        auto it = label_map.find(label_text);
        if (it == label_map.end()) {
            it = label_map.emplace(label_text, static_cast<int>(data.label_names.size())).first;
            data.label_names.push_back(label_text);
        }
        rec.label = it->second;
        data.records.push_back(std::move(rec));
    }

    if (data.records.empty())
        throw DataError("no data rows in " + path.string());
    data.schema.class_count = std::max<int>(2, static_cast<int>(data.label_names.size()));
    return data;
}

std::unique_ptr<MaterializedStream> open_csv_stream(const std::filesystem::path& path,
                                                    const std::string& label_column,
                                                    std::optional<std::size_t> limit) {
    CsvData data = read_labeled_csv(path, label_column, limit);
    return std::make_unique<MaterializedStream>(std::move(data.schema), std::move(data.records));
}

void write_labeled_csv(const std::filesystem::path& path, const StreamSchema& schema,
                       const std::vector<LabeledInstance>& records,
                       const std::vector<std::string>* label_names) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write file: " + path.string());
    for (const auto& name : schema.feature_names)
        out << name << ',';
    out << schema.label_name << '\n';
    for (const auto& rec : records) {
        for (double v : rec.instance.features)
            out << format_double(v) << ',';
        if (label_names)
            out << (*label_names)[rec.label];
        else
            out << rec.label;
        out << '\n';
    }
}

std::vector<int> generate_bernoulli_stream(const std::vector<BernoulliSegment>& segments,
                                           std::uint64_t seed) {
    if (segments.empty())
        throw ConfigError("bernoulli stream needs at least one segment");
    std::size_t total = 0;
    for (const auto& seg : segments) {
        if (seg.length == 0)
            throw ConfigError("bernoulli segment length must be positive");
        if (seg.p < 0.0 || seg.p > 1.0)
            throw ConfigError("bernoulli segment p must be in [0,1]");
        total += seg.length;
    }
    SeededRng rng(seed);
    std::vector<int> out;
    out.reserve(total);
    for (const auto& seg : segments)
        for (std::size_t i = 0; i < seg.length; ++i)
            out.push_back(rng.bernoulli(seg.p) ? 1 : 0);
    return out;
}

int LinearThresholdConcept::label(const Instance& x) const {
    double dot = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        dot += weights[i] * x.features[i];
    return dot >= threshold ? 1 : 0;
}

LinearThresholdConcept LinearThresholdConcept::random(int features, SeededRng& rng) {
    LinearThresholdConcept c;
    c.weights.resize(features);
    for (double& w : c.weights)
        w = rng.uniform() * 2.0 - 1.0;
    // threshold through the cube centre keeps the classes roughly balanced
    c.threshold = 0.0;
    for (double w : c.weights)
        c.threshold += 0.5 * w;
    return c;
}

LinearThresholdConcept LinearThresholdConcept::axis(int features, int feature, double cut) {
    LinearThresholdConcept c;
    c.weights.assign(features, 0.0);
    c.weights.at(feature) = 1.0;
    c.threshold = cut;
    return c;
}

void ConceptSwitchConfig::validate() const {
    if (length == 0)
        throw ConfigError("concept switch: length must be positive");
    if (feature_count < 1)
        throw ConfigError("concept switch: feature_count must be positive");
    if (drift_kind == DriftKind::Abrupt && drift_width != 0)
        throw ConfigError("concept switch: abrupt drift requires width 0");
    if (drift_kind == DriftKind::Gradual && drift_width == 0)
        throw ConfigError("concept switch: gradual drift requires width > 0");
    if (drift_position + drift_width > length)
        throw ConfigError("concept switch: drift_position + drift_width must not exceed length");
    if (noise < 0.0 || noise >= 0.5)
        throw ConfigError("concept switch: noise must be in [0, 0.5)");
    if (static_cast<int>(concept_a.weights.size()) != feature_count ||
        static_cast<int>(concept_b.weights.size()) != feature_count)
        throw ConfigError("concept switch: concept dimensionality mismatch");
}

ConceptSwitchStream::ConceptSwitchStream(const ConceptSwitchConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    schema_ = StreamSchema::numeric(cfg.feature_count, 2);

    // Independent substreams keep feature values reproducible regardless of
    // the noise and mixing settings.
    SeededRng feature_rng = SeededRng(cfg.seed).derive(1);
    SeededRng mix_rng = SeededRng(cfg.seed).derive(2);
    SeededRng noise_rng = SeededRng(cfg.seed).derive(3);

    records_.reserve(cfg.length);
    from_concept_b_.reserve(cfg.length);
    label_flipped_.reserve(cfg.length);

    for (std::size_t i = 0; i < cfg.length; ++i) {
        LabeledInstance rec;
        rec.instance.features.resize(cfg.feature_count);
        for (double& f : rec.instance.features)
            f = feature_rng.uniform();

        bool use_b;
        if (i < cfg.drift_position) {
            use_b = false;
        } else if (i >= cfg.drift_position + cfg.drift_width) {
            use_b = true;
        } else {
            // linear mix: P(concept B) rises 0 -> 1 across the window
            const double frac = static_cast<double>(i - cfg.drift_position) /
                                static_cast<double>(cfg.drift_width);
            use_b = mix_rng.bernoulli(frac);
        }
        rec.label = use_b ? cfg.concept_b.label(rec.instance) : cfg.concept_a.label(rec.instance);

        bool flipped = false;
        if (cfg.noise > 0.0 && noise_rng.bernoulli(cfg.noise)) {
            rec.label = 1 - rec.label;
            flipped = true;
        }

        records_.push_back(std::move(rec));
        from_concept_b_.push_back(use_b ? 1 : 0);
        label_flipped_.push_back(flipped ? 1 : 0);
    }
}

std::unique_ptr<ConceptSwitchStream> generate_concept_switch(const ConceptSwitchConfig& cfg) {
    return std::make_unique<ConceptSwitchStream>(cfg);
}

}  // namespace driftstream
