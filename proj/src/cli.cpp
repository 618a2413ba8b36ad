#include "driftstream/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "driftstream/core.hpp"
#include "driftstream/ensembles.hpp"
#include "driftstream/eval.hpp"
#include "driftstream/pwpae.hpp"
#include "driftstream/sampling.hpp"
#include "driftstream/streams.hpp"
#include "driftstream/trees.hpp"

namespace driftstream::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::vector<std::string> kModelNames = {"ht",        "efdt",      "lb",
                                              "arf-adwin", "arf-ddm",   "srp-adwin",
                                              "srp-ddm",   "pwpae"};

struct ModelParams {
    double adwin_delta = 0.002;
    double ddm_warn = 2.0;
    double ddm_drift = 3.0;
    int members = 10;
    double lambda = 6.0;
    double subspace_fraction = 0.6;
    double epsilon = 0.001;
    HoeffdingTreeConfig tree;
};

EnsembleConfig ensemble_config(const ModelParams& p, DetectorKind detector, std::uint64_t seed) {
    EnsembleConfig cfg;
    cfg.n_members = p.members;
    cfg.lambda = p.lambda;
    cfg.detector = detector;
    cfg.subspace_fraction = p.subspace_fraction;
    cfg.tree_config = p.tree;
    cfg.adwin.delta = p.adwin_delta;
    cfg.ddm.warning_coeff = p.ddm_warn;
    cfg.ddm.drift_coeff = p.ddm_drift;
    cfg.seed = seed;
    return cfg;
}

std::unique_ptr<AdaptiveLearner> make_model(const std::string& name, int features, int classes,
                                            const ModelParams& p, std::uint64_t run_seed) {
    const std::uint64_t seed = SeededRng::mix_seed(run_seed, fnv1a_hash(name));
    if (name == "ht")
        return std::make_unique<IncrementalTree>(TreeKind::Hoeffding, features, classes, p.tree);
    if (name == "efdt")
        return std::make_unique<IncrementalTree>(TreeKind::ExtremelyFast, features, classes,
                                                 p.tree);
    if (name == "lb")
        return build_ensemble(EnsembleKind::LB, features, classes,
                              ensemble_config(p, DetectorKind::Adwin, seed));
    if (name == "arf-adwin")
        return build_ensemble(EnsembleKind::ARF, features, classes,
                              ensemble_config(p, DetectorKind::Adwin, seed));
    if (name == "arf-ddm")
        return build_ensemble(EnsembleKind::ARF, features, classes,
                              ensemble_config(p, DetectorKind::Ddm, seed));
    if (name == "srp-adwin")
        return build_ensemble(EnsembleKind::SRP, features, classes,
                              ensemble_config(p, DetectorKind::Adwin, seed));
    if (name == "srp-ddm")
        return build_ensemble(EnsembleKind::SRP, features, classes,
                              ensemble_config(p, DetectorKind::Ddm, seed));
    if (name == "pwpae") {
        PwpaeConfig cfg;
        cfg.epsilon = p.epsilon;
        cfg.base = ensemble_config(p, DetectorKind::Adwin, seed);
        cfg.seed = seed;
        return std::make_unique<PwpaeModel>(features, classes, cfg);
    }
    std::string valid;
    for (const auto& n : kModelNames)
        valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown model '" + name + "' (valid: " + valid + ")");
}

json tree_config_json(const HoeffdingTreeConfig& t) {
    json j;
    j["delta"] = t.delta;
    j["grace_period"] = t.grace_period;
    j["tie_threshold"] = t.tie_threshold;
    j["numeric_bins"] = t.numeric_bins;
    if (t.max_depth)
        j["max_depth"] = *t.max_depth;
    return j;
}

json params_json(const ModelParams& p) {
    json j;
    j["adwin_delta"] = p.adwin_delta;
    j["ddm_warn"] = p.ddm_warn;
    j["ddm_drift"] = p.ddm_drift;
    j["members"] = p.members;
    j["lambda"] = p.lambda;
    j["subspace_fraction"] = p.subspace_fraction;
    j["epsilon"] = p.epsilon;
    j["tree"] = tree_config_json(p.tree);
    return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write file: " + path.string());
    out << text;
}

std::string fingerprint(const json& j) {
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a_hash(j.dump());
    return hex.str();
}

struct SynthArgs {
    std::string kind = "abrupt";
    std::size_t length = 10000;
    std::size_t position = 5000;
    std::size_t width = 0;
    double noise = 0.05;
    int features = 10;

    ConceptSwitchConfig to_config(std::uint64_t seed) const {
        ConceptSwitchConfig cfg;
        if (kind != "abrupt" && kind != "gradual")
            throw ConfigError("--kind must be 'abrupt' or 'gradual'");
        cfg.drift_kind = kind == "abrupt" ? DriftKind::Abrupt : DriftKind::Gradual;
        cfg.length = length;
        cfg.drift_position = position;
        cfg.drift_width = cfg.drift_kind == DriftKind::Abrupt ? 0 : width;
        if (cfg.drift_kind == DriftKind::Gradual && width == 0)
            throw ConfigError("--width must be positive for gradual drift");
        cfg.noise = noise;
        cfg.feature_count = features;
        cfg.seed = seed;
        if (features < 2)
            throw ConfigError("--features must be >= 2");
        // the two concepts disagree on half the feature space
        cfg.concept_a = LinearThresholdConcept::axis(features, 0, 0.5);
        cfg.concept_b = LinearThresholdConcept::axis(features, 1, 0.5);
        return cfg;
    }

    json to_json(std::uint64_t seed) const {
        json j;
        j["kind"] = kind;
        j["length"] = length;
        j["drift_position"] = position;
        j["drift_width"] = kind == "abrupt" ? 0 : width;
        j["noise"] = noise;
        j["features"] = features;
        j["seed"] = seed;
        j["concept_a"] = "f1 >= 0.5";
        j["concept_b"] = "f2 >= 0.5";
        return j;
    }
};

int run_sample(const std::string& input, const std::string& label, double fraction, int k,
               std::uint64_t seed, const std::string& out, std::optional<std::size_t> limit,
               const std::string& scale) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("--fraction must be in (0,1]");
    if (k < 1)
        throw ConfigError("--k must be >= 1");
    if (scale != "minmax" && scale != "none")
        throw ConfigError("--scale must be 'minmax' or 'none'");

    CsvData data = read_labeled_csv(input, label, limit);
    KMeansConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    cfg.scale = scale == "minmax" ? ScaleMode::MinMax : ScaleMode::None;

    SampleMetadata meta;
    const auto sampled =
        cluster_sample(data.records, fraction, cfg, data.schema.class_count, &meta);
    write_labeled_csv(out, data.schema, sampled, &data.label_names);

    json j;
    j["command"] = "sample";
    j["input"] = input;
    j["label"] = label;
    j["fraction"] = fraction;
    j["k"] = meta.requested_k;
    j["effective_k"] = meta.effective_k;
    j["seed"] = seed;
    j["scale"] = scale;
    if (limit)
        j["limit"] = *limit;
    j["rows_in"] = data.records.size();
    j["rows_out"] = sampled.size();
    j["cluster_sizes"] = meta.cluster_sizes;
    j["cluster_samples"] = meta.cluster_samples;
    j["class_ratio_before"] = meta.class_ratio_before;
    j["class_ratio_after"] = meta.class_ratio_after;
    j["label_names"] = data.label_names;
    write_text_file(out + ".meta.json", j.dump(2) + "\n");

    std::cout << "sampled " << sampled.size() << " of " << data.records.size() << " rows -> "
              << out << "\n";
    return 0;
}

int run_synth(const SynthArgs& synth, std::uint64_t seed, const std::string& out) {
    const ConceptSwitchConfig cfg = synth.to_config(seed);
    const auto stream = generate_concept_switch(cfg);
    write_labeled_csv(out, stream->schema(), stream->records());

    json j = synth.to_json(seed);
    j["command"] = "synth";
    j["rows"] = stream->records().size();
    write_text_file(out + ".meta.json", j.dump(2) + "\n");

    std::cout << "wrote " << stream->records().size() << " rows -> " << out << "\n";
    return 0;
}

struct CompareInput {
    StreamSchema schema;
    std::vector<LabeledInstance> records;
    json source_meta;
};

CompareInput load_compare_input(const std::string& input, const std::string& label,
                                std::optional<std::size_t> limit, const std::string& synth_kind,
                                const SynthArgs& synth, std::uint64_t seed,
                                const std::string& scale) {
    CompareInput in;
    if (!input.empty() && !synth_kind.empty())
        throw ConfigError("--input and --synth are mutually exclusive");
    if (input.empty() && synth_kind.empty())
        throw ConfigError("one of --input or --synth is required");

    if (!input.empty()) {
        if (label.empty())
            throw ConfigError("--label is required with --input");
        CsvData data = read_labeled_csv(input, label, limit);
        in.schema = std::move(data.schema);
        in.records = std::move(data.records);
        in.source_meta["input"] = input;
        in.source_meta["label"] = label;
        if (limit)
            in.source_meta["limit"] = *limit;
        in.source_meta["label_names"] = data.label_names;
    } else {
        SynthArgs args = synth;
        args.kind = synth_kind;
        const ConceptSwitchConfig cfg = args.to_config(seed);
        auto stream = generate_concept_switch(cfg);
        in.schema = stream->schema();
        in.records = stream->records();
        in.source_meta["synth"] = args.to_json(seed);
    }

    if (scale == "minmax") {
        std::vector<Instance> features;
        features.reserve(in.records.size());
        for (const auto& r : in.records)
            features.push_back(r.instance);
        features = minmax_scale(features);
        for (std::size_t i = 0; i < in.records.size(); ++i)
            in.records[i].instance = std::move(features[i]);
    } else if (scale != "none") {
        throw ConfigError("--scale must be 'minmax' or 'none'");
    }
    return in;
}

std::string metrics_cell(const std::optional<Metrics>& m, double Metrics::*field) {
    return m ? format_double((*m).*field) : "";
}

int run_compare(const std::string& input, const std::string& label,
                std::optional<std::size_t> limit, const std::string& synth_kind,
                const SynthArgs& synth, std::vector<std::string> models, double train_fraction,
                std::uint64_t seed, const std::string& out_dir, const ModelParams& params,
                const std::string& scale) {
    if (models.empty())
        models = kModelNames;
    for (const auto& name : models)
        if (std::find(kModelNames.begin(), kModelNames.end(), name) == kModelNames.end()) {
            std::string valid;
            for (const auto& n : kModelNames)
                valid += (valid.empty() ? "" : ", ") + n;
            throw ConfigError("unknown model '" + name + "' (valid: " + valid + ")");
        }

    CompareInput in =
        load_compare_input(input, label, limit, synth_kind, synth, seed, scale);

    fs::create_directories(out_dir);

    json meta;
    meta["command"] = "compare";
    meta["source"] = in.source_meta;
    meta["models"] = models;
    meta["train_fraction"] = train_fraction;
    meta["seed"] = seed;
    meta["scale"] = scale;
    meta["params"] = params_json(params);
    meta["checkpoint_interval"] = 50;
    meta["rows"] = in.records.size();
    const std::string fp = fingerprint(meta);
    meta["fingerprint"] = fp;

    const auto [train, test] = holdout_split(in.records, train_fraction);

    std::ostringstream results;
    results << "model,accuracy,precision,recall,f1,avg_test_time_ms\n";
    std::ostringstream table;
    table << std::left << std::setw(12) << "model" << std::right << std::setw(10) << "accuracy"
          << std::setw(11) << "precision" << std::setw(8) << "recall" << std::setw(8) << "f1"
          << std::setw(13) << "avg_test(ms)" << "\n";

    for (const auto& name : models) {
        auto model = make_model(name, in.schema.feature_count(), in.schema.class_count, params,
                                seed);
        MaterializedStream test_stream(in.schema,
                                       std::vector<LabeledInstance>(test.begin(), test.end()));
        PrequentialOptions opts;
        opts.model_name = name;
        opts.config_fingerprint = fp;
        opts.seed = seed;

        PrequentialReport report;
        try {
            report = prequential_run(*model, train, test_stream, opts);
        } catch (ConfigError& e) {
            throw ConfigError("model " + name + ": " + e.what());
        } catch (DataError& e) {
            throw DataError("model " + name + ": " + e.what());
        } catch (InternalError& e) {
            throw InternalError("model " + name + ": " + e.what());
        }

        std::ostringstream curve;
        curve << "instance_index,cumulative_accuracy\n";
        for (const auto& pt : report.curve)
            curve << pt.instance_index << ',' << format_double(pt.cumulative_accuracy) << '\n';
        write_text_file(fs::path(out_dir) / ("curve_" + name + ".csv"), curve.str());

        if (const auto* pw = dynamic_cast<const PwpaeModel*>(model.get())) {
            std::ostringstream trace;
            const auto names = pw->learner_names();
            trace << "instance_index";
            for (const auto& n : names)
                trace << ",err_" << n << ",w_" << n;
            trace << '\n';
            for (const auto& snap : pw->weight_trace()) {
                trace << snap.instance_index;
                for (int j = 0; j < PwpaeModel::kLearnerCount; ++j)
                    trace << ',' << format_double(snap.error_rate[j]) << ','
                          << format_double(snap.weight[j]);
                trace << '\n';
            }
            write_text_file(fs::path(out_dir) / "pwpae_weights.csv", trace.str());
        }

        const double ms = report.mean_test_time_s * 1000.0;
        results << name << ',' << format_double(report.accuracy) << ','
                << metrics_cell(report.binary, &Metrics::precision) << ','
                << metrics_cell(report.binary, &Metrics::recall) << ','
                << metrics_cell(report.binary, &Metrics::f1) << ',' << format_double(ms) << '\n';

        table << std::left << std::setw(12) << name << std::right << std::fixed
              << std::setprecision(4) << std::setw(10) << report.accuracy;
        if (report.binary)
            table << std::setw(11) << report.binary->precision << std::setw(8)
                  << report.binary->recall << std::setw(8) << report.binary->f1;
        else
            table << std::setw(11) << "-" << std::setw(8) << "-" << std::setw(8) << "-";
        table << std::setw(13) << std::setprecision(3) << ms << "\n";
        table.unsetf(std::ios::fixed);
    }

    write_text_file(fs::path(out_dir) / "results.csv", results.str());
    write_text_file(fs::path(out_dir) / "run_meta.json", meta.dump(2) + "\n");
    std::cout << table.str();
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"data-stream learning toolkit: drift-adaptive ensembles on CSV and synthetic "
                 "streams"};
    app.require_subcommand(1);

    // sample
    auto* sample = app.add_subcommand("sample", "k-means cluster sampling of a CSV dataset");
    std::string s_input, s_label, s_out = "sampled.csv", s_scale = "minmax";
    double s_fraction = 0.01;
    int s_k = 8;
    std::uint64_t s_seed = 1;
    std::optional<std::size_t> s_limit;
    sample->add_option("--input", s_input, "input CSV path")->required();
    sample->add_option("--label", s_label, "label column name")->required();
    sample->add_option("--fraction", s_fraction, "sampled fraction in (0,1]");
    sample->add_option("--k", s_k, "cluster count");
    sample->add_option("--seed", s_seed, "rng seed");
    sample->add_option("--out", s_out, "output CSV path");
    sample->add_option("--limit", s_limit, "read at most this many rows");
    sample->add_option("--scale", s_scale, "feature scaling for clustering: minmax|none");

    // compare
    auto* compare =
        app.add_subcommand("compare", "prequential comparison of drift-adaptive models");
    std::string c_input, c_label, c_out = "runs", c_synth, c_scale = "none";
    std::vector<std::string> c_models;
    double c_train_fraction = 0.10;
    std::uint64_t c_seed = 1;
    std::optional<std::size_t> c_limit;
    SynthArgs c_synth_args;
    compare->add_option("--input", c_input, "input CSV path");
    compare->add_option("--label", c_label, "label column name");
    compare->add_option("--limit", c_limit, "read at most this many rows");
    compare->add_option("--models", c_models, "comma-separated model list")->delimiter(',');
    compare->add_option("--train-fraction", c_train_fraction, "holdout warmup fraction");
    compare->add_option("--seed", c_seed, "rng seed");
    compare->add_option("--out", c_out, "output directory");
    compare->add_option("--scale", c_scale, "min-max scale features: minmax|none");
    compare->add_option("--synth", c_synth, "synthetic stream instead of CSV: abrupt|gradual");
    compare->add_option("--length", c_synth_args.length, "synthetic stream length");
    compare->add_option("--position", c_synth_args.position, "drift position");
    compare->add_option("--width", c_synth_args.width, "gradual drift width");
    compare->add_option("--noise", c_synth_args.noise, "label flip probability");
    compare->add_option("--features", c_synth_args.features, "synthetic feature count");
    ModelParams c_params;
    compare->add_option("--adwin-delta", c_params.adwin_delta, "ADWIN confidence");
    compare->add_option("--ddm-warn", c_params.ddm_warn, "DDM warning coefficient");
    compare->add_option("--ddm-drift", c_params.ddm_drift, "DDM drift coefficient");
    compare->add_option("--members", c_params.members, "ensemble member count");
    compare->add_option("--lambda", c_params.lambda, "Poisson bagging rate");
    compare->add_option("--subspace-fraction", c_params.subspace_fraction,
                        "global subspace fraction");
    compare->add_option("--epsilon", c_params.epsilon, "weight damping constant");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a concept-switch stream CSV");
    SynthArgs g_args;
    std::string g_out = "stream.csv";
    std::uint64_t g_seed = 1;
    synth->add_option("--kind", g_args.kind, "abrupt|gradual")->required();
    synth->add_option("--length", g_args.length, "stream length");
    synth->add_option("--position", g_args.position, "drift position");
    synth->add_option("--width", g_args.width, "gradual drift width");
    synth->add_option("--noise", g_args.noise, "label flip probability");
    synth->add_option("--features", g_args.features, "feature count");
    synth->add_option("--seed", g_seed, "rng seed");
    synth->add_option("--out", g_out, "output CSV path");

    std::vector<std::string> argv_copy = args;
    std::vector<const char*> argv;
    argv.push_back("driftstream");
    for (const auto& a : argv_copy)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sample->parsed())
            return run_sample(s_input, s_label, s_fraction, s_k, s_seed, s_out, s_limit, s_scale);
        if (compare->parsed())
            return run_compare(c_input, c_label, c_limit, c_synth, c_synth_args, c_models,
                               c_train_fraction, c_seed, c_out, c_params, c_scale);
        if (synth->parsed())
            return run_synth(g_args, g_seed, g_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}

int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace driftstream::cli
