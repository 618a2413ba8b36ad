#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftstream {

// Error categories map 1:1 onto CLI exit codes (1/2/3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StreamSchema {
    std::vector<std::string> feature_names;
    std::string label_name = "label";
    int class_count = 2;

    int feature_count() const { return static_cast<int>(feature_names.size()); }
    void validate() const;

    static StreamSchema numeric(int features, int classes, std::string label = "label");
};

struct Instance {
    std::vector<double> features;
};

struct LabeledInstance {
    Instance instance;
    int label = 0;
};

// Per-class probability vector, the unit of prediction fusion.
struct ClassDistribution {
    std::vector<double> probs;

    int size() const { return static_cast<int>(probs.size()); }
    static ClassDistribution uniform(int classes);
};

// Renormalizes a non-negative vector to sum 1. All-zero input maps to the
// uniform distribution so an untrained learner still yields a valid vote.
ClassDistribution normalize(const ClassDistribution& dist);

// Smallest index attaining the maximum probability.
int argmax_class(const ClassDistribution& dist);

enum class DriftSignal { Stable, Warning, Drift };

const char* to_string(DriftSignal s);

// Deterministic seeded randomness. The engine is std::mt19937_64 (fully
// specified by the standard) and every distribution below is implemented
// here rather than taken from <random>, so equal seeds give bit-identical
// draw sequences on every platform and standard library.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return engine_(); }

    // [0,1) with 53 random bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // [0,n) by 128-bit multiply-shift
    std::uint64_t uniform_below(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

    // Knuth product-of-uniforms; lambda is split into <=30 slabs so the
    // loop count stays bounded for large rates.
    int poisson(double lambda);

    // Independent substream derived from this rng's seed (not its state).
    SeededRng derive(std::uint64_t stream) const { return SeededRng(mix_seed(seed_, stream)); }

    // splitmix64-based seed mixing, used wherever one run seed has to fan
    // out into per-component seeds.
    static std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// Uniform contract shared by trees, ensembles and the fused model: predict
// a class distribution, then train on the labelled instance. Prequential
// callers must predict before they train.
struct AdaptiveLearner {
    virtual ~AdaptiveLearner() = default;
    virtual ClassDistribution predict_proba(const Instance& x) const = 0;
    virtual void train_one(const LabeledInstance& x) = 0;
    virtual int class_count() const = 0;
    virtual std::string name() const = 0;

    int predict(const Instance& x) const { return argmax_class(predict_proba(x)); }
};

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace driftstream
