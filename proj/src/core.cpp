#include "driftstream/core.hpp"

#include <cmath>

namespace driftstream {

void StreamSchema::validate() const {
    if (feature_names.empty())
        throw ConfigError("schema needs at least one feature");
    if (class_count < 2)
        throw ConfigError("schema needs class_count >= 2");
}

StreamSchema StreamSchema::numeric(int features, int classes, std::string label) {
    StreamSchema s;
    s.feature_names.reserve(features);
    for (int i = 0; i < features; ++i)
        s.feature_names.push_back("f" + std::to_string(i + 1));
    s.label_name = std::move(label);
    s.class_count = classes;
    s.validate();
    return s;
}

ClassDistribution ClassDistribution::uniform(int classes) {
    return ClassDistribution{std::vector<double>(classes, 1.0 / classes)};
}

ClassDistribution normalize(const ClassDistribution& dist) {
    if (dist.probs.empty())
        throw ConfigError("normalize: empty distribution");
    double sum = 0.0;
    for (double v : dist.probs) {
        if (v < 0.0 || !std::isfinite(v))
            throw ConfigError("normalize: entries must be finite and non-negative");
        sum += v;
    }
    if (sum <= 0.0)
        return ClassDistribution::uniform(dist.size());
    ClassDistribution out = dist;
    for (double& v : out.probs)
        v /= sum;
    return out;
}

int argmax_class(const ClassDistribution& dist) {
    if (dist.probs.empty())
        throw ConfigError("argmax_class: empty distribution");
    int best = 0;
    for (int i = 1; i < dist.size(); ++i)
        if (dist.probs[i] > dist.probs[best])
            best = i;
    return best;
}

const char* to_string(DriftSignal s) {
    switch (s) {
        case DriftSignal::Stable: return "stable";
        case DriftSignal::Warning: return "warning";
        case DriftSignal::Drift: return "drift";
    }
    return "?";
}

std::uint64_t SeededRng::uniform_below(std::uint64_t n) {
    if (n == 0)
        throw ConfigError("uniform_below: n must be positive");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

int SeededRng::poisson(double lambda) {
    if (!(lambda > 0.0))
        throw ConfigError("poisson: lambda must be positive");
    int total = 0;
    // Poisson(a+b) = Poisson(a) + Poisson(b) for independent draws.
    while (lambda > 30.0) {
        total += poisson(30.0);
        lambda -= 30.0;
    }
    const double limit = std::exp(-lambda);
    double product = uniform();
    int k = 0;
    while (product > limit) {
        ++k;
        product *= uniform();
    }
    return total + k;
}

std::uint64_t SeededRng::mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace driftstream
