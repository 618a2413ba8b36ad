#pragma once

#include <cstdint>
#include <vector>

#include "driftstream/core.hpp"

namespace driftstream {

enum class KMeansInit { KMeansPP, Random };
enum class ScaleMode { MinMax, None };

struct KMeansConfig {
    int k = 8;
    int max_iters = 100;
    double tol = 1e-4;  // max centroid shift that counts as converged
    KMeansInit init = KMeansInit::KMeansPP;
    std::uint64_t seed = 1;
    ScaleMode scale = ScaleMode::MinMax;  // applied inside cluster_sample only

    void validate() const;
};

struct ClusterModel {
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignments;         // per point, nearest centroid
    double inertia = 0.0;
    std::vector<double> inertia_history;  // after each assignment phase
    int requested_k = 0;
    int effective_k = 0;  // < requested_k when duplicate points collapse clusters
    int iterations = 0;
};

// Lloyd's algorithm with seeded k-means++ (or random) initialization. Empty
// clusters are re-seeded from the point farthest from its centroid. When the
// data has fewer distinct points than k, the clustering collapses and
// effective_k reports the reduced count.
ClusterModel kmeans_fit(const std::vector<Instance>& points, const KMeansConfig& cfg);

struct SampleMetadata {
    int requested_k = 0;
    int effective_k = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> cluster_sizes;
    std::vector<std::size_t> cluster_samples;
    std::vector<double> class_ratio_before;
    std::vector<double> class_ratio_after;
};

// Proportional per-cluster sampling without replacement: cluster i
// contributes floor(fraction * n_i) points plus largest-remainder top-ups so
// the total equals llround(fraction * n). Output preserves the original
// record order.
std::vector<LabeledInstance> cluster_sample(const std::vector<LabeledInstance>& data,
                                            double fraction, const KMeansConfig& cfg,
                                            int class_count = 2,
                                            SampleMetadata* meta = nullptr);

// Per-feature min-max scaling of a feature matrix; constant features map
// to 0.
std::vector<Instance> minmax_scale(const std::vector<Instance>& points);

}  // namespace driftstream
