#include "driftstream/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace driftstream {

void KMeansConfig::validate() const {
    if (k < 1)
        throw ConfigError("kmeans: k must be >= 1");
    if (max_iters < 1)
        throw ConfigError("kmeans: max_iters must be >= 1");
    if (!(tol > 0.0))
        throw ConfigError("kmeans: tol must be positive");
}

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

std::vector<std::vector<double>> init_centroids(const std::vector<Instance>& points,
                                                const KMeansConfig& cfg, SeededRng& rng) {
    const std::size_t n = points.size();
    std::vector<std::vector<double>> centroids;

    if (cfg.init == KMeansInit::Random) {
        // k distinct indices; duplicate feature vectors may still collapse later
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < cfg.k; ++i) {
            const std::size_t j = i + rng.uniform_below(pool.size() - i);
            std::swap(pool[i], pool[j]);
            centroids.push_back(points[pool[i]].features);
        }
        return centroids;
    }

    // k-means++: squared-distance weighted seeding; zero-distance candidates
    // (duplicates of an existing centroid) carry no weight, so the seeding
    // collapses naturally when there are fewer distinct points than k
    centroids.push_back(points[rng.uniform_below(n)].features);
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(centroids.size()) < cfg.k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist2[i] = std::min(dist2[i], squared_distance(points[i].features, centroids.back()));
            total += dist2[i];
        }
        if (total <= 0.0)
            break;  // every remaining point duplicates a centroid
        const double target = rng.uniform() * total;
        double cum = 0.0;
        std::size_t chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            cum += dist2[i];
            if (cum >= target && dist2[i] > 0.0) {
                chosen = i;
                break;
            }
        }
        centroids.push_back(points[chosen].features);
    }
    return centroids;
}

}  // namespace

ClusterModel kmeans_fit(const std::vector<Instance>& points, const KMeansConfig& cfg) {
    cfg.validate();
    if (points.empty())
        throw ConfigError("kmeans: no points");
    if (static_cast<std::size_t>(cfg.k) > points.size())
        throw ConfigError("kmeans: k exceeds point count");

    const std::size_t n = points.size();
    const std::size_t dims = points[0].features.size();
    SeededRng rng(cfg.seed);

    ClusterModel model;
    model.requested_k = cfg.k;
    model.centroids = init_centroids(points, cfg, rng);
    const int k = static_cast<int>(model.centroids.size());
    model.effective_k = k;
    model.assignments.assign(n, 0);

    std::vector<std::vector<double>> sums(k, std::vector<double>(dims, 0.0));
    std::vector<std::size_t> counts(k, 0);

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        // assignment phase
        double inertia = 0.0;
        for (auto& s : sums)
            std::fill(s.begin(), s.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_distance(points[i].features, model.centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = squared_distance(points[i].features, model.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            model.assignments[i] = best;
            inertia += best_d;
            counts[best] += 1;
            for (std::size_t f = 0; f < dims; ++f)
                sums[best][f] += points[i].features[f];
        }
        model.inertia = inertia;
        model.inertia_history.push_back(inertia);
        model.iterations = iter + 1;

        // update phase
        double max_shift = 0.0;
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // re-seed from the point farthest from its centroid
                double far_d = -1.0;
                std::size_t far_i = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d =
                        squared_distance(points[i].features, model.centroids[model.assignments[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                if (far_d <= 0.0)
                    continue;  // all mass sits on the centroids already
                max_shift = std::numeric_limits<double>::infinity();
                model.centroids[c] = points[far_i].features;
                continue;
            }
            for (std::size_t f = 0; f < dims; ++f) {
                const double mean = sums[c][f] / static_cast<double>(counts[c]);
                max_shift = std::max(max_shift, std::fabs(mean - model.centroids[c][f]));
                model.centroids[c][f] = mean;
            }
        }
        if (max_shift < cfg.tol)
            break;
    }

    int populated = 0;
    std::vector<bool> used(k, false);
    for (int a : model.assignments)
        used[a] = true;
    for (bool u : used)
        populated += u ? 1 : 0;
    model.effective_k = populated;
    return model;
}

std::vector<Instance> minmax_scale(const std::vector<Instance>& points) {
    if (points.empty())
        return {};
    const std::size_t dims = points[0].features.size();
    std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dims, -std::numeric_limits<double>::infinity());
    for (const auto& p : points)
        for (std::size_t f = 0; f < dims; ++f) {
            lo[f] = std::min(lo[f], p.features[f]);
            hi[f] = std::max(hi[f], p.features[f]);
        }
    std::vector<Instance> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i].features.resize(dims);
        for (std::size_t f = 0; f < dims; ++f)
            out[i].features[f] =
                hi[f] > lo[f] ? (points[i].features[f] - lo[f]) / (hi[f] - lo[f]) : 0.0;
    }
    return out;
}

std::vector<LabeledInstance> cluster_sample(const std::vector<LabeledInstance>& data,
                                            double fraction, const KMeansConfig& cfg,
                                            int class_count, SampleMetadata* meta) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("cluster_sample: fraction must be in (0,1]");
    if (data.empty())
        throw ConfigError("cluster_sample: empty dataset");
    const std::size_t n = data.size();
    const std::size_t target = static_cast<std::size_t>(std::llround(fraction * n));
    if (target < 1)
        throw ConfigError("cluster_sample: fraction * n must be >= 1");

    std::vector<Instance> points;
    points.reserve(n);
    for (const auto& rec : data)
        points.push_back(rec.instance);
    if (cfg.scale == ScaleMode::MinMax)
        points = minmax_scale(points);

    KMeansConfig fit_cfg = cfg;
    fit_cfg.k = std::min<int>(cfg.k, static_cast<int>(n));
    const ClusterModel model = kmeans_fit(points, fit_cfg);
    const int k = static_cast<int>(model.centroids.size());

    std::vector<std::vector<std::size_t>> cluster_members(k);
    for (std::size_t i = 0; i < n; ++i)
        cluster_members[model.assignments[i]].push_back(i);

    // proportional allocation with largest-remainder correction
    std::vector<std::size_t> quota(k, 0);
    std::vector<std::pair<double, int>> remainders;
    std::size_t allocated = 0;
    for (int c = 0; c < k; ++c) {
        const double exact = fraction * static_cast<double>(cluster_members[c].size());
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        quota[c] = std::min(quota[c], cluster_members[c].size());
        allocated += quota[c];
        remainders.emplace_back(exact - static_cast<double>(quota[c]), c);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first > b.first;
        return a.second < b.second;  // deterministic tie-break by cluster index
    });
    for (std::size_t r = 0; allocated < target && r < remainders.size(); ++r) {
        const int c = remainders[r].second;
        if (quota[c] < cluster_members[c].size()) {
            quota[c] += 1;
            ++allocated;
        }
    }
    // duplicates can leave tiny clusters short; top up wherever room remains
    for (int c = 0; allocated < target && c < k; ++c) {
        while (allocated < target && quota[c] < cluster_members[c].size()) {
            quota[c] += 1;
            ++allocated;
        }
    }

    SeededRng rng = SeededRng(cfg.seed).derive(0x5a);
    std::vector<std::size_t> chosen;
    chosen.reserve(target);
    for (int c = 0; c < k; ++c) {
        std::vector<std::size_t>& members = cluster_members[c];
        for (std::size_t i = 0; i < quota[c]; ++i) {
            const std::size_t j = i + rng.uniform_below(members.size() - i);
            std::swap(members[i], members[j]);
            chosen.push_back(members[i]);
        }
    }
    std::sort(chosen.begin(), chosen.end());

    std::vector<LabeledInstance> out;
    out.reserve(chosen.size());
    for (std::size_t idx : chosen)
        out.push_back(data[idx]);

    if (meta) {
        meta->requested_k = cfg.k;
        meta->effective_k = model.effective_k;
        meta->seed = cfg.seed;
        meta->cluster_sizes.assign(k, 0);
        meta->cluster_samples = quota;
        for (int c = 0; c < k; ++c)
            meta->cluster_sizes[c] = cluster_members[c].size();
        meta->class_ratio_before.assign(class_count, 0.0);
        meta->class_ratio_after.assign(class_count, 0.0);
        for (const auto& rec : data)
            if (rec.label >= 0 && rec.label < class_count)
                meta->class_ratio_before[rec.label] += 1.0 / static_cast<double>(n);
        for (const auto& rec : out)
            if (rec.label >= 0 && rec.label < class_count)
                meta->class_ratio_after[rec.label] += 1.0 / static_cast<double>(out.size());
    }
    return out;
}

}  // namespace driftstream
