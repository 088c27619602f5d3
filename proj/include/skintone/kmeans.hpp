#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "skintone/colorimetry.hpp"

namespace skintone {

// A colour sample with multiplicity.
struct WeightedLab {
    LabColor lab;
    double weight = 1;
};

struct ClusterSummary {
    LabColor centroid;
    std::size_t count = 0;  // total weight of members
};

struct KMeansParams {
    int k = 5;
    std::uint64_t seed = 0;
    int max_iterations = 100;
    double tolerance = 1e-6;  // stop when no centroid moves further than this
};

struct KMeansResult {
    std::vector<ClusterSummary> clusters;
    int iterations = 0;
    int reseeds = 0;  // empty clusters moved to the farthest point
};

// Weighted Lloyd k-means with k-means++ seeding. The result depends only on the
// sequence of points, so callers wanting order independence should canonicalise
// the input first. An empty cluster is re-seeded at the point farthest from its
// assigned centroid.
KMeansResult kmeans_lab(std::span<const WeightedLab> points, const KMeansParams& params);

}  // namespace skintone
