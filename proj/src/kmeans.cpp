#include "skintone/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "skintone/error.hpp"

namespace skintone {

namespace {

double dist2(const LabColor& a, const LabColor& b) {
    const double dl = a.L - b.L, da = a.a - b.a, db = a.b - b.b;
    return dl * dl + da * da + db * db;
}

// Uniform double in [0, 1) with a fixed bit recipe so results do not depend on
// the standard library's distribution implementation.
double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t sample(std::span<const double> mass, double total, std::mt19937_64& rng) {
    const double target = unit(rng) * total;
    double acc = 0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        acc += mass[i];
        if (target < acc && mass[i] > 0) return i;
    }
    // Round-off fell past the end: take the last point with mass.
    for (std::size_t i = mass.size(); i-- > 0;) {
        if (mass[i] > 0) return i;
    }
    return 0;
}

std::vector<LabColor> seed_plus_plus(std::span<const WeightedLab> points, int k, std::mt19937_64& rng) {
    std::vector<double> mass(points.size());
    double total = 0;
    for (std::size_t i = 0; i < points.size(); ++i) total += (mass[i] = points[i].weight);
    std::vector<LabColor> centroids{points[sample(mass, total, rng)].lab};

    std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(centroids.size()) < k) {
        total = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            nearest[i] = std::min(nearest[i], dist2(points[i].lab, centroids.back()));
            mass[i] = points[i].weight * nearest[i];
            total += mass[i];
        }
        if (total <= 0) {
            // Fewer distinct colours than clusters: duplicate the first centroid.
            centroids.push_back(centroids.front());
            continue;
        }
        centroids.push_back(points[sample(mass, total, rng)].lab);
    }
    return centroids;
}

}  // namespace

KMeansResult kmeans_lab(std::span<const WeightedLab> points, const KMeansParams& params) {
    if (params.k < 1) throw DataError("k-means needs k >= 1");
    if (points.empty()) throw DataError("k-means on an empty point set");

    std::mt19937_64 rng(params.seed);
    auto centroids = seed_plus_plus(points, params.k, rng);
    const std::size_t k = centroids.size();
    std::vector<std::size_t> assign(points.size(), 0);
    KMeansResult result;

    const auto assign_all = [&] {
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = dist2(points[i].lab, centroids[c]);
                if (d < best) {
                    best = d;
                    assign[i] = c;
                }
            }
        }
    };

    for (result.iterations = 0; result.iterations < params.max_iterations;) {
        assign_all();
        ++result.iterations;
        std::vector<double> wsum(k, 0), sl(k, 0), sa(k, 0), sb(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto c = assign[i];
            const double w = points[i].weight;
            wsum[c] += w;
            sl[c] += w * points[i].lab.L;
            sa[c] += w * points[i].lab.a;
            sb[c] += w * points[i].lab.b;
        }
        double moved = 0;
        for (std::size_t c = 0; c < k; ++c) {
            LabColor next = centroids[c];
            if (wsum[c] > 0) {
                next = {sl[c] / wsum[c], sa[c] / wsum[c], sb[c] / wsum[c]};
            } else {
                std::size_t far = 0;
                double far_d = -1;
                for (std::size_t i = 0; i < points.size(); ++i) {
                    const double d = dist2(points[i].lab, centroids[assign[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                if (far_d > 0) {
                    next = points[far].lab;
                    ++result.reseeds;
                }
            }
            moved = std::max(moved, std::sqrt(dist2(next, centroids[c])));
            centroids[c] = next;
        }
        if (moved < params.tolerance) break;
    }
    assign_all();

    // Report centroids consistent with the final assignment.
    result.clusters.assign(k, {});
    std::vector<double> wsum(k, 0), sl(k, 0), sa(k, 0), sb(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto c = assign[i];
        const double w = points[i].weight;
        wsum[c] += w;
        sl[c] += w * points[i].lab.L;
        sa[c] += w * points[i].lab.a;
        sb[c] += w * points[i].lab.b;
    }
    for (std::size_t c = 0; c < k; ++c) {
        result.clusters[c].centroid = wsum[c] > 0 ? LabColor{sl[c] / wsum[c], sa[c] / wsum[c], sb[c] / wsum[c]} : centroids[c];
        result.clusters[c].count = static_cast<std::size_t>(std::llround(wsum[c]));
    }
    return result;
}

}  // namespace skintone
