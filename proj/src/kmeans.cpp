#include "scrape/kmeans.hpp"

#include <limits>
#include <stdexcept>

#include "scrape/rng.hpp"

namespace scrape {

KmeansResult kmeans(const std::vector<Eigen::VectorXd>& points, int k,
                    uint64_t seed, int max_iter) {
    const int n = static_cast<int>(points.size());
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (n < k) throw std::invalid_argument("kmeans: fewer points than clusters");

    KmeansResult out;
    SplitMix64 rng(seed);

    // k-means++ seeding
    out.centroids.push_back(points[rng.below(n)]);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(out.centroids.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = (points[i] - out.centroids.back()).squaredNorm();
            if (d < d2[i]) d2[i] = d;
            total += d2[i];
        }
        if (total <= 0.0) {
            // all remaining mass on existing centroids; duplicate a point
            out.centroids.push_back(points[rng.below(n)]);
            continue;
        }
        double r = rng.uniform01() * total;
        double acc = 0.0;
        int pick = n - 1;
        for (int i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= r) { pick = i; break; }
        }
        out.centroids.push_back(points[pick]);
    }

    out.assignments.assign(n, -1);
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (points[i] - out.centroids[0]).squaredNorm();
            for (int c = 1; c < k; ++c) {
                double d = (points[i] - out.centroids[c]).squaredNorm();
                if (d < best_d) { best_d = d; best = c; }
            }
            if (best != out.assignments[i]) { out.assignments[i] = best; changed = true; }
        }
        out.iterations = it + 1;
        if (!changed) break;

        std::vector<Eigen::VectorXd> sums(k, Eigen::VectorXd::Zero(points[0].size()));
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            sums[out.assignments[i]] += points[i];
            ++counts[out.assignments[i]];
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) out.centroids[c] = sums[c] / counts[c];
    }

    out.objective = 0.0;
    for (int i = 0; i < n; ++i)
        out.objective += (points[i] - out.centroids[out.assignments[i]]).squaredNorm();
    return out;
}

}  // namespace scrape
