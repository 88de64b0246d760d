#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace scrape {

struct KmeansResult {
    std::vector<Eigen::VectorXd> centroids;
    std::vector<int> assignments;   // nearest centroid, ties to the lowest index
    double objective = 0.0;         // sum of squared distances
    int iterations = 0;
};

// Seeded k-means++ initialization followed by Lloyd iterations. Stops when
// assignments stabilize or after max_iter. Rejects |points| < k.
KmeansResult kmeans(const std::vector<Eigen::VectorXd>& points, int k,
                    uint64_t seed, int max_iter = 100);

}  // namespace scrape
