#include <doctest.h>

#include <algorithm>
#include <vector>

#include "scrape/kmeans.hpp"
#include "scrape/rng.hpp"

using namespace scrape;

namespace {

std::vector<Eigen::VectorXd> points2(std::initializer_list<std::pair<double, double>> ps) {
    std::vector<Eigen::VectorXd> out;
    for (auto [x, y] : ps) out.push_back(Eigen::Vector2d{x, y});
    return out;
}

double objective(const std::vector<Eigen::VectorXd>& pts,
                 const std::vector<Eigen::VectorXd>& centroids,
                 const std::vector<int>& assign) {
    double o = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        o += (pts[i] - centroids[assign[i]]).squaredNorm();
    return o;
}

}  // namespace

TEST_CASE("k equal to point count gives objective zero") {
    auto pts = points2({{0, 0}, {1, 0}, {0, 1}, {5, 5}});
    KmeansResult r = kmeans(pts, 4, 7);
    CHECK(r.objective == doctest::Approx(0.0));
    std::vector<int> seen = r.assignments;
    std::sort(seen.begin(), seen.end());
    for (int i = 0; i < 4; ++i) CHECK(seen[i] == i);
}

TEST_CASE("rejects fewer points than clusters") {
    auto pts = points2({{0, 0}, {1, 1}});
    CHECK_THROWS(kmeans(pts, 3, 1));
}

TEST_CASE("two far-apart triples: centroids equal the triple means") {
    auto pts = points2({{0.0, 0.0}, {0.1, 0.0}, {0.0, 0.1},
                        {10.0, 10.0}, {10.1, 10.0}, {10.0, 10.1}});
    // brute force over all 2-partitions (assignments in {0,1}^6, both used)
    double best = 1e300;
    for (int mask = 1; mask < 63; ++mask) {
        Eigen::Vector2d m0 = Eigen::Vector2d::Zero(), m1 = Eigen::Vector2d::Zero();
        int n0 = 0, n1 = 0;
        for (int i = 0; i < 6; ++i) {
            if (mask & (1 << i)) { m1 += Eigen::Vector2d(pts[i]); ++n1; }
            else { m0 += Eigen::Vector2d(pts[i]); ++n0; }
        }
        m0 /= n0; m1 /= n1;
        double o = 0.0;
        for (int i = 0; i < 6; ++i) {
            Eigen::Vector2d p(pts[i]);
            o += (mask & (1 << i)) ? (p - m1).squaredNorm() : (p - m0).squaredNorm();
        }
        best = std::min(best, o);
    }
    KmeansResult r = kmeans(pts, 2, 3);
    CHECK(r.objective == doctest::Approx(best).epsilon(1e-12));

    Eigen::Vector2d blob_a{0.1 / 3, 0.1 / 3};
    Eigen::Vector2d blob_b{10 + 0.1 / 3, 10 + 0.1 / 3};
    double da = std::min((Eigen::Vector2d(r.centroids[0]) - blob_a).norm(),
                         (Eigen::Vector2d(r.centroids[0]) - blob_b).norm());
    double db = std::min((Eigen::Vector2d(r.centroids[1]) - blob_a).norm(),
                         (Eigen::Vector2d(r.centroids[1]) - blob_b).norm());
    CHECK(da < 1e-12);
    CHECK(db < 1e-12);
}

TEST_CASE("objective is non-increasing across iterations and seed-deterministic") {
    SplitMix64 rng(99);
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 200; ++i)
        pts.push_back(Eigen::Vector2d{rng.uniform(0, 1), rng.uniform(0, 1)});

    // Lloyd monotonicity: run with increasing max_iter, objective must not rise.
    double prev = 1e300;
    for (int it = 1; it <= 12; ++it) {
        KmeansResult r = kmeans(pts, 5, 42, it);
        CHECK(r.objective <= prev + 1e-12);
        prev = r.objective;
    }

    KmeansResult a = kmeans(pts, 5, 42);
    KmeansResult b = kmeans(pts, 5, 42);
    CHECK(a.assignments == b.assignments);
    for (int c = 0; c < 5; ++c) CHECK(a.centroids[c] == b.centroids[c]);
    CHECK(objective(pts, a.centroids, a.assignments) == doctest::Approx(a.objective));
}
