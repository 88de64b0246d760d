#include "scrape/material.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "scrape/kmeans.hpp"
#include "scrape/rng.hpp"

namespace scrape {

namespace {
constexpr double kMinSpacing = 1e-5;   // m, jitter-grid cell floor
constexpr char kProfileMagic[] = "scrape-profile v1";
}

MaterialProfile generate_profile(uint64_t noise_seed, uint64_t spatial_seed,
                                 int count, double f_min, double f_max,
                                 const VialGeometry& geometry) {
    if (count < 200 || count > 500)
        throw std::invalid_argument("generate_profile: count must be in [200, 500]");
    if (!(f_min < f_max) || f_min <= 0.0)
        throw std::invalid_argument("generate_profile: need 0 < f_min < f_max");
    if (!geometry.valid())
        throw std::invalid_argument("generate_profile: bad vial geometry");

    double span = geometry.window_z_max - geometry.window_z_min;
    double cell = span / count;
    if (cell < kMinSpacing)
        throw std::invalid_argument("generate_profile: window too small for count");

    MaterialProfile profile;
    profile.noise = PerlinField::make(noise_seed);
    profile.spatial_seed = spatial_seed;
    profile.f_min = f_min;
    profile.f_max = f_max;
    profile.initial_count = count;
    profile.particles.reserve(count);

    SplitMix64 rng(spatial_seed);
    for (int i = 0; i < count; ++i) {
        Particle p;
        p.x = geometry.wall_x;
        p.z = geometry.window_z_min + (i + rng.uniform01()) * cell;
        // Noise coordinate: window-normalized z along a fixed off-lattice line.
        double u = (p.z - geometry.window_z_min) / span;
        p.threshold = sample_threshold(profile.noise, u, 0.37, f_min, f_max);
        p.mass = 1.0 / count;
        p.attached = true;
        profile.particles.push_back(p);
    }
    return profile;
}

DislodgeResult dislodge_step(MaterialProfile& profile, const Eigen::Vector2d& tip_pos,
                             double contact_normal_force, double capture_radius) {
    if (contact_normal_force < 0.0)
        throw std::invalid_argument("dislodge_step: negative normal force");
    DislodgeResult out;
    const double r2 = capture_radius * capture_radius;
    for (int i = 0; i < static_cast<int>(profile.particles.size()); ++i) {
        Particle& p = profile.particles[i];
        if (!p.attached) continue;
        double dx = p.x - tip_pos.x();
        double dz = p.z - tip_pos.y();
        if (dx * dx + dz * dz > r2) continue;
        if (p.threshold <= contact_normal_force) {
            p.attached = false;
            out.removed_mass += p.mass;
            out.removed_ids.push_back(i);
        }
    }
    return out;
}

double removed_fraction(const MaterialProfile& profile) {
    double total = 0.0, removed = 0.0;
    for (const Particle& p : profile.particles) {
        total += p.mass;
        if (!p.attached) removed += p.mass;
    }
    return total > 0.0 ? removed / total : 0.0;
}

ClusterSummary summarize_clusters(const MaterialProfile& profile, uint64_t seed) {
    ClusterSummary out;
    std::vector<Eigen::VectorXd> points;
    for (const Particle& p : profile.particles)
        if (p.attached) points.push_back(Eigen::Vector2d{p.x, p.z});

    const double denom = profile.initial_count > 0 ? profile.initial_count : 1;
    if (points.size() < 3) {
        // Degenerate: put everything in cluster 0, pad the rest.
        Eigen::Vector3d last = Eigen::Vector3d::Zero();
        if (!points.empty()) {
            Eigen::Vector2d mean = Eigen::Vector2d::Zero();
            for (const auto& p : points) mean += Eigen::Vector2d(p);
            mean /= static_cast<double>(points.size());
            last = Eigen::Vector3d{mean.x(), 0.0, mean.y()};
            out.clusters[0].centroid = last;
            out.clusters[0].residue_pct = 100.0 * points.size() / denom;
        }
        for (int c = points.empty() ? 0 : 1; c < 3; ++c) {
            out.clusters[c].centroid = last;
            out.clusters[c].residue_pct = 0.0;
        }
        return out;
    }

    KmeansResult km = kmeans(points, 3, seed);
    std::vector<int> counts(3, 0);
    for (int a : km.assignments) ++counts[a];
    Eigen::Vector3d last = Eigen::Vector3d::Zero();
    for (int c = 0; c < 3; ++c) {
        if (counts[c] > 0) {
            last = Eigen::Vector3d{km.centroids[c][0], 0.0, km.centroids[c][1]};
            out.clusters[c].centroid = last;
            out.clusters[c].residue_pct = 100.0 * counts[c] / denom;
        } else {
            out.clusters[c].centroid = last;
            out.clusters[c].residue_pct = 0.0;
        }
    }
    return out;
}

void save_profile(const MaterialProfile& profile, std::ostream& os) {
    os << kProfileMagic << "\n";
    os << profile.particles.size() << " " << profile.initial_count << " "
       << profile.f_min << " " << profile.f_max << " " << profile.spatial_seed
       << " " << profile.noise.seed << "\n";
    os.precision(17);
    for (const Particle& p : profile.particles)
        os << p.x << " " << p.z << " " << p.threshold << " " << (p.attached ? 1 : 0)
           << "\n";
}

MaterialProfile load_profile(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kProfileMagic)
        throw std::runtime_error("load_profile: bad magic/version line");
    MaterialProfile profile;
    size_t n = 0;
    uint64_t noise_seed = 0;
    is >> n >> profile.initial_count >> profile.f_min >> profile.f_max >>
        profile.spatial_seed >> noise_seed;
    if (!is) throw std::runtime_error("load_profile: bad header");
    profile.noise = PerlinField::make(noise_seed);
    profile.particles.resize(n);
    for (size_t i = 0; i < n; ++i) {
        Particle& p = profile.particles[i];
        int attached = 0;
        is >> p.x >> p.z >> p.threshold >> attached;
        if (!is) throw std::runtime_error("load_profile: truncated particle list");
        p.attached = attached != 0;
        p.mass = 1.0 / static_cast<double>(n);
    }
    return profile;
}

}  // namespace scrape
