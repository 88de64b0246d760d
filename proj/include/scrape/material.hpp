#pragma once
#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "scrape/noise.hpp"

namespace scrape {

struct VialGeometry {
    double wall_x = 0.55;          // interior face the tool presses against, m
    double window_z_min = 0.09;    // target-window bottom, m
    double window_z_max = 0.15;    // target-window top, m
    double bottom_z = 0.05;        // vial floor, m
    double rim_z = 0.25;           // vial mouth, m

    bool valid() const {
        return bottom_z < window_z_min && window_z_min < window_z_max &&
               window_z_max < rim_z;
    }
};

struct Particle {
    double x = 0.0;          // wall plane position, equals geometry.wall_x
    double z = 0.0;          // within the target window, m
    double threshold = 0.0;  // dislodgement force, N
    double mass = 0.0;       // uniform, total normalized to 1.0
    bool attached = true;
};

struct MaterialProfile {
    std::vector<Particle> particles;
    PerlinField noise;
    uint64_t spatial_seed = 0;
    double f_min = 1.0, f_max = 8.0;
    int initial_count = 0;
};

struct ClusterSummary {
    struct Entry {
        Eigen::Vector3d centroid = Eigen::Vector3d::Zero();  // world (x, y, z)
        double residue_pct = 0.0;     // % of initial particle count
    };
    std::array<Entry, 3> clusters;
};

// Seeded jitter-grid positions over the window, Perlin-sampled thresholds,
// all particles attached, total mass 1.0.
MaterialProfile generate_profile(uint64_t noise_seed, uint64_t spatial_seed,
                                 int count, double f_min, double f_max,
                                 const VialGeometry& geometry);

struct DislodgeResult {
    double removed_mass = 0.0;      // Delta m of the reward's efficiency term
    std::vector<int> removed_ids;
};

// Detaches every attached particle within capture_radius of the tip whose
// threshold does not exceed the contact normal force.
DislodgeResult dislodge_step(MaterialProfile& profile, const Eigen::Vector2d& tip_pos,
                             double contact_normal_force, double capture_radius);

double removed_fraction(const MaterialProfile& profile);

// k = 3 clusters over attached-particle positions lifted to world 3-D with
// y = 0; empty slots repeat the last valid centroid with 0% residue.
ClusterSummary summarize_clusters(const MaterialProfile& profile, uint64_t seed);

// Versioned text format, one particle per line: x z threshold attached.
void save_profile(const MaterialProfile& profile, std::ostream& os);
MaterialProfile load_profile(std::istream& is);

}  // namespace scrape
