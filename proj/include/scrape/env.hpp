#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "scrape/arm.hpp"
#include "scrape/controller.hpp"
#include "scrape/material.hpp"

namespace scrape {

// Fixed 25-value observation layout:
//   [0..2]   tip position (x, y, z), y always 0
//   [3..5]   tip orientation (roll, pitch, yaw), roll/yaw always 0
//   [6]      speed = |task velocity| (scalar)
//   [7..12]  wrench (F_x, F_y, F_z, T_x, T_y, T_z), out-of-plane entries 0
//   [13..24] 3 clusters x (c_x, c_y, c_z, residue_pct)
struct Observation {
    std::array<double, 25> v{};
};

inline constexpr int kObsDim = 25;
inline constexpr int kActionDim = 3;

struct Action {
    double f_x_cmd = 0.0;     // [0, 10] N
    double tau_y_cmd = 0.0;   // [-2, 2] N*m
    double z_desired = 0.0;   // [bottom_z, rim_z] m
};

struct RewardBreakdown {
    double r_m = 0.0;        // efficiency term
    double r_e = 0.0;        // milestone bonus
    double r_c = 0.0;        // contact penalty, pre-weight
    double lambda_c = 0.01;
    double total = 0.0;      // r_m + r_e - lambda_c * r_c
};

struct WallParams {
    double stiffness = 5000.0;      // N/m
    double damping = 50.0;          // N*s/m
    double mu = 0.3;                // Coulomb friction on the tip
    double friction_vel_eps = 0.01; // m/s, tanh regularization of the sign
    double rim_clearance = 0.002;   // m, shaft must stay this far off the wall at the rim
    double shaft_length = 0.15;     // m of tool shaft behind the tip
};

struct EnvConfig {
    ArmModel arm;
    ImpedanceParams impedance;
    VialGeometry geometry;
    WallParams wall;

    int horizon = 300;          // policy steps
    int policy_hz = 10;
    int control_hz = 500;
    int physics_hz = 1000;

    int particle_count = 300;
    double f_min = 1.0, f_max = 8.0;
    double capture_radius = 0.004;  // m

    double milestone_50_bonus = 5.0;
    double milestone_90_bonus = 10.0;
    double lambda_c = 0.01;
    double reward_eps = 0.1;          // N, guards the R_M denominator
    bool wrench_norm_force_only = false;

    double friction_min = 0.02, friction_max = 0.15;  // N*m*s/rad per joint
    uint64_t friction_seed = 3;
    uint64_t cluster_seed = 4;

    // action bounds
    double f_x_max = 10.0;
    double tau_y_max = 2.0;
};

struct ContactForces {
    double normal_force = 0.0;          // wall reaction on the tip, N
    double shaft_contact_force = 0.0;   // rim penalty force, N (feeds R_C)
    TaskVec tip_wrench = TaskVec::Zero();  // (f_x, f_z, tau_pitch) applied to the tip
};

// Penalty wall contact: penetration spring-damper normal force, regularized
// Coulomb friction tangentially, and a rim penalty if the shaft segment
// crosses into the wall clearance band at rim height.
ContactForces wall_contact(const TaskState& tip, const VialGeometry& geometry,
                           const WallParams& wall);

Action map_action(const std::array<double, 3>& raw, const EnvConfig& cfg);
Action clamp_action(const Action& a, const EnvConfig& cfg);

RewardBreakdown compute_reward(double delta_m,
                               const Eigen::Matrix<double, 6, 1>& wrench_mean,
                               double milestone_bonus_sum,
                               double shaft_contact_force_sum,
                               const EnvConfig& cfg);

Observation assemble_observation(const TaskState& tip,
                                 const Eigen::Matrix<double, 6, 1>& wrench,
                                 const ClusterSummary& clusters);

// One CSV row per policy step.
struct LogRow {
    int step = 0;
    double f_x_cmd = 0, tau_y_cmd = 0, z_desired = 0;
    double F_x = 0, F_z = 0, T_y = 0;
    double delta_m = 0, r_m = 0, r_e = 0, r_c = 0, total = 0;
    double removed_fraction = 0;
};

class ScrapeEnv {
  public:
    explicit ScrapeEnv(const EnvConfig& cfg);

    Observation reset(uint64_t profile_seed);

    struct StepOut {
        Observation obs;
        RewardBreakdown reward;
        bool terminated = false;
        bool truncated = false;
        bool dynamics_failure = false;
    };
    StepOut step(const Action& action);

    const MaterialProfile& profile() const { return profile_; }
    const EnvConfig& config() const { return cfg_; }
    const std::vector<LogRow>& log() const { return log_; }
    const JointState& joint_state() const { return joints_; }
    bool active() const { return active_; }
    int steps_done() const { return steps_done_; }
    double episode_return() const { return episode_return_; }

    static const char* kLogHeader;

  private:
    Observation observe();

    EnvConfig cfg_;
    ArmModel arm_;              // per-episode friction-randomized copy
    MaterialProfile profile_;
    JointState joints_;
    WrenchEstimate wrench_estimate_;
    double x_hold_ = 0.0, pitch_hold_ = 0.0;
    bool milestone_50_done_ = false, milestone_90_done_ = false;
    bool active_ = false;
    int steps_done_ = 0;
    double episode_return_ = 0.0;
    std::vector<LogRow> log_;
};

}  // namespace scrape
