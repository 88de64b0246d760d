#include "scrape/env.hpp"

#include <cmath>
#include <stdexcept>

#include "scrape/rng.hpp"

namespace scrape {

const char* ScrapeEnv::kLogHeader =
    "step,f_x_cmd,tau_y_cmd,z_desired,F_x,F_z,T_y,delta_m,r_m,r_e,r_c,total,"
    "removed_fraction";

ContactForces wall_contact(const TaskState& tip, const VialGeometry& geometry,
                           const WallParams& wall) {
    ContactForces out;
    double delta = tip.pos.x() - geometry.wall_x;
    if (delta > 0.0) {
        double f = wall.stiffness * delta + wall.damping * tip.vel[0];
        out.normal_force = f > 0.0 ? f : 0.0;
    }
    // Reaction on the tip: -x normal, tangential Coulomb opposing z motion.
    double f_tan = -wall.mu * out.normal_force *
                   std::tanh(tip.vel[1] / wall.friction_vel_eps);
    out.tip_wrench[0] = -out.normal_force;
    out.tip_wrench[1] = f_tan;

    // Shaft runs from the tip back along the tool axis; check where it
    // crosses rim height.
    Eigen::Vector2d shaft_dir{-std::cos(tip.pitch), -std::sin(tip.pitch)};
    if (shaft_dir.y() > 1e-9) {
        double s = (geometry.rim_z - tip.pos.y()) / shaft_dir.y();
        if (s > 0.0 && s <= wall.shaft_length) {
            Eigen::Vector2d p = tip.pos + s * shaft_dir;
            double pen = p.x() - (geometry.wall_x - wall.rim_clearance);
            if (pen > 0.0) {
                out.shaft_contact_force = wall.stiffness * pen;
                // Force on the shaft point in -x, moment about the tip.
                Eigen::Vector2d r = p - tip.pos;
                out.tip_wrench[0] += -out.shaft_contact_force;
                out.tip_wrench[2] += -r.y() * -out.shaft_contact_force;
            }
        }
    }
    return out;
}

Action map_action(const std::array<double, 3>& raw, const EnvConfig& cfg) {
    auto unit = [](double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); };
    Action a;
    a.f_x_cmd = 0.5 * (unit(raw[0]) + 1.0) * cfg.f_x_max;
    a.tau_y_cmd = unit(raw[1]) * cfg.tau_y_max;
    a.z_desired = cfg.geometry.bottom_z +
                  0.5 * (unit(raw[2]) + 1.0) * (cfg.geometry.rim_z - cfg.geometry.bottom_z);
    return a;
}

Action clamp_action(const Action& a, const EnvConfig& cfg) {
    auto clamp = [](double x, double lo, double hi) {
        return x < lo ? lo : (x > hi ? hi : x);
    };
    Action c;
    c.f_x_cmd = clamp(a.f_x_cmd, 0.0, cfg.f_x_max);
    c.tau_y_cmd = clamp(a.tau_y_cmd, -cfg.tau_y_max, cfg.tau_y_max);
    c.z_desired = clamp(a.z_desired, cfg.geometry.bottom_z, cfg.geometry.rim_z);
    return c;
}

RewardBreakdown compute_reward(double delta_m,
                               const Eigen::Matrix<double, 6, 1>& wrench_mean,
                               double milestone_bonus_sum,
                               double shaft_contact_force_sum,
                               const EnvConfig& cfg) {
    if (delta_m < 0.0) throw std::invalid_argument("compute_reward: delta_m < 0");
    RewardBreakdown r;
    double mag;
    if (cfg.wrench_norm_force_only) {
        mag = std::sqrt(wrench_mean[0] * wrench_mean[0] +
                        wrench_mean[1] * wrench_mean[1] +
                        wrench_mean[2] * wrench_mean[2]);
    } else {
        mag = wrench_mean.norm();
    }
    r.r_m = delta_m / (mag + cfg.reward_eps);
    r.r_e = milestone_bonus_sum;
    r.r_c = shaft_contact_force_sum;
    r.lambda_c = cfg.lambda_c;
    r.total = r.r_m + r.r_e - r.lambda_c * r.r_c;
    return r;
}

Observation assemble_observation(const TaskState& tip,
                                 const Eigen::Matrix<double, 6, 1>& wrench,
                                 const ClusterSummary& clusters) {
    Observation o;
    o.v[0] = tip.pos.x();
    o.v[1] = 0.0;
    o.v[2] = tip.pos.y();
    o.v[3] = 0.0;
    o.v[4] = tip.pitch;
    o.v[5] = 0.0;
    o.v[6] = tip.vel.head<2>().norm();
    for (int i = 0; i < 6; ++i) o.v[7 + i] = wrench[i];
    for (int c = 0; c < 3; ++c) {
        o.v[13 + 4 * c + 0] = clusters.clusters[c].centroid.x();
        o.v[13 + 4 * c + 1] = clusters.clusters[c].centroid.y();
        o.v[13 + 4 * c + 2] = clusters.clusters[c].centroid.z();
        o.v[13 + 4 * c + 3] = clusters.clusters[c].residue_pct;
    }
    return o;
}

namespace {

// Damped least-squares IK to put the tip at the window top, in wall contact,
// tool tilted away from the rim.
JointState initial_configuration(const ArmModel& model, const VialGeometry& geom) {
    TaskVec target{geom.wall_x, geom.window_z_max, -1.32};
    JointState s;
    s.q = JointVec{1.1, -0.6, -0.9, -0.92};
    for (int it = 0; it < 300; ++it) {
        TaskState t = forward_kinematics(model, s);
        TaskVec err = target - TaskVec{t.pos.x(), t.pos.y(), t.pitch};
        if (err.norm() < 1e-12) break;
        Jacobian J = jacobian(model, s);
        Eigen::Matrix3d JJt = J * J.transpose() + 1e-8 * Eigen::Matrix3d::Identity();
        s.q += J.transpose() * JJt.ldlt().solve(err);
    }
    s.qdot.setZero();
    return s;
}

uint64_t mix_seeds(uint64_t a, uint64_t b) {
    SplitMix64 r(a ^ (b * 0x9e3779b97f4a7c15ull));
    return r.next();
}

}  // namespace

ScrapeEnv::ScrapeEnv(const EnvConfig& cfg) : cfg_(cfg), arm_(cfg.arm) {
    if (cfg_.physics_hz % cfg_.control_hz != 0 || cfg_.control_hz % cfg_.policy_hz != 0)
        throw std::invalid_argument("ScrapeEnv: cadence ratios must be integral");
}

Observation ScrapeEnv::reset(uint64_t profile_seed) {
    profile_ = generate_profile(mix_seeds(profile_seed, 0xA11CE),
                                mix_seeds(profile_seed, 0xB0B),
                                cfg_.particle_count, cfg_.f_min, cfg_.f_max,
                                cfg_.geometry);
    arm_ = cfg_.arm;
    SplitMix64 frng(mix_seeds(cfg_.friction_seed, profile_seed));
    for (int i = 0; i < kNumJoints; ++i)
        arm_.joint_viscous_friction[i] = frng.uniform(cfg_.friction_min, cfg_.friction_max);

    joints_ = initial_configuration(arm_, cfg_.geometry);
    TaskState tip = forward_kinematics(arm_, joints_);
    x_hold_ = cfg_.geometry.wall_x;
    pitch_hold_ = tip.pitch;
    cfg_.impedance.nullspace_posture = joints_.q;

    wrench_estimate_ = WrenchEstimate{};
    milestone_50_done_ = milestone_90_done_ = false;
    active_ = true;
    steps_done_ = 0;
    episode_return_ = 0.0;
    log_.clear();

    // Settle briefly under a zero-wrench hold before handing over to the policy.
    WrenchCommand hold;
    hold.z_setpoint = cfg_.geometry.window_z_max;
    double dt = 1.0 / cfg_.physics_hz;
    int physics_per_control = cfg_.physics_hz / cfg_.control_hz;
    int settle_ticks = cfg_.control_hz / 2;
    for (int ct = 0; ct < settle_ticks; ++ct) {
        ComposeResult tau = compose(cfg_.impedance, arm_, joints_, hold, x_hold_, pitch_hold_);
        for (int pt = 0; pt < physics_per_control; ++pt) {
            TaskState t = forward_kinematics(arm_, joints_);
            ContactForces contact = wall_contact(t, cfg_.geometry, cfg_.wall);
            StepResult sr = scrape::step(arm_, joints_, tau.tau, contact.tip_wrench, dt);
            if (!sr.ok) { active_ = false; break; }
            joints_ = sr.state;
        }
        if (!active_) break;
    }
    {
        TaskState t = forward_kinematics(arm_, joints_);
        ContactForces contact = wall_contact(t, cfg_.geometry, cfg_.wall);
        JointVec tau_ext = jacobian(arm_, joints_).transpose() * contact.tip_wrench;
        wrench_estimate_ = estimate_external_wrench(arm_, joints_, tau_ext, wrench_estimate_);
    }
    return observe();
}

Observation ScrapeEnv::observe() {
    TaskState tip = forward_kinematics(arm_, joints_);
    ClusterSummary clusters = summarize_clusters(profile_, cfg_.cluster_seed);
    return assemble_observation(tip, wrench_estimate_.wrench, clusters);
}

ScrapeEnv::StepOut ScrapeEnv::step(const Action& action) {
    if (!active_) throw std::logic_error("ScrapeEnv::step: episode not active");
    if (!std::isfinite(action.f_x_cmd) || !std::isfinite(action.tau_y_cmd) ||
        !std::isfinite(action.z_desired))
        throw std::invalid_argument("ScrapeEnv::step: non-finite action");

    Action a = clamp_action(action, cfg_);
    WrenchCommand cmd;
    cmd.f_x = a.f_x_cmd;
    cmd.tau_pitch = a.tau_y_cmd;
    cmd.z_setpoint = a.z_desired;

    const double dt = 1.0 / cfg_.physics_hz;
    const int control_ticks = cfg_.control_hz / cfg_.policy_hz;
    const int physics_per_control = cfg_.physics_hz / cfg_.control_hz;

    StepOut out;
    double delta_m = 0.0;
    double shaft_sum = 0.0;
    Eigen::Matrix<double, 6, 1> wrench_acc = Eigen::Matrix<double, 6, 1>::Zero();

    for (int ct = 0; ct < control_ticks && !out.dynamics_failure; ++ct) {
        ComposeResult tau = compose(cfg_.impedance, arm_, joints_, cmd, x_hold_, pitch_hold_);
        ContactForces contact;
        for (int pt = 0; pt < physics_per_control; ++pt) {
            TaskState t = forward_kinematics(arm_, joints_);
            contact = wall_contact(t, cfg_.geometry, cfg_.wall);
            delta_m += dislodge_step(profile_, t.pos, contact.normal_force,
                                     cfg_.capture_radius).removed_mass;
            StepResult sr = scrape::step(arm_, joints_, tau.tau, contact.tip_wrench, dt);
            if (!sr.ok) { out.dynamics_failure = true; break; }
            joints_ = sr.state;
        }
        shaft_sum += contact.shaft_contact_force;
        JointVec tau_ext = jacobian(arm_, joints_).transpose() * contact.tip_wrench;
        wrench_estimate_ = estimate_external_wrench(arm_, joints_, tau_ext, wrench_estimate_);
        wrench_acc += wrench_estimate_.wrench;
    }
    Eigen::Matrix<double, 6, 1> wrench_mean = wrench_acc / control_ticks;

    double frac = removed_fraction(profile_);
    double bonus = 0.0;
    if (!milestone_50_done_ && frac >= 0.5) {
        milestone_50_done_ = true;
        bonus += cfg_.milestone_50_bonus;
    }
    if (!milestone_90_done_ && frac >= 0.9) {
        milestone_90_done_ = true;
        bonus += cfg_.milestone_90_bonus;
    }

    out.reward = compute_reward(delta_m, wrench_mean, bonus, shaft_sum, cfg_);
    ++steps_done_;
    episode_return_ += out.reward.total;
    out.terminated = (frac >= 1.0) || out.dynamics_failure;
    out.truncated = !out.terminated && steps_done_ >= cfg_.horizon;
    if (out.terminated || out.truncated) active_ = false;
    out.obs = observe();

    LogRow row;
    row.step = steps_done_;
    row.f_x_cmd = a.f_x_cmd;
    row.tau_y_cmd = a.tau_y_cmd;
    row.z_desired = a.z_desired;
    row.F_x = wrench_mean[0];
    row.F_z = wrench_mean[2];
    row.T_y = wrench_mean[4];
    row.delta_m = delta_m;
    row.r_m = out.reward.r_m;
    row.r_e = out.reward.r_e;
    row.r_c = out.reward.r_c;
    row.total = out.reward.total;
    row.removed_fraction = frac;
    log_.push_back(row);
    return out;
}

}  // namespace scrape
