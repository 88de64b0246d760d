#pragma once
#include <Eigen/Dense>
#include <array>

namespace scrape {

inline constexpr int kNumJoints = 4;

using JointVec = Eigen::Vector4d;
using TaskVec = Eigen::Vector3d;                    // (x, z, pitch)
using Jacobian = Eigen::Matrix<double, 3, 4>;

// Planar 4-link revolute arm in the x-z plane, point masses at link tips.
struct ArmModel {
    std::array<double, 4> link_lengths{0.30, 0.30, 0.25, 0.15};   // m
    std::array<double, 4> link_masses{2.0, 2.0, 1.5, 1.0};        // kg
    double gravity = 9.81;                                        // m/s^2, along -z
    std::array<double, 4> joint_viscous_friction{0.05, 0.05, 0.05, 0.05};  // N*m*s/rad
};

struct JointState {
    JointVec q = JointVec::Zero();
    JointVec qdot = JointVec::Zero();
};

struct TaskState {
    Eigen::Vector2d pos = Eigen::Vector2d::Zero();   // tool tip (x, z)
    double pitch = 0.0;                              // sum of joint angles
    TaskVec vel = TaskVec::Zero();                   // (xdot, zdot, pitch rate)
};

TaskState forward_kinematics(const ArmModel& model, const JointState& state);

// Rows are d(x, z, pitch)/dq; the pitch row is all ones.
Jacobian jacobian(const ArmModel& model, const JointState& state);

// Translational Jacobian of link k's tip mass (2x4), k in [0, 3].
Eigen::Matrix<double, 2, 4> link_jacobian(const ArmModel& model,
                                          const JointState& state, int k);

// M(q) = sum_k m_k J_k^T J_k; symmetric positive definite.
Eigen::Matrix4d mass_matrix(const ArmModel& model, const JointState& state);

// dM/dq_m for m = 0..3, used for the Christoffel form of C(q, qdot).
std::array<Eigen::Matrix4d, 4> mass_matrix_partials(const ArmModel& model,
                                                    const JointState& state);

// C(q, qdot) qdot via Christoffel symbols of the first kind (no gravity).
JointVec bias_forces(const ArmModel& model, const JointState& state);

// Generalized torque gravity applies to the joints: -dU/dq, U = sum m_k g z_k.
JointVec gravity_torque(const ArmModel& model, const JointState& state);

struct StepResult {
    JointState state;
    bool ok = true;   // false on dynamics failure (ill-conditioned M)
};

// Semi-implicit Euler at dt (default 1 kHz tick); tip_wrench_ext enters as
// J^T (f_x, f_z, tau_pitch).
StepResult step(const ArmModel& model, const JointState& state,
                const JointVec& tau_command, const TaskVec& tip_wrench_ext,
                double dt);

}  // namespace scrape
