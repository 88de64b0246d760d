#pragma once
#include <Eigen/Dense>

#include "scrape/arm.hpp"

namespace scrape {

// Fixed gains of the low-level Cartesian impedance controller. Diagonal
// stiffness/damping over (x, z, pitch) plus a joint-space posture objective
// projected into the nullspace.
struct ImpedanceParams {
    TaskVec stiffness{0.0, 500.0, 20.0};       // N/m, N/m, N*m/rad; x axis is force-controlled
    TaskVec damping{40.0, 45.0, 4.0};          // N*s/m, N*s/m, N*m*s/rad
    double nullspace_stiffness = 5.0;          // N*m/rad
    double nullspace_damping = 1.0;            // N*m*s/rad
    JointVec nullspace_posture = JointVec::Zero();
};

// 10 Hz policy command held zero-order by the 500 Hz control loop.
struct WrenchCommand {
    double f_x = 0.0;         // feedforward normal force, N
    double f_z = 0.0;         // always 0 in this artifact
    double tau_pitch = 0.0;   // feedforward scraping torque, N*m
    double z_setpoint = 0.0;  // desired vertical position, m
};

Eigen::Vector4d impedance_torque(const ImpedanceParams& params, const ArmModel& model,
                                 const JointState& state, const TaskVec& x_desired);

struct NullspaceResult {
    JointVec tau = JointVec::Zero();
    bool singular = false;
};

// N^T tau_posture with the dynamically consistent projector
// N^T = I - J^T Jbar^T, Jbar = M^-1 J^T (J M^-1 J^T)^-1.
NullspaceResult nullspace_torque(const ImpedanceParams& params, const ArmModel& model,
                                 const JointState& state);

JointVec wrench_torque(const ArmModel& model, const JointState& state,
                       double f_x, double f_z, double tau_pitch);

struct ComposeResult {
    JointVec tau = JointVec::Zero();
    bool singular = false;
};

// tau_c = tau_ca + tau_ns + tau_ext + gravity compensation. The impedance
// setpoint is (x_hold, cmd.z_setpoint, pitch_hold); the x spring is disabled
// while f_x is commanded (force-controlled axis).
ComposeResult compose(const ImpedanceParams& params, const ArmModel& model,
                      const JointState& state, const WrenchCommand& cmd,
                      double x_hold, double pitch_hold);

struct WrenchEstimate {
    Eigen::Matrix<double, 6, 1> wrench = Eigen::Matrix<double, 6, 1>::Zero();
    bool singular = false;
};

// Least-squares recovery of the planar tip wrench from external joint
// torques, embedded as (F_x, 0, F_z, 0, T_y, 0). On a singular J the last
// valid estimate is returned with the flag raised.
WrenchEstimate estimate_external_wrench(const ArmModel& model, const JointState& state,
                                        const JointVec& tau_measured_ext,
                                        const WrenchEstimate& last_valid = {});

}  // namespace scrape
