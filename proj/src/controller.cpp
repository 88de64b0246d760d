#include "scrape/controller.hpp"

namespace scrape {

Eigen::Vector4d impedance_torque(const ImpedanceParams& params, const ArmModel& model,
                                 const JointState& state, const TaskVec& x_desired) {
    TaskState task = forward_kinematics(model, state);
    TaskVec x{task.pos.x(), task.pos.y(), task.pitch};
    TaskVec force = params.stiffness.cwiseProduct(x_desired - x) -
                    params.damping.cwiseProduct(task.vel);
    return jacobian(model, state).transpose() * force;
}

NullspaceResult nullspace_torque(const ImpedanceParams& params, const ArmModel& model,
                                 const JointState& state) {
    NullspaceResult out;
    Jacobian J = jacobian(model, state);
    Eigen::JacobiSVD<Jacobian> svd(J);
    if (svd.singularValues().minCoeff() < 1e-6) {
        out.singular = true;
        return out;
    }
    Eigen::Matrix4d Minv = mass_matrix(model, state).inverse();
    Eigen::Matrix3d JMJt = J * Minv * J.transpose();
    Eigen::Matrix<double, 4, 3> Jbar = Minv * J.transpose() * JMJt.inverse();
    Eigen::Matrix4d Nt = Eigen::Matrix4d::Identity() - J.transpose() * Jbar.transpose();

    JointVec tau_posture = params.nullspace_stiffness * (params.nullspace_posture - state.q) -
                           params.nullspace_damping * state.qdot;
    out.tau = Nt * tau_posture;
    return out;
}

JointVec wrench_torque(const ArmModel& model, const JointState& state,
                       double f_x, double f_z, double tau_pitch) {
    return jacobian(model, state).transpose() * TaskVec{f_x, f_z, tau_pitch};
}

ComposeResult compose(const ImpedanceParams& params, const ArmModel& model,
                      const JointState& state, const WrenchCommand& cmd,
                      double x_hold, double pitch_hold) {
    ImpedanceParams p = params;
    if (cmd.f_x != 0.0) p.stiffness[0] = 0.0;   // force-controlled axis

    TaskVec x_desired{x_hold, cmd.z_setpoint, pitch_hold};
    JointVec tau_ca = impedance_torque(p, model, state, x_desired);
    NullspaceResult ns = nullspace_torque(p, model, state);
    JointVec tau_ext = wrench_torque(model, state, cmd.f_x, cmd.f_z, cmd.tau_pitch);

    ComposeResult out;
    out.singular = ns.singular;
    out.tau = tau_ca + ns.tau + tau_ext - gravity_torque(model, state);
    return out;
}

WrenchEstimate estimate_external_wrench(const ArmModel& model, const JointState& state,
                                        const JointVec& tau_measured_ext,
                                        const WrenchEstimate& last_valid) {
    Jacobian J = jacobian(model, state);
    Eigen::JacobiSVD<Jacobian> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    WrenchEstimate out;
    if (svd.singularValues().minCoeff() < 1e-6) {
        out = last_valid;
        out.singular = true;
        return out;
    }
    // (J^T)^+ tau = (J J^T)^-1 J tau for full row rank J
    TaskVec w = (J * J.transpose()).ldlt().solve(J * tau_measured_ext);
    out.wrench[0] = w[0];   // F_x
    out.wrench[2] = w[1];   // F_z
    out.wrench[4] = w[2];   // T_y
    return out;
}

}  // namespace scrape
