#include "scrape/arm.hpp"

#include <cmath>

namespace scrape {

namespace {

struct Trig {
    std::array<double, 4> c;   // cos of cumulative angles
    std::array<double, 4> s;   // sin of cumulative angles
};

Trig cumulative_trig(const JointState& state) {
    Trig t;
    double acc = 0.0;
    for (int i = 0; i < kNumJoints; ++i) {
        acc += state.q[i];
        t.c[i] = std::cos(acc);
        t.s[i] = std::sin(acc);
    }
    return t;
}

}  // namespace

TaskState forward_kinematics(const ArmModel& model, const JointState& state) {
    Trig t = cumulative_trig(state);
    TaskState out;
    double pitch = 0.0;
    for (int i = 0; i < kNumJoints; ++i) {
        out.pos.x() += model.link_lengths[i] * t.c[i];
        out.pos.y() += model.link_lengths[i] * t.s[i];
        pitch += state.q[i];
    }
    out.pitch = pitch;
    out.vel = jacobian(model, state) * state.qdot;
    return out;
}

Eigen::Matrix<double, 2, 4> link_jacobian(const ArmModel& model,
                                          const JointState& state, int k) {
    Trig t = cumulative_trig(state);
    Eigen::Matrix<double, 2, 4> J = Eigen::Matrix<double, 2, 4>::Zero();
    for (int i = 0; i <= k; ++i) {
        double sx = 0.0, sz = 0.0;
        for (int j = i; j <= k; ++j) {
            sx += model.link_lengths[j] * t.s[j];
            sz += model.link_lengths[j] * t.c[j];
        }
        J(0, i) = -sx;
        J(1, i) = sz;
    }
    return J;
}

Jacobian jacobian(const ArmModel& model, const JointState& state) {
    Jacobian J;
    J.topRows<2>() = link_jacobian(model, state, kNumJoints - 1);
    J.row(2).setOnes();
    return J;
}

Eigen::Matrix4d mass_matrix(const ArmModel& model, const JointState& state) {
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    for (int k = 0; k < kNumJoints; ++k) {
        Eigen::Matrix<double, 2, 4> Jk = link_jacobian(model, state, k);
        M.noalias() += model.link_masses[k] * Jk.transpose() * Jk;
    }
    return M;
}

std::array<Eigen::Matrix4d, 4> mass_matrix_partials(const ArmModel& model,
                                                    const JointState& state) {
    Trig t = cumulative_trig(state);
    // dJk/dq_m column i: derivative of the cumulative lever sums.
    auto dlink_jacobian = [&](int k, int m) {
        Eigen::Matrix<double, 2, 4> dJ = Eigen::Matrix<double, 2, 4>::Zero();
        if (m > k) return dJ;
        for (int i = 0; i <= k; ++i) {
            int j0 = std::max(i, m);
            double sx = 0.0, sz = 0.0;
            for (int j = j0; j <= k; ++j) {
                sx += model.link_lengths[j] * t.c[j];
                sz += model.link_lengths[j] * t.s[j];
            }
            dJ(0, i) = -sx;
            dJ(1, i) = -sz;
        }
        return dJ;
    };

    std::array<Eigen::Matrix4d, 4> dM;
    for (int m = 0; m < kNumJoints; ++m) {
        dM[m].setZero();
        for (int k = 0; k < kNumJoints; ++k) {
            Eigen::Matrix<double, 2, 4> Jk = link_jacobian(model, state, k);
            Eigen::Matrix<double, 2, 4> dJk = dlink_jacobian(k, m);
            Eigen::Matrix4d term = dJk.transpose() * Jk;
            dM[m].noalias() += model.link_masses[k] * (term + term.transpose());
        }
    }
    return dM;
}

JointVec bias_forces(const ArmModel& model, const JointState& state) {
    auto dM = mass_matrix_partials(model, state);
    Eigen::Matrix4d C = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int m = 0; m < 4; ++m)
                C(i, j) += 0.5 * (dM[m](i, j) + dM[j](i, m) - dM[i](j, m)) *
                           state.qdot[m];
    return C * state.qdot;
}

JointVec gravity_torque(const ArmModel& model, const JointState& state) {
    Trig t = cumulative_trig(state);
    // dU/dq_m = g * sum_{k >= ...} m_k * d z_k / dq_m, z_k = sum_{i<=k} l_i sin c_i
    JointVec dU = JointVec::Zero();
    for (int k = 0; k < kNumJoints; ++k) {
        for (int m = 0; m <= k; ++m) {
            double lever = 0.0;
            for (int j = m; j <= k; ++j) lever += model.link_lengths[j] * t.c[j];
            dU[m] += model.link_masses[k] * model.gravity * lever;
        }
    }
    return -dU;
}

StepResult step(const ArmModel& model, const JointState& state,
                const JointVec& tau_command, const TaskVec& tip_wrench_ext,
                double dt) {
    Eigen::Matrix4d M = mass_matrix(model, state);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(M);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    StepResult out;
    if (!(lo > 0.0) || hi / lo > 1e12) {
        out.state = state;
        out.ok = false;
        return out;
    }

    Jacobian J = jacobian(model, state);
    JointVec friction = JointVec::Zero();
    for (int i = 0; i < kNumJoints; ++i)
        friction[i] = model.joint_viscous_friction[i] * state.qdot[i];

    JointVec rhs = tau_command + J.transpose() * tip_wrench_ext +
                   gravity_torque(model, state) - bias_forces(model, state) -
                   friction;
    JointVec qddot = es.eigenvectors() *
                     (es.eigenvalues().cwiseInverse().asDiagonal() *
                      (es.eigenvectors().transpose() * rhs));

    out.state.qdot = state.qdot + qddot * dt;
    out.state.q = state.q + out.state.qdot * dt;
    return out;
}

}  // namespace scrape
