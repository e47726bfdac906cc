#include "ergoload/cobot.hpp"

#include <algorithm>

namespace ergoload {

void ImpedanceGains::validate() const
{
    if (!((k_trans.array() > 0.0).all() && (k_rot.array() > 0.0).all() && damping_ratio > 0.0 &&
          virtual_mass > 0.0 && virtual_inertia > 0.0))
        throw std::invalid_argument("ImpedanceGains: all gains and plant constants must be positive");
}

void TrajectoryParams::validate() const
{
    if (!(offset_e >= 0.0) || !(reach_time > 0.0) || !(tick_dt > 0.0))
        throw std::invalid_argument("TrajectoryParams: require offset_e >= 0, reach_time > 0, tick_dt > 0");
}

Pose calibrate(const Pose& hand_pose, const Pose& ee_pose)
{
    return ee_pose * inverse(hand_pose);
}

Pose target_frame(const Pose& hand_pose, const TrajectoryParams& params)
{
    const Vector3d forward = -hand_pose.orientation.col(2);
    return {hand_pose.position + params.offset_e * forward, hand_pose.orientation};
}

Pose plan_linear_step(const Pose& current_ref, const Pose& target, const TrajectoryParams& params,
                      double remaining_time)
{
    const double fraction = remaining_time > 0.0 ? std::min(1.0, params.tick_dt / remaining_time) : 1.0;
    if (fraction >= 1.0)
        return target;

    Pose next;
    next.position = current_ref.position + fraction * (target.position - current_ref.position);
    const Eigen::Quaterniond from(current_ref.orientation);
    const Eigen::Quaterniond to(target.orientation);
    next.orientation = from.slerp(fraction, to).toRotationMatrix();
    return next;
}

CobotState impedance_step(const CobotState& state, const ImpedanceGains& gains, const Wrench& external, double dt)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("impedance_step: dt must be positive");

    CobotState next = state;

    const Vector3d Kt = gains.k_trans, Dt = gains.d_trans();
    const double m = gains.virtual_mass;
    const Vector3d x = state.ee_pose.position;
    const Vector3d v = state.ee_velocity.head<3>();
    const Vector3d pull = Kt.cwiseProduct(state.reference_pose.position - x) + external.force;
    const Vector3d v_new =
        (m * v + dt * pull).cwiseQuotient((Vector3d::Constant(m) + dt * Dt + dt * dt * Kt));
    next.ee_velocity.head<3>() = v_new;
    next.ee_pose.position = x + dt * v_new;

    const Vector3d Kr = gains.k_rot, Dr = gains.d_rot();
    const double I = gains.virtual_inertia;
    const Vector3d w = state.ee_velocity.tail<3>();
    const Vector3d err = rotation_log(state.reference_pose.orientation * state.ee_pose.orientation.transpose());
    const Vector3d twist = Kr.cwiseProduct(err) + external.moment;
    const Vector3d w_new = (I * w + dt * twist).cwiseQuotient((Vector3d::Constant(I) + dt * Dr + dt * dt * Kr));
    next.ee_velocity.tail<3>() = w_new;
    next.ee_pose.orientation = rotation_exp(dt * w_new) * state.ee_pose.orientation;
    return next;
}

double virtual_energy(const CobotState& state, const ImpedanceGains& gains)
{
    const Vector3d dx = state.ee_pose.position - state.reference_pose.position;
    return 0.5 * gains.virtual_mass * state.ee_velocity.head<3>().squaredNorm() +
           0.5 * dx.cwiseAbs2().dot(gains.k_trans);
}

} // namespace ergoload
