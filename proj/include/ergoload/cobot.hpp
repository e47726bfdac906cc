#pragma once

#include "ergoload/geometry.hpp"

#include <algorithm>

namespace ergoload {

struct ImpedanceGains {
    Vector3d k_trans{600.0, 600.0, 600.0}; // N/m
    Vector3d k_rot{30.0, 30.0, 30.0};      // Nm/rad
    double damping_ratio = 1.0;
    double virtual_mass = 5.0;             // kg
    double virtual_inertia = 0.1;          // kg m^2

    Vector3d d_trans() const { return 2.0 * damping_ratio * (k_trans * virtual_mass).cwiseSqrt(); }
    Vector3d d_rot() const { return 2.0 * damping_ratio * (k_rot * virtual_inertia).cwiseSqrt(); }

    void validate() const;
};

struct TrajectoryParams {
    double offset_e = 0.020; // m, target ahead of the hand
    double reach_time = 2.0; // s
    double tick_dt = 0.001;  // s

    void validate() const;
};

struct CobotState {
    Pose ee_pose;
    Vector6d ee_velocity = Vector6d::Zero(); // linear; angular
    Pose reference_pose;
    Pose base_transform; // maps global-frame poses into the robot base frame
};

/// Rigid transform T with T * hand_pose == ee_pose.
Pose calibrate(const Pose& hand_pose, const Pose& ee_pose);

/// Hand pose shifted by offset_e along the hand's forward axis (local -z,
/// the wrist-to-hand direction). Orientation is copied.
Pose target_frame(const Pose& hand_pose, const TrajectoryParams& params);

/// One tick of a straight-line plan: advance by min(1, tick_dt / remaining)
/// of the remaining error; orientation follows the slerp shortest path.
Pose plan_linear_step(const Pose& current_ref, const Pose& target, const TrajectoryParams& params,
                      double remaining_time);

/// Reach-time countdown for a linear plan segment.
class LinearPlanner {
public:
    explicit LinearPlanner(const TrajectoryParams& params) : params_(params), remaining_(params.reach_time) {}

    Pose step(const Pose& current_ref, const Pose& target)
    {
        const Pose next = plan_linear_step(current_ref, target, params_, remaining_);
        remaining_ = std::max(params_.tick_dt, remaining_ - params_.tick_dt);
        return next;
    }

    void restart() { remaining_ = params_.reach_time; }
    double remaining() const { return remaining_; }

private:
    TrajectoryParams params_;
    double remaining_;
};

/// Virtual mass-spring-damper about the reference, integrated with a
/// linearly implicit Euler step per axis:
///   m a = K (x_ref - x) - D v + F_ext.
CobotState impedance_step(const CobotState& state, const ImpedanceGains& gains, const Wrench& external, double dt);

/// ½ m |v|² + ½ Σ K_i (x_i - x_ref,i)² (translational part).
double virtual_energy(const CobotState& state, const ImpedanceGains& gains);

} // namespace ergoload
