#pragma once

#include "ergoload/geometry.hpp"

#include <array>

namespace ergoload {

/// Segment lengths and joint limits of the 6-DOF right-arm chain.
///
/// Lengths are stored as non-negative magnitudes; the signed segment
/// displacements are
///   shoulder -> elbow : ( l12[0], -l12[1], -l12[2])
///   elbow    -> wrist : (-l23[0], -l23[1], -l23[2])
///   wrist    -> hand  : ( 0,       0,      -l34  )
/// in the local frame of the proximal segment. The global frame sits at the
/// shoulder with x forward, y to the body's left and z up.
struct ArmGeometry {
    Vector3d l12{0.024, 0.057, 0.301};
    Vector3d l23{0.010, 0.004, 0.296};
    double l34 = 0.090;
    JointVector theta_lower = (JointVector() << -0.22, -0.5, -0.06, 0.0, -0.5, -0.06).finished() * kPi;
    JointVector theta_upper = (JointVector() << 0.0, 0.5, 0.06, 0.0, 0.0, 0.0).finished() * kPi;

    Vector3d shoulder_to_elbow() const { return {l12.x(), -l12.y(), -l12.z()}; }
    Vector3d elbow_to_wrist() const { return {-l23.x(), -l23.y(), -l23.z()}; }
    Vector3d wrist_to_hand() const { return {0.0, 0.0, -l34}; }

    /// Throws std::invalid_argument if lengths are negative/non-finite or limits are inverted.
    void validate() const;

    bool within_limits(const JointVector& q, double slack = 0.0) const
    {
        return ((q - theta_lower).array() >= -slack).all() && ((theta_upper - q).array() >= -slack).all();
    }

    JointVector clamp(const JointVector& q) const { return q.cwiseMax(theta_lower).cwiseMin(theta_upper); }
};

/// Joint layout. Each 3-DOF joint is an intrinsic rotation sequence in ISB
/// naming Z (lateral) -> X (forward) -> Y (long axis), which in the global
/// labels is y -> x -> z:
///
///   index | joint    | axis (segment frame) | order | motion
///   ------+----------+----------------------+-------+---------------------------
///   θ2    | shoulder | y lateral            | 1st   | flexion (-) / extension (+)
///   θ1    | shoulder | x forward            | 2nd   | abduction (-) / adduction (+)
///   θ3    | shoulder | z long axis          | 3rd   | axial rotation
///   θ5    | elbow    | y lateral            | 1st   | flexion (-) / extension (+)
///   θ4    | elbow    | x forward            | 2nd   | carrying angle
///   θ6    | elbow    | z long axis          | 3rd   | pronation / supination
///
/// Within a triple, joint offset k rotates about segment axis k.
inline constexpr std::array<int, 3> kJointOrder = {1, 0, 2};

/// Positions and joint axes of one chain evaluation.
template <typename Scalar>
struct ChainState {
    Vector3<Scalar> elbow;
    Vector3<Scalar> wrist;
    Vector3<Scalar> hand;
    Matrix3<Scalar> upper_arm; // orientation of the elbow frame
    Matrix3<Scalar> forearm;   // orientation of the wrist and hand frames
    std::array<Vector3<Scalar>, 6> axes;
    std::array<Vector3<Scalar>, 6> origins;
};

template <typename Scalar>
Matrix3<Scalar> principal_rotation(int axis, const Scalar& angle)
{
    return Eigen::AngleAxis<Scalar>(angle, Vector3<Scalar>::Unit(axis)).toRotationMatrix();
}

template <typename Scalar>
ChainState<Scalar> evaluate_chain(const ArmGeometry& geom, const Vector6<Scalar>& q)
{
    ChainState<Scalar> s;
    Matrix3<Scalar> R = Matrix3<Scalar>::Identity();
    Vector3<Scalar> origin = Vector3<Scalar>::Zero();

    auto apply_triple = [&](int first) {
        for (int local : kJointOrder) {
            const int idx = first + local;
            s.axes[idx] = R.col(local);
            s.origins[idx] = origin;
            R = R * principal_rotation<Scalar>(local, q(idx));
        }
    };

    apply_triple(0);
    s.upper_arm = R;
    s.elbow = R * geom.shoulder_to_elbow().cast<Scalar>();
    origin = s.elbow;
    apply_triple(3);
    s.forearm = R;
    s.wrist = s.elbow + R * geom.elbow_to_wrist().cast<Scalar>();
    s.hand = s.wrist + R * geom.wrist_to_hand().cast<Scalar>();
    return s;
}

/// Frames of the chain expressed in the global frame (coincident with the shoulder frame).
struct FramePoses {
    Pose shoulder;
    Pose elbow;
    Pose wrist;
    Pose hand;
};

/// Hand pose in the global frame. Throws std::invalid_argument on non-finite q.
Pose forward_kinematics(const ArmGeometry& geom, const JointVector& q);

FramePoses frame_poses(const ArmGeometry& geom, const JointVector& q);

/// Geometric Jacobian of the hand frame: rows 0-2 translational, 3-5 rotational.
Matrix6d jacobian(const ArmGeometry& geom, const JointVector& q);

/// Translational Jacobian of the elbow position (only shoulder joints contribute).
Eigen::Matrix<double, 3, 6> elbow_position_jacobian(const ArmGeometry& geom, const JointVector& q);

/// Quasi-static joint torques τ = Jᵀ [f; m].
JointVector overload_torques(const ArmGeometry& geom, const JointVector& q, const Wrench& f);

} // namespace ergoload
