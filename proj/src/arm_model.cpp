#include "ergoload/arm_model.hpp"

namespace ergoload {

void ArmGeometry::validate() const
{
    if (!l12.allFinite() || !l23.allFinite() || !std::isfinite(l34))
        throw std::invalid_argument("ArmGeometry: non-finite segment length");
    if ((l12.array() < 0.0).any() || (l23.array() < 0.0).any() || l34 < 0.0)
        throw std::invalid_argument("ArmGeometry: segment lengths must be non-negative");
    if (!theta_lower.allFinite() || !theta_upper.allFinite())
        throw std::invalid_argument("ArmGeometry: non-finite joint limit");
    if ((theta_lower.array() > theta_upper.array()).any())
        throw std::invalid_argument("ArmGeometry: theta_lower exceeds theta_upper");
}

Pose forward_kinematics(const ArmGeometry& geom, const JointVector& q)
{
    require_finite(q, "forward_kinematics");
    const auto chain = evaluate_chain<double>(geom, q);
    return {chain.hand, chain.forearm};
}

FramePoses frame_poses(const ArmGeometry& geom, const JointVector& q)
{
    require_finite(q, "frame_poses");
    const auto chain = evaluate_chain<double>(geom, q);
    FramePoses f;
    f.shoulder = Pose{};
    f.elbow = {chain.elbow, chain.upper_arm};
    f.wrist = {chain.wrist, chain.forearm};
    f.hand = {chain.hand, chain.forearm};
    return f;
}

Matrix6d jacobian(const ArmGeometry& geom, const JointVector& q)
{
    require_finite(q, "jacobian");
    const auto chain = evaluate_chain<double>(geom, q);
    Matrix6d J;
    for (int i = 0; i < 6; ++i) {
        J.col(i).head<3>() = chain.axes[i].cross(chain.hand - chain.origins[i]);
        J.col(i).tail<3>() = chain.axes[i];
    }
    return J;
}

Eigen::Matrix<double, 3, 6> elbow_position_jacobian(const ArmGeometry& geom, const JointVector& q)
{
    require_finite(q, "elbow_position_jacobian");
    const auto chain = evaluate_chain<double>(geom, q);
    Eigen::Matrix<double, 3, 6> J = Eigen::Matrix<double, 3, 6>::Zero();
    for (int i = 0; i < 3; ++i)
        J.col(i) = chain.axes[i].cross(chain.elbow - chain.origins[i]);
    return J;
}

JointVector overload_torques(const ArmGeometry& geom, const JointVector& q, const Wrench& f)
{
    require_finite(f.stacked(), "overload_torques");
    return jacobian(geom, q).transpose() * f.stacked();
}

} // namespace ergoload
