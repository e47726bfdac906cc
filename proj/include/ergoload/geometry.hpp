#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ergoload {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;

using Vector3d = Vector3<double>;
using Vector6d = Vector6<double>;
using Matrix3d = Matrix3<double>;
using Matrix6d = Matrix6<double>;

/// Joint angles [θ1..θ6] in rad. θ1-θ3 belong to the shoulder, θ4-θ6 to the elbow.
using JointVector = Vector6d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m)
{
    return m.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what)
{
    if (!m.allFinite())
        throw std::invalid_argument(std::string(what) + ": non-finite component");
}

/// Fixed-axis x-y-z roll/pitch/yaw: R = Rz(yaw) * Ry(pitch) * Rx(roll).
template <typename Scalar>
Matrix3<Scalar> rpy_to_rotation(const Vector3<Scalar>& rpy)
{
    using Axis = Eigen::AngleAxis<Scalar>;
    return (Axis(rpy.z(), Vector3<Scalar>::UnitZ()) * Axis(rpy.y(), Vector3<Scalar>::UnitY()) *
            Axis(rpy.x(), Vector3<Scalar>::UnitX()))
        .toRotationMatrix();
}

/// Inverse of rpy_to_rotation. Pitch is returned in [-π/2, π/2]; at the
/// gimbal lock roll is set to zero and the combined angle goes into yaw.
template <typename Scalar>
Vector3<Scalar> rotation_to_rpy(const Matrix3<Scalar>& R)
{
    using std::atan2;
    using std::sqrt;
    const Scalar cos_pitch = sqrt(R(0, 0) * R(0, 0) + R(1, 0) * R(1, 0));
    const Scalar pitch = atan2(-R(2, 0), cos_pitch);
    if (cos_pitch < Scalar(1e-12))
        return {Scalar(0), pitch, atan2(-R(0, 1), R(1, 1))};
    return {atan2(R(2, 1), R(2, 2)), pitch, atan2(R(1, 0), R(0, 0))};
}

/// Rotation vector (axis * angle) of R.
inline Vector3d rotation_log(const Matrix3d& R)
{
    const Eigen::AngleAxisd aa(R);
    return aa.axis() * aa.angle();
}

inline Matrix3d rotation_exp(const Vector3d& w)
{
    const double angle = w.norm();
    if (angle < 1e-300)
        return Matrix3d::Identity();
    return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

/// Rigid pose. Orientation is held as a rotation matrix; rpy() gives the
/// fixed-axis x-y-z roll/pitch/yaw view of it.
struct Pose {
    Vector3d position = Vector3d::Zero();
    Matrix3d orientation = Matrix3d::Identity();

    Pose() = default;
    Pose(const Vector3d& p, const Matrix3d& R) : position(p), orientation(R) {}

    static Pose from_rpy(const Vector3d& p, const Vector3d& rpy) { return {p, rpy_to_rotation(rpy)}; }

    Vector3d rpy() const { return rotation_to_rpy(orientation); }

    Eigen::Isometry3d isometry() const
    {
        Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
        T.linear() = orientation;
        T.translation() = position;
        return T;
    }

    static Pose from_isometry(const Eigen::Isometry3d& T) { return {T.translation(), T.linear()}; }

    bool finite() const { return position.allFinite() && orientation.allFinite(); }
};

inline Pose operator*(const Pose& a, const Pose& b)
{
    return {a.position + a.orientation * b.position, a.orientation * b.orientation};
}

inline Pose inverse(const Pose& a)
{
    const Matrix3d Rt = a.orientation.transpose();
    return {-(Rt * a.position), Rt};
}

/// External force/moment at the hand, expressed in the global (shoulder) frame.
struct Wrench {
    Vector3d force = Vector3d::Zero();
    Vector3d moment = Vector3d::Zero();

    Vector6d stacked() const
    {
        Vector6d w;
        w << force, moment;
        return w;
    }

    /// Gravity load of a held payload: -z force, no moment.
    static Wrench payload(double mass_kg) { return {Vector3d(0.0, 0.0, -mass_kg * kGravity), Vector3d::Zero()}; }
};

inline Wrench operator*(double a, const Wrench& w) { return {a * w.force, a * w.moment}; }

} // namespace ergoload
