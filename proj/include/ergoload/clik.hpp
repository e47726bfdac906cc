#pragma once

#include "ergoload/arm_model.hpp"

namespace ergoload {

/// Damped-least-squares CLIK settings. One iteration integrates
/// q += step_dt * Jᵀ(JJᵀ + damping² I)⁻¹ gain * e.
struct ClikParams {
    double gain = 10.0;      // 1/s
    double damping = 1e-3;
    double step_dt = 0.05;   // s
    int max_iters = 200;
    double tol = 1e-4;       // max-norm of the stacked residual (m / rad)

    void validate() const;
};

struct ClikResult {
    JointVector q = JointVector::Zero();
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

/// Stacked task residual: hand position (3), hand orientation as a rotation
/// vector (3), elbow position (3), elbow orientation as a rotation vector (3).
Eigen::Matrix<double, 12, 1> clik_residual(const ArmGeometry& geom, const FramePoses& observed, const JointVector& q);

/// Joint angles whose frames match the observed elbow and hand frames.
/// Warm-started from q_prev, every iterate is clamped to the joint limits and
/// locked joints never move. When the budget runs out, or the residual stops
/// shrinking for ten iterations, the best iterate is returned with
/// converged = false.
ClikResult estimate_angles(const ArmGeometry& geom, const FramePoses& observed, const JointVector& q_prev,
                           const ClikParams& params = {});

} // namespace ergoload
