#include "ergoload/clik.hpp"

namespace ergoload {

namespace {

using Residual = Eigen::Matrix<double, 12, 1>;
using TaskJacobian = Eigen::Matrix<double, 12, 6>;

constexpr double kStallRatio = 1e-3;
constexpr int kStallIters = 10;

TaskJacobian task_jacobian(const ArmGeometry& geom, const JointVector& q)
{
    TaskJacobian J;
    J.topRows<6>() = jacobian(geom, q);
    J.middleRows<3>(6) = elbow_position_jacobian(geom, q);
    // the elbow frame turns with the three shoulder joints only
    const auto chain = evaluate_chain<double>(geom, q);
    J.bottomRows<3>().setZero();
    for (int i = 0; i < 3; ++i)
        J.block<3, 1>(9, i) = chain.axes[i];
    return J;
}

} // namespace

void ClikParams::validate() const
{
    if (!(gain > 0.0) || !(tol > 0.0) || !(step_dt > 0.0) || max_iters < 1 || !(damping >= 0.0))
        throw std::invalid_argument("ClikParams: require gain > 0, tol > 0, step_dt > 0, max_iters >= 1, damping >= 0");
}

Residual clik_residual(const ArmGeometry& geom, const FramePoses& observed, const JointVector& q)
{
    const auto chain = evaluate_chain<double>(geom, q);
    Residual e;
    e.segment<3>(0) = observed.hand.position - chain.hand;
    e.segment<3>(3) = rotation_log(observed.hand.orientation * chain.forearm.transpose());
    e.segment<3>(6) = observed.elbow.position - chain.elbow;
    e.segment<3>(9) = rotation_log(observed.elbow.orientation * chain.upper_arm.transpose());
    return e;
}

ClikResult estimate_angles(const ArmGeometry& geom, const FramePoses& observed, const JointVector& q_prev,
                           const ClikParams& params)
{
    params.validate();
    require_finite(q_prev, "estimate_angles");
    if (!observed.hand.finite() || !observed.elbow.finite())
        throw std::invalid_argument("estimate_angles: non-finite observed pose");

    ClikResult best;
    best.q = geom.clamp(q_prev);
    Residual e = clik_residual(geom, observed, best.q);
    best.residual = e.lpNorm<Eigen::Infinity>();
    if (best.residual < params.tol) {
        best.converged = true;
        return best;
    }

    const double lambda2 = params.damping * params.damping;
    JointVector q = best.q;
    int stalled = 0;
    for (int it = 1; it <= params.max_iters; ++it) {
        TaskJacobian J = task_jacobian(geom, q);
        for (int i = 0; i < 6; ++i)
            if (geom.theta_lower(i) == geom.theta_upper(i))
                J.col(i).setZero(); // locked joints stay put
        // joints resting on a limit and pushed outward drop out of the solve
        JointVector qdot = JointVector::Zero();
        for (int pass = 0; pass < 6; ++pass) {
            const Eigen::Matrix<double, 12, 12> JJt =
                J * J.transpose() + lambda2 * Eigen::Matrix<double, 12, 12>::Identity();
            qdot = J.transpose() * JJt.ldlt().solve(params.gain * e);
            bool changed = false;
            for (int i = 0; i < 6; ++i) {
                const bool at_lower = q(i) <= geom.theta_lower(i) && qdot(i) < 0.0;
                const bool at_upper = q(i) >= geom.theta_upper(i) && qdot(i) > 0.0;
                if ((at_lower || at_upper) && !J.col(i).isZero()) {
                    J.col(i).setZero();
                    changed = true;
                }
            }
            if (!changed)
                break;
        }
        q = geom.clamp(q + params.step_dt * qdot);

        e = clik_residual(geom, observed, q);
        const double r = e.lpNorm<Eigen::Infinity>();
        stalled = r < (1.0 - kStallRatio) * best.residual ? 0 : stalled + 1;
        if (r < best.residual) {
            best.q = q;
            best.residual = r;
        }
        best.iterations = it;
        if (r < params.tol) {
            best.converged = true;
            break;
        }
        // pinned against a limit: the residual no longer shrinks
        if (stalled >= kStallIters)
            break;
    }
    return best;
}

} // namespace ergoload
