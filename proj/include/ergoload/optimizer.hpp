#pragma once

#include "ergoload/arm_model.hpp"

#include <array>
#include <optional>

namespace ergoload {

/// Diagonal entries of the torque weight matrix, each in [0, 1].
struct WeightMatrix {
    Vector6d w = Vector6d::Zero();

    WeightMatrix() = default;
    explicit WeightMatrix(const Vector6d& diag) : w(diag) {}

    bool all_zero() const { return (w.array() == 0.0).all(); }
    void validate() const;
};

/// Weighted overloading-torque minimisation over joint and hand-position boxes.
struct TorqueProblem {
    ArmGeometry geom;
    Wrench wrench;
    WeightMatrix weights;
    JointVector theta_lower = ArmGeometry{}.theta_lower;
    JointVector theta_upper = ArmGeometry{}.theta_upper;
    Vector3d p_lower{0.3, -0.8, -0.8};
    Vector3d p_upper{0.9, 0.8, 0.8};
    JointVector theta_init = JointVector::Zero();

    /// Throws std::invalid_argument on inverted or non-finite bounds.
    void validate() const;
};

/// Maximum allowable torque magnitudes; unset entries are not tracked.
struct TauMax {
    std::array<std::optional<double>, 6> limits{};

    /// |tau| for each tracked joint index (0-based).
    static TauMax record(const JointVector& tau, std::initializer_list<int> tracked);
};

struct AugmentedLagrangianSettings {
    double penalty_init = 10.0;
    double penalty_growth = 10.0;
    int max_outer = 8;
    double inner_grad_tol = 1e-8;
    int max_inner = 400;
    double feasibility_tol = 1e-6;
    double fd_step = 1e-6;
    double boundary_nudge = 1e-6;
    /// Also run from the centre of the joint box and keep it if strictly better.
    bool box_restart = true;
};

struct SolveResult {
    JointVector theta_opt = JointVector::Zero();
    double objective_value = 0.0;
    bool converged = false;
    double constraint_violation = 0.0;
    int outer_iterations = 0;
};

/// |τᵀ W τ| with τ the overloading torques at q. W is diagonal PSD, so this is Σ wᵢ τᵢ².
double objective(const TorqueProblem& p, const JointVector& q);

/// Gradient 2 (∂τ/∂q)ᵀ W τ, with ∂τ/∂q from central differences of τ.
JointVector objective_gradient(const TorqueProblem& p, const JointVector& q, double fd_step = 1e-6);

/// Largest violation over θ_L ≤ θ ≤ θ_U and p_L ≤ hand(θ) ≤ p_U (0 when feasible).
double constraint_violation(const TorqueProblem& p, const JointVector& q);

/// Local minimiser from theta_init. Joints with θ_L == θ_U are held fixed.
SolveResult solve(const TorqueProblem& p, const AugmentedLagrangianSettings& settings = {});

/// True iff some tracked |τᵢ| strictly exceeds its limit.
bool should_trigger(const JointVector& tau, const TauMax& limits);

} // namespace ergoload
