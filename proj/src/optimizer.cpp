#include "ergoload/optimizer.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace ergoload {

void WeightMatrix::validate() const
{
    if (!w.allFinite() || (w.array() < 0.0).any() || (w.array() > 1.0).any())
        throw std::invalid_argument("WeightMatrix: diagonal entries must lie in [0, 1]");
}

void TorqueProblem::validate() const
{
    geom.validate();
    weights.validate();
    require_finite(wrench.stacked(), "TorqueProblem wrench");
    require_finite(theta_init, "TorqueProblem theta_init");
    if (!theta_lower.allFinite() || !theta_upper.allFinite() || !p_lower.allFinite() || !p_upper.allFinite())
        throw std::invalid_argument("TorqueProblem: non-finite bound");
    if ((theta_lower.array() > theta_upper.array()).any())
        throw std::invalid_argument("TorqueProblem: infeasible joint bounds (theta_lower > theta_upper)");
    if ((p_lower.array() > p_upper.array()).any())
        throw std::invalid_argument("TorqueProblem: infeasible position bounds (p_lower > p_upper)");
}

TauMax TauMax::record(const JointVector& tau, std::initializer_list<int> tracked)
{
    TauMax t;
    for (int i : tracked)
        t.limits.at(static_cast<std::size_t>(i)) = std::abs(tau(i));
    return t;
}

double objective(const TorqueProblem& p, const JointVector& q)
{
    const JointVector tau = overload_torques(p.geom, q, p.wrench);
    return std::abs(tau.dot(p.weights.w.asDiagonal() * tau));
}

namespace {

Matrix6d torque_derivative(const TorqueProblem& p, const JointVector& q, double h)
{
    Matrix6d dtau;
    for (int j = 0; j < 6; ++j) {
        JointVector qp = q, qm = q;
        qp(j) += h;
        qm(j) -= h;
        dtau.col(j) = (overload_torques(p.geom, qp, p.wrench) - overload_torques(p.geom, qm, p.wrench)) / (2.0 * h);
    }
    return dtau;
}

} // namespace

JointVector objective_gradient(const TorqueProblem& p, const JointVector& q, double fd_step)
{
    const JointVector tau = overload_torques(p.geom, q, p.wrench);
    return 2.0 * torque_derivative(p, q, fd_step).transpose() * (p.weights.w.asDiagonal() * tau);
}

double constraint_violation(const TorqueProblem& p, const JointVector& q)
{
    const Vector3d hand = evaluate_chain<double>(p.geom, q).hand;
    double v = 0.0;
    v = std::max(v, (p.theta_lower - q).maxCoeff());
    v = std::max(v, (q - p.theta_upper).maxCoeff());
    v = std::max(v, (p.p_lower - hand).maxCoeff());
    v = std::max(v, (hand - p.p_upper).maxCoeff());
    return v;
}

bool should_trigger(const JointVector& tau, const TauMax& limits)
{
    for (int i = 0; i < 6; ++i) {
        const auto& lim = limits.limits[static_cast<std::size_t>(i)];
        if (lim && std::abs(tau(i)) > *lim)
            return true;
    }
    return false;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Augmented Lagrangian over the free joints of a TorqueProblem.
class AugmentedLagrangian {
public:
    AugmentedLagrangian(const TorqueProblem& p, const AugmentedLagrangianSettings& s, std::vector<int> free,
                        JointVector base, double scale)
        : p_(p), s_(s), free_(std::move(free)), base_(std::move(base)), scale_(scale),
          lambda_(VectorXd::Zero(constraint_count()))
    {
    }

    int size() const { return static_cast<int>(free_.size()); }
    int constraint_count() const { return 2 * size() + 6; }

    JointVector expand(const VectorXd& x) const
    {
        JointVector q = base_;
        for (int k = 0; k < size(); ++k)
            q(free_[k]) = x(k);
        return q;
    }

    VectorXd constraints(const JointVector& q, Vector3d* hand_out = nullptr) const
    {
        VectorXd g(constraint_count());
        const int n = size();
        for (int k = 0; k < n; ++k) {
            g(k) = p_.theta_lower(free_[k]) - q(free_[k]);
            g(n + k) = q(free_[k]) - p_.theta_upper(free_[k]);
        }
        const Vector3d hand = evaluate_chain<double>(p_.geom, q).hand;
        g.segment<3>(2 * n) = p_.p_lower - hand;
        g.segment<3>(2 * n + 3) = hand - p_.p_upper;
        if (hand_out)
            *hand_out = hand;
        return g;
    }

    double value(const VectorXd& x) const
    {
        const JointVector q = expand(x);
        const VectorXd g = constraints(q);
        const VectorXd shifted = (lambda_ + penalty_ * g).cwiseMax(0.0);
        return objective(p_, q) / scale_ + (shifted.squaredNorm() - lambda_.squaredNorm()) / (2.0 * penalty_);
    }

    VectorXd gradient(const VectorXd& x) const
    {
        const JointVector q = expand(x);
        const VectorXd g = constraints(q);
        const VectorXd mult = (lambda_ + penalty_ * g).cwiseMax(0.0);
        const JointVector grad_f = objective_gradient(p_, q, s_.fd_step) / scale_;
        const Eigen::Matrix<double, 3, 6> Jp = jacobian(p_.geom, q).topRows<3>();

        const int n = size();
        VectorXd grad(n);
        for (int k = 0; k < n; ++k) {
            const int j = free_[k];
            grad(k) = grad_f(j) - mult(k) + mult(n + k);
            grad(k) += Jp.col(j).dot(mult.segment<3>(2 * n + 3) - mult.segment<3>(2 * n));
        }
        return grad;
    }

    void update_multipliers(const VectorXd& x)
    {
        lambda_ = (lambda_ + penalty_ * constraints(expand(x))).cwiseMax(0.0);
        penalty_ *= s_.penalty_growth;
    }

    void set_penalty(double rho) { penalty_ = rho; }

private:
    const TorqueProblem& p_;
    const AugmentedLagrangianSettings& s_;
    std::vector<int> free_;
    JointVector base_;
    double scale_;
    VectorXd lambda_;
    double penalty_ = 10.0;
};

/// BFGS with Armijo backtracking. Returns true when the gradient tolerance is met.
bool minimize_bfgs(const AugmentedLagrangian& fn, VectorXd& x, double grad_tol, int max_iter)
{
    constexpr double kMaxStep = 0.5; // rad, per coordinate
    const int n = fn.size();
    MatrixXd H = MatrixXd::Identity(n, n);
    bool fresh = true;
    double fx = fn.value(x);
    VectorXd g = fn.gradient(x);

    for (int it = 0; it < max_iter; ++it) {
        if (g.lpNorm<Eigen::Infinity>() <= grad_tol)
            return true;

        VectorXd d = -H * g;
        if (g.dot(d) >= 0.0) {
            H.setIdentity();
            fresh = true;
            d = -g;
        }
        const double dmax = d.lpNorm<Eigen::Infinity>();
        if (dmax > kMaxStep)
            d *= kMaxStep / dmax;

        const double slope = g.dot(d);
        double alpha = 1.0;
        VectorXd x_new = x + d;
        double f_new = fn.value(x_new);
        while (f_new > fx + 1e-4 * alpha * slope && alpha > 1e-12) {
            alpha *= 0.5;
            x_new = x + alpha * d;
            f_new = fn.value(x_new);
        }
        if (f_new > fx + 1e-4 * alpha * slope || f_new >= fx) {
            if (fresh)
                return false;
            H.setIdentity();
            fresh = true;
            continue;
        }

        const VectorXd g_new = fn.gradient(x_new);
        const VectorXd s = x_new - x;
        const VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-14 * s.norm() * y.norm()) {
            if (fresh) {
                H *= sy / y.squaredNorm();
                fresh = false;
            }
            const double rho = 1.0 / sy;
            const MatrixXd V = MatrixXd::Identity(n, n) - rho * s * y.transpose();
            H = V * H * V.transpose() + rho * s * s.transpose();
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }
    return g.lpNorm<Eigen::Infinity>() <= grad_tol;
}

} // namespace

SolveResult solve(const TorqueProblem& p, const AugmentedLagrangianSettings& settings)
{
    p.validate();

    SolveResult result;
    if (p.weights.all_zero()) {
        result.theta_opt = p.theta_init;
        result.objective_value = 0.0;
        result.constraint_violation = constraint_violation(p, p.theta_init);
        result.converged = true;
        return result;
    }

    std::vector<int> free;
    JointVector start = p.theta_init.cwiseMax(p.theta_lower).cwiseMin(p.theta_upper);
    for (int j = 0; j < 6; ++j) {
        const double width = p.theta_upper(j) - p.theta_lower(j);
        if (width <= 0.0)
            continue;
        free.push_back(j);
        const double nudge = std::min(settings.boundary_nudge, 0.25 * width);
        start(j) = std::clamp(start(j), p.theta_lower(j) + nudge, p.theta_upper(j) - nudge);
    }

    // Best feasible candidate so far; the raw start counts when it is feasible.
    JointVector best_q = p.theta_init;
    double best_f = std::numeric_limits<double>::infinity();
    bool have_feasible = false;
    auto consider = [&](const JointVector& q) {
        if (constraint_violation(p, q) > settings.feasibility_tol)
            return;
        const double f = objective(p, q);
        if (!have_feasible || f < best_f) {
            best_q = q;
            best_f = f;
            have_feasible = true;
        }
    };
    consider(p.theta_init);
    consider(start);

    const double f0 = objective(p, start);
    if (free.empty() || (f0 == 0.0 && have_feasible)) {
        result.theta_opt = have_feasible ? best_q : start;
        result.objective_value = objective(p, result.theta_opt);
        result.constraint_violation = constraint_violation(p, result.theta_opt);
        result.converged = have_feasible;
        return result;
    }

    const double scale = f0 > 0.0 ? f0 : 1.0;
    // One augmented Lagrangian run from x0. Returns the last iterate and whether it ended feasible.
    auto local_run = [&](const JointVector& q0, int& outer) {
        AugmentedLagrangian al(p, settings, free, q0, scale);
        al.set_penalty(settings.penalty_init);
        VectorXd x(static_cast<Eigen::Index>(free.size()));
        for (std::size_t k = 0; k < free.size(); ++k)
            x(static_cast<Eigen::Index>(k)) = q0(free[k]);

        JointVector last = q0;
        for (outer = 0; outer < settings.max_outer; ++outer) {
            const bool inner_ok = minimize_bfgs(al, x, settings.inner_grad_tol, settings.max_inner);
            const JointVector q = al.expand(x);
            consider(q);
            const double step = (q - last).lpNorm<Eigen::Infinity>();
            last = q;
            if (inner_ok && outer > 0 && step < 1e-10 && constraint_violation(p, q) <= settings.feasibility_tol) {
                ++outer;
                break;
            }
            al.update_multipliers(x);
        }
        return last;
    };

    int outer = 0;
    const JointVector last = local_run(start, outer);
    result.outer_iterations = outer;
    bool converged = have_feasible && constraint_violation(p, last) <= settings.feasibility_tol;

    // The problem is not convex. A second run from the middle of the joint box replaces the
    // first answer only when it is strictly better, so a global optimum found from the start is kept.
    if (settings.box_restart) {
        JointVector mid = start;
        for (int j : free)
            mid(j) = 0.5 * (p.theta_lower(j) + p.theta_upper(j));
        const JointVector kept = best_q;
        const double kept_f = best_f;
        const bool kept_ok = have_feasible;
        have_feasible = false;
        best_f = std::numeric_limits<double>::infinity();
        int outer2 = 0;
        const JointVector last2 = local_run(mid, outer2);
        result.outer_iterations += outer2;
        const double margin = 1e-6 * std::max(kept_f, 1e-12);
        if (have_feasible && (!kept_ok || best_f < kept_f - margin)) {
            converged = constraint_violation(p, last2) <= settings.feasibility_tol;
        } else {
            best_q = kept;
            best_f = kept_f;
            have_feasible = kept_ok;
        }
    }

    result.theta_opt = have_feasible ? best_q : last;
    result.objective_value = objective(p, result.theta_opt);
    result.constraint_violation = constraint_violation(p, result.theta_opt);
    result.converged = have_feasible && converged;
    return result;
}

} // namespace ergoload
