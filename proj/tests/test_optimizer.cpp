#include "ergoload/optimizer.hpp"

#include <doctest.h>

#include <limits>
#include <stdexcept>

using namespace ergoload;

namespace {

TorqueProblem preset_c_problem()
{
    TorqueProblem p;
    p.wrench = Wrench::payload(2.0);
    p.weights = WeightMatrix((Vector6d() << 0, 1, 0, 0, 0, 0).finished());
    p.theta_init << 0.0, -0.4 * kPi, 0.0, 0.0, -0.15 * kPi, 0.0;
    return p;
}

// θ2 and θ5 free, everything else pinned at theta_init.
TorqueProblem reduced(TorqueProblem p)
{
    for (int i : {0, 2, 3, 5}) {
        p.theta_lower(i) = p.theta_init(i);
        p.theta_upper(i) = p.theta_init(i);
    }
    return p;
}

struct GridMin {
    double value = std::numeric_limits<double>::infinity();
    double th2 = 0.0, th5 = 0.0;
};

// Exhaustive 0.5 degree grid over the feasible (θ2, θ5) box.
GridMin grid_minimum(const TorqueProblem& p)
{
    GridMin best;
    const double step = deg2rad(0.5);
    JointVector q = p.theta_init;
    for (double a = p.theta_lower(1); a <= p.theta_upper(1) + 1e-12; a += step) {
        for (double b = p.theta_lower(4); b <= p.theta_upper(4) + 1e-12; b += step) {
            q(1) = a;
            q(4) = b;
            if (constraint_violation(p, q) > 0.0)
                continue;
            const double f = objective(p, q);
            if (f < best.value)
                best = {f, a, b};
        }
    }
    return best;
}

} // namespace

TEST_CASE("objective is the weighted sum of squared torques")
{
    const TorqueProblem p = preset_c_problem();
    const JointVector tau = overload_torques(p.geom, p.theta_init, p.wrench);
    CHECK(objective(p, p.theta_init) == doctest::Approx(tau(1) * tau(1)));
}

TEST_CASE("objective gradient matches central differences of the objective")
{
    TorqueProblem p = preset_c_problem();
    p.weights = WeightMatrix((Vector6d() << 0.2, 1, 0.5, 0.1, 0.3, 0.7).finished());
    const JointVector q = (JointVector() << -0.3, 0.4, 0.1, 0.0, -0.9, -0.1).finished();
    const JointVector g = objective_gradient(p, q);
    for (int i = 0; i < 6; ++i) {
        JointVector qp = q, qm = q;
        qp(i) += 1e-5;
        qm(i) -= 1e-5;
        CHECK(g(i) == doctest::Approx((objective(p, qp) - objective(p, qm)) / 2e-5).epsilon(1e-5));
    }
}

TEST_CASE("reduced preset C: solve agrees with a 0.5 degree grid search")
{
    const TorqueProblem p = reduced(preset_c_problem());
    const GridMin grid = grid_minimum(p);
    REQUIRE(std::isfinite(grid.value));

    const SolveResult r = solve(p);
    CHECK(r.converged);
    CHECK(r.constraint_violation <= 1e-6);
    CHECK(r.objective_value <= 1.05 * grid.value);
    // the grid is coarse, so only sanity-check the other direction
    CHECK(r.objective_value >= 0.95 * grid.value - 1e-9);
    for (int i : {0, 2, 3, 5})
        CHECK(r.theta_opt(i) == p.theta_init(i));
}

TEST_CASE("without the restart the reduced problem stops in the corner local minimum")
{
    const TorqueProblem p = reduced(preset_c_problem());
    AugmentedLagrangianSettings s;
    s.box_restart = false;
    const SolveResult r = solve(p, s);
    CHECK(r.converged);
    CHECK(r.theta_opt(1) == doctest::Approx(p.theta_lower(1)));
    CHECK(r.theta_opt(4) == doctest::Approx(p.theta_lower(4)));
    CHECK(r.objective_value > 1.05 * grid_minimum(p).value);
}

TEST_CASE("all-zero weights return the start exactly")
{
    TorqueProblem p = preset_c_problem();
    p.weights = WeightMatrix{};
    p.theta_init << 0.0, 0.0, 0.0, 0.0, -0.5 * kPi, 0.0;
    const SolveResult r = solve(p);
    CHECK(r.theta_opt == p.theta_init);
    CHECK(r.objective_value == 0.0);
    CHECK(r.converged);
}

TEST_CASE("solution never worsens a feasible start and respects all bounds")
{
    TorqueProblem p = preset_c_problem();
    p.weights = WeightMatrix((Vector6d() << 0.2, 1, 0, 0, 0, 0).finished());
    for (const JointVector& start : {JointVector((JointVector() << 0, -0.35 * kPi, 0, 0, -0.15 * kPi, 0).finished()),
                                     JointVector((JointVector() << -0.1, 0.2, 0.05, 0, -1.2, 0).finished())}) {
        p.theta_init = start;
        const SolveResult r = solve(p);
        CHECK(r.constraint_violation <= 1e-6);
        if (constraint_violation(p, start) == 0.0)
            CHECK(r.objective_value <= objective(p, start) + 1e-9);
        CHECK(p.geom.within_limits(r.theta_opt, 1e-9));
        CHECK(r.theta_opt(3) == 0.0); // locked joint
    }
}

TEST_CASE("Cartesian bound is active in preset C")
{
    // τ2 is the payload moment about the lateral axis, so its floor is set by p_L.x
    const TorqueProblem p = preset_c_problem();
    const SolveResult r = solve(p);
    const Vector3d hand = forward_kinematics(p.geom, r.theta_opt).position;
    CHECK(hand.x() == doctest::Approx(p.p_lower.x()).epsilon(1e-4));
    CHECK(std::sqrt(r.objective_value) == doctest::Approx(0.3 * 19.62).epsilon(1e-3));
}

TEST_CASE("start outside the limits is pulled in")
{
    TorqueProblem p = preset_c_problem();
    p.theta_init << -0.3 * kPi, -0.2 * kPi, 0, 0, -0.5 * kPi, 0;
    const SolveResult r = solve(p);
    CHECK(p.geom.within_limits(r.theta_opt, 1e-9));
    CHECK(r.constraint_violation <= 1e-6);
}

TEST_CASE("invalid problems throw")
{
    TorqueProblem p = preset_c_problem();
    p.theta_lower(1) = 1.0;
    p.theta_upper(1) = 0.0;
    CHECK_THROWS_AS(solve(p), std::invalid_argument);
    p = preset_c_problem();
    p.p_lower.x() = 1.0;
    CHECK_THROWS_AS(solve(p), std::invalid_argument);
    p = preset_c_problem();
    p.weights.w(0) = -0.5;
    CHECK_THROWS_AS(solve(p), std::invalid_argument);
}

TEST_CASE("trigger uses a strict inequality on tracked joints")
{
    TauMax lim;
    lim.limits[0] = 2.02;
    lim.limits[1] = 8.13;
    lim.limits[4] = 7.66;
    const JointVector at = (JointVector() << 2.02, 8.13, 100, 100, 7.66, 100).finished();
    CHECK_FALSE(should_trigger(at, lim));
    JointVector over = at;
    over(4) = 15.3;
    CHECK(should_trigger(over, lim));
    over(4) = -15.3;
    CHECK(should_trigger(over, lim));

    const TauMax rec = TauMax::record((JointVector() << -1, 2, 3, 4, -5, 6).finished(), {0, 1, 4});
    CHECK(*rec.limits[0] == 1.0);
    CHECK(*rec.limits[4] == 5.0);
    CHECK_FALSE(rec.limits[2].has_value());
}
