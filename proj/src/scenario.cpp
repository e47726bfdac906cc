#include "ergoload/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace ergoload {

namespace {

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok)
        throw std::invalid_argument(field + ": " + what);
}

} // namespace

void HumanFollowerParams::validate() const
{
    require(max_joint_speed > 0.0, "follower.max_joint_speed", "must be positive");
    require(noise_std >= 0.0, "follower.noise_std", "must be non-negative");
    require(settle_band >= 0.0, "follower.settle_band", "must be non-negative");
}

void ScenarioConfig::validate() const
{
    require(experiment_id >= 'A' && experiment_id <= 'E', "scenario.experiment_id", "must be one of A..E");
    geometry.validate();
    exo.validate();
    pid.validate();
    impedance.validate();
    clik.validate();
    follower.validate();
    weights.validate();
    require(theta_init.allFinite(), "scenario.theta_init", "must be finite");
    require(std::isfinite(payload_kg) && payload_kg > 0.0, "scenario.payload_kg", "must be positive");
    require(tick_dt > 0.0, "scenario.tick_dt", "must be positive");
    require(duration_s >= 2.0 * metrics_window_s, "scenario.duration_s", "must cover two metric windows");
    require(activation_s >= 0.0, "scenario.activation_s", "must be non-negative");
    require(optimizer_rate_hz > 0.0, "optimizer.rate_hz", "must be positive");
    require((p_lower.array() <= p_upper.array()).all(), "optimizer.p_lower", "must not exceed p_upper");
    require(!exo.active || weights.w(4) == 0.0, "optimizer.weights",
            "W5 must be 0 while the elbow exoskeleton is active");
    require(theta_tolerance.center >= 0.0 && theta_tolerance.half_width >= 0.0, "scenario.theta_tolerance",
            "must be non-negative");
    for (const auto& lim : tau_max.limits)
        require(!lim || *lim > 0.0, "optimizer.tau_max", "set entries must be positive");
}

TauMax record_tau_max(const ArmGeometry& geom)
{
    const JointVector pose_a = (JointVector() << 0.0, 0.0, 0.0, 0.0, -0.5 * kPi, 0.0).finished();
    return TauMax::record(overload_torques(geom, pose_a, Wrench::payload(2.0)), {0, 1, 4});
}

ScenarioConfig preset(char experiment_id)
{
    ScenarioConfig cfg;
    cfg.experiment_id = experiment_id;
    Vector6d w = Vector6d::Zero();
    switch (experiment_id) {
    case 'A':
        cfg.theta_init << 0.0, 0.0, 0.0, 0.0, -0.5, 0.0;
        break;
    case 'B':
        cfg.theta_init << 0.0, 0.0, 0.0, 0.0, -0.5, 0.0;
        w << 0.2, 1.0, 0.0, 0.0, 0.0, 0.0;
        cfg.payload_kg = 4.0;
        break;
    case 'C':
        cfg.theta_init << 0.0, -0.4, 0.0, 0.0, -0.15, 0.0;
        w << 0.0, 1.0, 0.0, 0.0, 0.0, 0.0;
        break;
    case 'D':
        cfg.theta_init << 0.0, -0.35, 0.0, 0.0, -0.15, 0.0;
        w << 0.2, 1.0, 0.0, 0.0, 0.0, 0.0;
        break;
    case 'E':
        cfg.theta_init << -0.3, -0.2, 0.0, 0.0, -0.5, 0.0;
        w << 0.2, 1.0, 0.0, 0.0, 0.0, 0.0;
        break;
    default:
        throw std::invalid_argument(std::string("unknown experiment '") + experiment_id + "', expected A..E");
    }
    cfg.theta_init *= kPi;
    cfg.weights = WeightMatrix(w);
    cfg.tau_max = record_tau_max(cfg.geometry);
    return cfg;
}

FollowerStep simulated_human_step(const JointVector& q, const JointVector& q_avatar, const HumanFollowerParams& params,
                                  double dt, Rng& rng, const ArmGeometry& geom)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("simulated_human_step: dt must be positive");

    FollowerStep step;
    step.posture = q;
    // straight line in joint space, the largest gap moving at max speed;
    // the pose counts as aligned once every joint is inside the band
    const JointVector gap = q_avatar - q;
    const double largest = gap.cwiseAbs().maxCoeff();
    if (largest >= params.settle_band && largest > 0.0)
        step.posture += gap * std::min(1.0, params.max_joint_speed * dt / largest);

    step.observed = step.posture;
    if (params.noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, params.noise_std);
        for (int i = 0; i < 6; ++i) {
            const double n = noise(rng);
            if (geom.theta_upper(i) > geom.theta_lower(i))
                step.observed(i) += n;
        }
    }
    return step;
}

double TimeSeriesLog::tick_dt() const
{
    if (records.size() < 2)
        return 0.0;
    return (records.back().t - records.front().t) / static_cast<double>(records.size() - 1);
}

double quantize(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

namespace {

template <typename Derived>
auto quantized(const Eigen::MatrixBase<Derived>& m)
{
    return m.unaryExpr([](double v) { return quantize(v); }).eval();
}

double tracked_error(const JointVector& q, const JointVector& avatar)
{
    double err = 0.0;
    for (int i : kTrackedJoints)
        err = std::max(err, std::abs(q(i) - avatar(i)));
    return err;
}

} // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg, const HumanFollowerParams& follower)
{
    cfg.validate();
    follower.validate();

    const ArmGeometry& geom = cfg.geometry;
    const Wrench payload = Wrench::payload(cfg.payload_kg);
    const double dt = cfg.tick_dt;

    ExoConfig exo = cfg.exo;
    exo.compensable_load = exo.effective_load(cfg.payload_kg * kGravity);

    TrajectoryParams traj = cfg.trajectory;
    traj.tick_dt = dt;
    traj.validate();

    TorqueProblem problem;
    problem.geom = geom;
    problem.wrench = payload;
    problem.weights = cfg.weights;
    problem.theta_lower = geom.theta_lower;
    problem.theta_upper = geom.theta_upper;
    problem.p_lower = cfg.p_lower;
    problem.p_upper = cfg.p_upper;

    Rng rng(cfg.rng_seed);

    JointVector posture = cfg.theta_init;
    JointVector actual = posture;
    JointVector q_est = geom.clamp(cfg.theta_init);
    JointVector avatar = cfg.theta_init;
    bool have_solution = false;

    CobotState cobot;
    cobot.base_transform = calibrate(forward_kinematics(geom, cfg.calibration_pose), cfg.calibration_ee_pose);
    cobot.ee_pose = cfg.calibration_ee_pose;
    cobot.reference_pose = cobot.ee_pose;
    const Pose base_inv = inverse(cobot.base_transform);
    LinearPlanner planner(traj);

    SeaState sea;
    if (exo.active)
        sea = SeaState::at_force(force_reference(exo, q_est(4)), cfg.sea);

    const bool optimise = !cfg.weights.all_zero();
    const long n_ticks = std::lround(cfg.duration_s / dt);
    const long opt_period = std::max(1L, std::lround(1.0 / (cfg.optimizer_rate_hz * dt)));

    ScenarioResult result;
    OptimizerSummary& opt = result.optimizer;
    result.log.records.reserve(static_cast<std::size_t>(n_ticks));

    for (long k = 0; k < n_ticks; ++k) {
        const double t = static_cast<double>(k) * dt;

        const FramePoses frames = frame_poses(geom, actual);
        q_est = estimate_angles(geom, frames, q_est, cfg.clik).q;
        const JointVector tau = overload_torques(geom, q_est, payload);

        const double tau_exo = assistive_torque(exo, q_est(4));
        const double f_ref = exo.active ? force_reference(exo, q_est(4)) : 0.0;

        if (optimise && !opt.frozen && t >= cfg.activation_s) {
            if (!opt.triggered && should_trigger(tau, cfg.tau_max)) {
                opt.triggered = true;
                opt.trigger_time = t;
            }
            if (opt.triggered && k % opt_period == 0) {
                if (have_solution && tracked_error(q_est, avatar) <= cfg.theta_tolerance.center) {
                    opt.frozen = true;
                    opt.freeze_time = t;
                } else {
                    problem.theta_init = q_est;
                    try {
                        const SolveResult sol = solve(problem, cfg.solver);
                        avatar = sol.theta_opt;
                        have_solution = true;
                        opt.converged = sol.converged;
                        opt.constraint_violation = sol.constraint_violation;
                        opt.objective_value = sol.objective_value;
                    } catch (const std::exception& ex) {
                        opt.converged = false;
                        opt.error = ex.what();
                    }
                    ++opt.solves;
                }
            }
        }

        const Pose target = cobot.base_transform * target_frame(frames.hand, traj);
        cobot.reference_pose = planner.step(cobot.reference_pose, target);
        cobot = impedance_step(cobot, cfg.impedance, Wrench{}, dt);

        if (exo.active) {
            const PidOutput pid = pid_force_step(sea, f_ref, cfg.pid, dt, cfg.sea);
            sea = sea_plant_step(pid.state, pid.command_elongation, dt, cfg.sea);
        }

        LogRecord rec;
        rec.t = quantize(t);
        rec.theta = quantized(actual);
        rec.avatar = quantized(avatar);
        rec.tau = quantized(tau);
        rec.tau5_net = quantize(tau(4) - tau_exo);
        rec.force_ref = quantize(f_ref);
        rec.force_measured = quantize(exo.active ? sea.measured_force : 0.0);
        rec.ee = quantized((base_inv * cobot.ee_pose).position);
        rec.ref = quantized((base_inv * cobot.reference_pose).position);
        rec.hand = quantized(frames.hand.position);
        result.log.records.push_back(rec);

        const FollowerStep next = simulated_human_step(posture, avatar, follower, dt, rng, geom);
        posture = next.posture;
        actual = next.observed;
    }

    result.report = compute_metrics(result.log, cfg);
    return result;
}

} // namespace ergoload
