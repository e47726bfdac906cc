#pragma once

#include "ergoload/arm_model.hpp"
#include "ergoload/clik.hpp"
#include "ergoload/cobot.hpp"
#include "ergoload/exoskeleton.hpp"
#include "ergoload/optimizer.hpp"

#include <array>
#include <random>
#include <string>
#include <vector>

namespace ergoload {

using Rng = std::mt19937_64;

/// Joints reported and tracked for triggering: θ1, θ2, θ5.
inline constexpr std::array<int, 3> kTrackedJoints = {0, 1, 4};

struct HumanFollowerParams {
    double max_joint_speed = 0.3;        // rad/s
    double noise_std = deg2rad(0.5);     // rad
    double settle_band = deg2rad(10.0);  // rad

    /// Noise-free follower; speed and settle band unchanged.
    static HumanFollowerParams ideal()
    {
        HumanFollowerParams p;
        p.noise_std = 0.0;
        return p;
    }

    void validate() const;
};

struct ThetaTolerance {
    double center = deg2rad(10.0);
    double half_width = deg2rad(5.0);
};

struct ScenarioConfig {
    char experiment_id = 'A';
    ArmGeometry geometry;
    ExoConfig exo;
    PidGains pid;
    SeaPlant sea;
    ImpedanceGains impedance;
    TrajectoryParams trajectory;
    ClikParams clik;
    AugmentedLagrangianSettings solver;
    HumanFollowerParams follower;

    JointVector theta_init = JointVector::Zero();
    WeightMatrix weights;
    double payload_kg = 2.0;
    ThetaTolerance theta_tolerance;
    Vector3d p_lower{0.3, -0.8, -0.8};
    Vector3d p_upper{0.9, 0.8, 0.8};
    TauMax tau_max;

    double duration_s = 15.0;
    double tick_dt = 0.001;
    std::uint64_t rng_seed = 1;
    double activation_s = 3.0;       // optimisation is enabled from this time on
    double optimizer_rate_hz = 10.0;
    double metrics_window_s = 3.0;
    double dagger_threshold = 0.2;   // Nm; below this the final state is the denominator

    /// Calibration posture (θ2 ≈ 0, θ5 ≈ -90°) and the robot end-effector pose
    /// that coincides with the hand there, in the robot base frame.
    JointVector calibration_pose = (JointVector() << 0.0, 0.0, 0.0, 0.0, -0.5 * kPi, 0.0).finished();
    Pose calibration_ee_pose = Pose::from_rpy(Vector3d(0.45, 0.20, 0.25), Vector3d(kPi, 0.0, 0.0));

    bool exo_active() const { return exo.active; }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Table I rows 'A'..'E'.
ScenarioConfig preset(char experiment_id);

/// |τ| at the experiment-A posture with the nominal 2 kg payload, for θ1, θ2, θ5.
TauMax record_tau_max(const ArmGeometry& geom);

struct FollowerStep {
    JointVector posture;  // noise-free intent carried to the next tick
    JointVector observed; // posture plus zero-mean noise
};

/// Moves each joint toward the avatar at no more than max_joint_speed until
/// the whole pose is inside the settle band, then adds Gaussian noise to
/// joints with a non-degenerate range.
FollowerStep simulated_human_step(const JointVector& q, const JointVector& q_avatar, const HumanFollowerParams& params,
                                  double dt, Rng& rng, const ArmGeometry& geom = {});

struct LogRecord {
    double t = 0.0;
    JointVector theta = JointVector::Zero();
    JointVector avatar = JointVector::Zero();
    JointVector tau = JointVector::Zero();
    double tau5_net = 0.0;
    double force_ref = 0.0;
    double force_measured = 0.0;
    Vector3d ee = Vector3d::Zero();
    Vector3d ref = Vector3d::Zero();
    Vector3d hand = Vector3d::Zero();
};

struct TimeSeriesLog {
    std::vector<LogRecord> records;

    double tick_dt() const;
    double duration() const { return static_cast<double>(records.size()) * tick_dt(); }
};

struct MetricsReport {
    std::array<double, 3> theta_errors_deg{};  // θ1E, θ2E, θ5E
    double f_e = 0.0;                          // N
    double p_e = 0.0;                          // mm
    std::array<double, 3> tau_change_pct{};    // τ1, τ2, τ5
    std::array<bool, 3> tau_change_dagger{};
    std::array<double, 4> effort_rms{};        // AD, MD, PD, BB
};

inline constexpr std::array<const char*, 4> kEffortChannels = {"AD", "MD", "PD", "BB"};

struct OptimizerSummary {
    bool triggered = false;
    double trigger_time = 0.0;
    int solves = 0;
    bool converged = true;
    bool frozen = false;
    double freeze_time = 0.0;
    double constraint_violation = 0.0;
    double objective_value = 0.0;
    std::string error;
};

struct ScenarioResult {
    TimeSeriesLog log;
    MetricsReport report;
    OptimizerSummary optimizer;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg, const HumanFollowerParams& follower);
inline ScenarioResult run_scenario(const ScenarioConfig& cfg) { return run_scenario(cfg, cfg.follower); }

/// Metrics from a log alone; throws std::invalid_argument when shorter than two windows.
MetricsReport compute_metrics(const TimeSeriesLog& log, const ScenarioConfig& cfg = {});

/// Rounds to 9 significant digits, the precision of the CSV log.
double quantize(double v);

} // namespace ergoload
