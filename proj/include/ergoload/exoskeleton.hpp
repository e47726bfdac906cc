#pragma once

namespace ergoload {

/// Elbow exoskeleton attachment and load parameters (SI units).
struct ExoConfig {
    double a = 0.050; // brace to first forearm anchor
    double b = 0.100; // elbow frame to fixed attachments
    double c = 0.050; // b + c: forearm centre of mass
    double d = 0.150; // b + c + d: lever of the held load
    double forearm_weight = 20.0;    // W_a [N]
    double compensable_load = 10.0;  // W_l [N], capped at kMaxCompensableLoad
    double lever_length = 0.109;     // cable moment arm L [m]
    double gamma = 0.0;              // cable deviation angle [rad]
    bool active = true;

    static constexpr double kMaxCompensableLoad = 10.0;

    /// Compensable load after the device cap and the actual payload weight.
    double effective_load(double payload_weight) const;

    void validate() const;
};

struct PidGains {
    double kp = 0.1;
    double ki = 6.0;
    double kd = 0.002;

    void validate() const;
};

/// Bungee/ball-screw stand-in: first-order actuator driving a linear spring.
struct SeaPlant {
    double stiffness = 2000.0;       // N/m
    double time_constant = 0.05;     // s
    double integral_limit = 500.0;   // N*s, anti-windup clamp
    double output_scale = 1e-3;      // m of elongation per unit PID output (PID output in mm)
};

struct SeaState {
    double elongation = 0.0;     // m, >= 0
    double integral_error = 0.0; // N*s
    double prev_error = 0.0;     // N
    double measured_force = 0.0; // F_M [N]

    /// Pretensioned at a given force.
    static SeaState at_force(double force, const SeaPlant& plant = {});
};

struct PidOutput {
    double command_elongation = 0.0;
    SeaState state;
};

/// Support torque magnitude |sin θ5| (W_l (b+c+d) + W_a (b+c)); zero when inactive.
/// Uses cfg.compensable_load as given (apply effective_load beforehand).
double assistive_torque(const ExoConfig& cfg, double theta5);

/// Cable force reference τ_Exo / (L cos γ). Throws std::invalid_argument if L <= 0 or cos γ <= 0.
double force_reference(const ExoConfig& cfg, double theta5);

/// Positional PID on e = f_ref - F_M. The output is an elongation increment
/// added to the current elongation.
PidOutput pid_force_step(const SeaState& state, double f_ref, const PidGains& gains, double dt,
                         const SeaPlant& plant = {});

SeaState sea_plant_step(const SeaState& state, double command_elongation, double dt, const SeaPlant& plant = {});

} // namespace ergoload
