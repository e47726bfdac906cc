#include "ergoload/exoskeleton.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ergoload {

double ExoConfig::effective_load(double payload_weight) const
{
    return std::min({compensable_load, kMaxCompensableLoad, payload_weight});
}

void ExoConfig::validate() const
{
    for (double v : {a, b, c, d, forearm_weight, compensable_load, lever_length, gamma})
        if (!std::isfinite(v))
            throw std::invalid_argument("ExoConfig: non-finite parameter");
    if (a < 0.0 || b < 0.0 || c < 0.0 || d < 0.0)
        throw std::invalid_argument("ExoConfig: attachment distances must be non-negative");
    if (forearm_weight < 0.0 || compensable_load < 0.0)
        throw std::invalid_argument("ExoConfig: weights must be non-negative");
    if (!(lever_length > 0.0) || !(std::cos(gamma) > 0.0))
        throw std::invalid_argument("ExoConfig: require lever_length > 0 and cos(gamma) > 0");
}

void PidGains::validate() const
{
    if (!(kp >= 0.0) || !(ki >= 0.0) || !(kd >= 0.0))
        throw std::invalid_argument("PidGains: gains must be non-negative");
}

SeaState SeaState::at_force(double force, const SeaPlant& plant)
{
    SeaState s;
    s.elongation = std::max(0.0, force / plant.stiffness);
    s.measured_force = plant.stiffness * s.elongation;
    return s;
}

double assistive_torque(const ExoConfig& cfg, double theta5)
{
    if (!cfg.active)
        return 0.0;
    const double load_lever = cfg.b + cfg.c + cfg.d;
    const double forearm_lever = cfg.b + cfg.c;
    return std::abs(std::sin(theta5)) * (cfg.compensable_load * load_lever + cfg.forearm_weight * forearm_lever);
}

double force_reference(const ExoConfig& cfg, double theta5)
{
    const double arm = cfg.lever_length * std::cos(cfg.gamma);
    if (!(cfg.lever_length > 0.0) || !(arm > 0.0))
        throw std::invalid_argument("force_reference: require lever_length > 0 and cos(gamma) > 0");
    return assistive_torque(cfg, theta5) / arm;
}

PidOutput pid_force_step(const SeaState& state, double f_ref, const PidGains& gains, double dt, const SeaPlant& plant)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("pid_force_step: dt must be positive");

    const double e = f_ref - state.measured_force;
    PidOutput out;
    out.state = state;
    out.state.integral_error =
        std::clamp(state.integral_error + e * dt, -plant.integral_limit, plant.integral_limit);
    const double derivative = (e - state.prev_error) / dt;
    out.state.prev_error = e;

    const double u = gains.kp * e + gains.ki * out.state.integral_error + gains.kd * derivative;
    out.command_elongation = state.elongation + plant.output_scale * u;
    return out;
}

SeaState sea_plant_step(const SeaState& state, double command_elongation, double dt, const SeaPlant& plant)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("sea_plant_step: dt must be positive");
    SeaState next = state;
    const double alpha = 1.0 - std::exp(-dt / plant.time_constant);
    next.elongation = std::max(0.0, state.elongation + alpha * (command_elongation - state.elongation));
    next.measured_force = plant.stiffness * next.elongation;
    return next;
}

} // namespace ergoload
