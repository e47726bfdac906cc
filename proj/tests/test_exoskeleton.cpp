#include "ergoload/exoskeleton.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace ergoload;

TEST_CASE("support torque at a horizontal forearm")
{
    const ExoConfig cfg;
    // 10 N * 0.30 m + 20 N * 0.15 m
    CHECK(assistive_torque(cfg, -std::numbers::pi / 2) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(force_reference(cfg, -std::numbers::pi / 2) == doctest::Approx(6.0 / 0.109).epsilon(1e-12));
    CHECK(force_reference(cfg, -std::numbers::pi / 2) == doctest::Approx(55.0).epsilon(0.10));
}

TEST_CASE("support torque follows |sin| and is bounded by its peak")
{
    const ExoConfig cfg;
    CHECK(assistive_torque(cfg, 0.0) == 0.0);
    for (double th = -3.0; th <= 3.0; th += 0.1) {
        CHECK(assistive_torque(cfg, th) == doctest::Approx(assistive_torque(cfg, -th)));
        CHECK(assistive_torque(cfg, th) <= 6.0 + 1e-12);
    }
    ExoConfig off = cfg;
    off.active = false;
    CHECK(assistive_torque(off, -1.0) == 0.0);
    CHECK(force_reference(off, -1.0) == 0.0);
}

TEST_CASE("compensable load is capped by the device and the payload")
{
    ExoConfig cfg;
    CHECK(cfg.effective_load(19.62) == 10.0);
    CHECK(cfg.effective_load(5.0) == 5.0);
    cfg.compensable_load = 30.0;
    CHECK(cfg.effective_load(100.0) == ExoConfig::kMaxCompensableLoad);
}

TEST_CASE("force reference rejects a degenerate lever")
{
    ExoConfig cfg;
    cfg.lever_length = 0.0;
    CHECK_THROWS_AS(force_reference(cfg, -1.0), std::invalid_argument);
    cfg = ExoConfig{};
    cfg.gamma = 2.0; // cos(gamma) < 0
    CHECK_THROWS_AS(force_reference(cfg, -1.0), std::invalid_argument);
}

TEST_CASE("PID output is an elongation increment")
{
    const SeaPlant plant;
    const SeaState s = SeaState::at_force(40.0, plant);
    CHECK(s.measured_force == doctest::Approx(40.0));
    const PidOutput zero = pid_force_step(s, 40.0, PidGains{}, 0.001, plant);
    CHECK(zero.command_elongation == doctest::Approx(s.elongation));

    const PidGains p_only{1.0, 0.0, 0.0};
    const PidOutput up = pid_force_step(s, 50.0, p_only, 0.001, plant);
    CHECK(up.command_elongation - s.elongation == doctest::Approx(10.0 * plant.output_scale));
}

TEST_CASE("closed loop settles on a constant reference")
{
    const SeaPlant plant;
    SeaState s;
    double worst_after_5s = 0.0;
    for (int k = 1; k <= 30000; ++k) {
        const PidOutput o = pid_force_step(s, 55.0, PidGains{}, 0.001, plant);
        s = sea_plant_step(o.state, o.command_elongation, 0.001, plant);
        if (k >= 5000)
            worst_after_5s = std::max(worst_after_5s, std::abs(55.0 - s.measured_force));
    }
    CHECK(worst_after_5s < 2.0);
    // integral action removes the error entirely
    CHECK(s.measured_force == doctest::Approx(55.0).epsilon(1e-3));
}

TEST_CASE("anti-windup clamp holds the integral")
{
    SeaPlant plant;
    plant.integral_limit = 1.0;
    SeaState s;
    for (int k = 0; k < 100; ++k)
        s = pid_force_step(s, 1000.0, PidGains{}, 0.01, plant).state;
    CHECK(s.integral_error == doctest::Approx(1.0));
}

TEST_CASE("plant is an exact first-order lag and never compresses the spring")
{
    const SeaPlant plant;
    SeaState s;
    s = sea_plant_step(s, 0.01, plant.time_constant, plant);
    CHECK(s.elongation == doctest::Approx(0.01 * (1.0 - std::exp(-1.0))));
    s = sea_plant_step(s, -1.0, 1.0, plant);
    CHECK(s.elongation == 0.0);
    CHECK(s.measured_force == 0.0);
    CHECK_THROWS_AS(sea_plant_step(s, 0.0, 0.0, plant), std::invalid_argument);
}
