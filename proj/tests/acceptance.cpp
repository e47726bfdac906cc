// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include "ergoload/clik.hpp"
#include "ergoload/cobot.hpp"
#include "ergoload/exoskeleton.hpp"
#include "ergoload/io.hpp"
#include "ergoload/optimizer.hpp"
#include "ergoload/scenario.hpp"
#include "ergoload/signal.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ergoload;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail)
{
    std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct TimedRun {
    ScenarioResult result;
    double seconds = 0.0;
};

TimedRun timed_run(const ScenarioConfig& cfg, const HumanFollowerParams& follower)
{
    const auto t0 = Clock::now();
    TimedRun r{run_scenario(cfg, follower), 0.0};
    r.seconds = seconds_since(t0);
    return r;
}

bool within_pct(double value, double target, double pct)
{
    return std::abs(value - target) <= pct / 100.0 * std::abs(target);
}

void tau_max_reproduction()
{
    const auto t0 = Clock::now();
    const ScenarioConfig a = preset('A');
    const JointVector tau = overload_torques(a.geometry, a.theta_init, Wrench::payload(2.0));
    const double secs = seconds_since(t0);
    const double t1 = std::abs(tau(0)), t2 = std::abs(tau(1)), t5 = std::abs(tau(4));
    const bool ok2 = within_pct(t2, 8.13, 15.0), ok5 = within_pct(t5, 7.66, 15.0);
    const bool ok1 = std::abs(t1 - 2.02) <= 0.8;
    report(1, "tau_max reproduction", ok1 && ok2 && ok5 && secs < 1.0,
           fmt("|tau1| %.3f (2.02 +/- 0.8 %s), |tau2| %.3f (8.13 +/- 15%% %s), |tau5| %.3f (7.66 +/- 15%% %s), %.4f s",
               t1, ok1 ? "ok" : "out", t2, ok2 ? "ok" : "out", t5, ok5 ? "ok" : "out", secs));
}

void exoskeleton_law()
{
    const ExoConfig cfg;
    const double tau = assistive_torque(cfg, -std::numbers::pi / 2);
    const double fr = force_reference(cfg, -std::numbers::pi / 2);
    const bool ok = std::abs(tau - 6.0) <= 1e-12 && within_pct(fr, 55.0, 10.0);
    report(2, "exoskeleton law", ok, fmt("tau_exo %.12f Nm, F_R %.3f N", tau, fr));
}

void force_loop(const std::map<char, TimedRun>& runs)
{
    bool ok = true;
    std::string detail;
    for (const auto& [id, run] : runs) {
        if (!preset(id).exo_active())
            continue;
        const bool this_ok = run.result.report.f_e <= 2.6 && run.seconds < 10.0;
        ok = ok && this_ok;
        detail += fmt("%c F_E %.3f N in %.2f s; ", id, run.result.report.f_e, run.seconds);
    }
    report(3, "force-loop fidelity", ok, detail + "limit 2.6 N, 10 s");
}

void redistribution(const std::map<char, TimedRun>& ideal)
{
    const auto& c = ideal.at('C');
    const auto& d = ideal.at('D');
    const auto& e = ideal.at('E');
    const auto pc = c.result.report.tau_change_pct;
    const auto pd = d.result.report.tau_change_pct;
    const auto pe = e.result.report.tau_change_pct;
    const bool ok_c = pc[1] <= -40.0;
    const bool ok_d = pd[0] < 0.0 && pd[1] < 0.0 && pd[1] <= -35.0;
    const bool ok_e = pe[0] >= -80.0 && pe[0] <= -30.0;
    const bool fast = c.seconds < 60.0 && d.seconds < 60.0 && e.seconds < 60.0;
    report(4, "optimizer redistribution", ok_c && ok_d && ok_e && fast,
           fmt("C tau2 %+.1f%% (%s); D tau1 %+.1f%% tau2 %+.1f%% (%s); E tau1 %+.1f%% in [-80,-30] (%s); "
               "%.2f/%.2f/%.2f s",
               pc[1], ok_c ? "ok" : "out", pd[0], pd[1], ok_d ? "ok" : "out", pe[0], ok_e ? "ok" : "out", c.seconds,
               d.seconds, e.seconds));
}

void oracle_equivalence()
{
    const ScenarioConfig c = preset('C');
    TorqueProblem p;
    p.geom = c.geometry;
    p.wrench = Wrench::payload(c.payload_kg);
    p.weights = c.weights;
    p.theta_init = c.theta_init;
    p.p_lower = c.p_lower;
    p.p_upper = c.p_upper;
    for (int i : {0, 2, 3, 5}) {
        p.theta_lower(i) = c.theta_init(i);
        p.theta_upper(i) = c.theta_init(i);
    }

    double grid = std::numeric_limits<double>::infinity();
    const double step = std::numbers::pi / 360.0;
    JointVector q = p.theta_init;
    for (double a = p.theta_lower(1); a <= p.theta_upper(1) + 1e-12; a += step)
        for (double b = p.theta_lower(4); b <= p.theta_upper(4) + 1e-12; b += step) {
            q(1) = a;
            q(4) = b;
            if (constraint_violation(p, q) <= 0.0)
                grid = std::min(grid, objective(p, q));
        }

    const SolveResult r = solve(p);
    const bool ok = std::abs(r.objective_value - grid) <= 0.05 * grid && r.constraint_violation <= 1e-6;
    report(5, "oracle equivalence", ok,
           fmt("solve %.5f vs grid %.5f (%+.2f%%), violation %.2e", r.objective_value, grid,
               100.0 * (r.objective_value - grid) / grid, r.constraint_violation));
}

void null_weight(const TimedRun& a)
{
    const ScenarioConfig cfg = preset('A');
    TorqueProblem p;
    p.geom = cfg.geometry;
    p.wrench = Wrench::payload(cfg.payload_kg);
    p.weights = cfg.weights;
    p.theta_init = cfg.theta_init;
    p.p_lower = cfg.p_lower;
    p.p_upper = cfg.p_upper;
    const SolveResult r = solve(p);

    JointVector logged;
    for (int i = 0; i < 6; ++i)
        logged(i) = quantize(cfg.theta_init(i));
    bool still = a.result.optimizer.solves == 0;
    for (const auto& rec : a.result.log.records)
        still = still && rec.avatar == logged;
    const bool exact = r.theta_opt == cfg.theta_init;
    report(6, "null-weight fixed point", exact && still,
           fmt("theta_opt %s theta_init, avatar %s over %zu ticks, %d solves", exact ? "==" : "!=",
               still ? "constant" : "moved", a.result.log.records.size(), a.result.optimizer.solves));
}

Matrix6d numeric_jacobian(const ArmGeometry& g, const JointVector& q, double h)
{
    Matrix6d J;
    for (int i = 0; i < 6; ++i) {
        JointVector qp = q, qm = q;
        qp(i) += h;
        qm(i) -= h;
        const Pose fp = forward_kinematics(g, qp), fm = forward_kinematics(g, qm);
        J.col(i).head<3>() = (fp.position - fm.position) / (2.0 * h);
        J.col(i).tail<3>() = rotation_log(fp.orientation * fm.orientation.transpose()) / (2.0 * h);
    }
    return J;
}

void jacobian_check()
{
    const ArmGeometry g;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        JointVector q;
        for (int i = 0; i < 6; ++i)
            q(i) = g.theta_lower(i) + u(rng) * (g.theta_upper(i) - g.theta_lower(i));
        const Matrix6d Ja = jacobian(g, q);
        const Matrix6d Jn = numeric_jacobian(g, q, 1e-6);
        worst = std::max(worst, (Ja - Jn).norm() / Ja.norm());
    }
    report(7, "jacobian correctness", worst < 1e-5, fmt("worst relative error %.2e over 100 configurations", worst));
}

void clik_round_trip()
{
    const ArmGeometry g;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0), pert(-0.05, 0.05);
    double worst = 0.0;
    int unconverged = 0;
    for (int k = 0; k < 100; ++k) {
        JointVector q;
        for (int i = 0; i < 6; ++i)
            q(i) = g.theta_lower(i) + u(rng) * (g.theta_upper(i) - g.theta_lower(i));
        JointVector q0 = q;
        for (int i = 0; i < 6; ++i)
            q0(i) += pert(rng);
        const ClikResult r = estimate_angles(g, frame_poses(g, q), q0);
        unconverged += r.converged ? 0 : 1;
        worst = std::max(worst, (r.q - q).lpNorm<Eigen::Infinity>());
    }
    report(8, "CLIK round trip", worst < 1e-3,
           fmt("worst |q - q*| %.2e rad, %d of 100 unconverged", worst, unconverged));
}

void cobot_tracking(const std::map<char, TimedRun>& runs)
{
    bool ok = true;
    std::string detail;
    for (const auto& [id, run] : runs) {
        ok = ok && run.result.report.p_e <= 15.0;
        detail += fmt("%c %.2f; ", id, run.result.report.p_e);
    }

    const ImpedanceGains gains;
    CobotState s;
    const Wrench push{Vector3d(6.0, -3.0, 1.2), Vector3d::Zero()};
    for (int k = 0; k < 10000; ++k)
        s = impedance_step(s, gains, push, 0.001);
    const Vector3d expected = push.force.cwiseQuotient(gains.k_trans);
    const double rel = (s.ee_pose.position - expected).norm() / expected.norm();
    ok = ok && rel <= 0.01;
    report(9, "cobot tracking", ok, "P_E mm " + detail + fmt("F/K deviation %.2e", rel));
}

void signal_pipeline()
{
    using namespace ergoload::signal;
    const Series dc{std::vector<double>(200000, 3.0), 1000.0};
    const Series hp = highpass2(dc, 0.1);
    double tail = 0.0;
    for (std::size_t i = 150000; i < hp.samples.size(); ++i)
        tail = std::max(tail, std::abs(hp.samples[i]));
    const double dc_left = tail / 3.0;

    Series sine{std::vector<double>(20000), 1000.0};
    for (std::size_t i = 0; i < sine.samples.size(); ++i)
        sine.samples[i] = std::sin(2.0 * std::numbers::pi * 25.0 * static_cast<double>(i) / 1000.0);
    const Series lp = lowpass2(sine, 2.5);
    double peak = 0.0;
    for (std::size_t i = 10000; i < lp.samples.size(); ++i)
        peak = std::max(peak, std::abs(lp.samples[i]));
    const double atten_db = -20.0 * std::log10(peak);

    Series period{std::vector<double>(1000), 1000.0};
    for (std::size_t i = 0; i < period.samples.size(); ++i)
        period.samples[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 1000.0);
    const double rms_err = std::abs(rms(period) - 1.0 / std::sqrt(2.0));

    report(10, "signal pipeline", dc_left < 1e-3 && atten_db >= 35.0 && rms_err <= 1e-6,
           fmt("DC residue %.2e, attenuation %.1f dB, rms error %.1e", dc_left, atten_db, rms_err));
}

void determinism()
{
    const ScenarioConfig cfg = preset('D');
    auto render = [&] {
        const ScenarioResult r = run_scenario(cfg);
        std::ostringstream csv;
        write_timeseries_csv(csv, r.log);
        return std::make_pair(csv.str(), report_to_json(r.report).dump(2));
    };
    const auto first = render();
    const auto second = render();
    report(11, "determinism", first == second,
           fmt("timeseries %s (%zu bytes), report %s", first.first == second.first ? "identical" : "differs",
               first.first.size(), first.second == second.second ? "identical" : "differs"));
}

} // namespace

int main()
{
    std::map<char, TimedRun> runs, ideal;
    for (char id : {'A', 'B', 'C', 'D', 'E'})
        runs.emplace(id, timed_run(preset(id), preset(id).follower));
    for (char id : {'C', 'D', 'E'})
        ideal.emplace(id, timed_run(preset(id), HumanFollowerParams::ideal()));

    tau_max_reproduction();
    exoskeleton_law();
    force_loop(runs);
    redistribution(ideal);
    oracle_equivalence();
    null_weight(runs.at('A'));
    jacobian_check();
    clik_round_trip();
    cobot_tracking(runs);
    signal_pipeline();
    determinism();

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
