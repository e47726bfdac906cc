#include "ergoload/scenario.hpp"
#include "ergoload/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ergoload {

namespace {

// Synthetic surface-EMG channels. Activation scales a fixed-seed carrier so
// the effort numbers depend on the log alone.
constexpr double kEmgTorqueScale = 10.0; // Nm at full activation
constexpr double kEmgTonic = 0.02;
constexpr double kEmgOffset = 0.1;       // electrode DC, removed by the high-pass
constexpr std::uint64_t kEmgSeed = 0x5eed;

double activation(const LogRecord& r, int channel)
{
    switch (channel) {
    case 0: return std::max(r.tau(1), 0.0);   // AD: flexion load
    case 1: return std::max(r.tau(0), 0.0);   // MD: abduction load
    case 2: return std::max(-r.tau(1), 0.0);  // PD: extension load
    default: return std::max(r.tau5_net, 0.0); // BB
    }
}

double window_mean(const std::vector<LogRecord>& recs, std::size_t begin, std::size_t end, auto&& value)
{
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i)
        acc += value(recs[i]);
    return acc / static_cast<double>(end - begin);
}

} // namespace

MetricsReport compute_metrics(const TimeSeriesLog& log, const ScenarioConfig& cfg)
{
    const auto& recs = log.records;
    if (recs.size() < 2)
        throw std::invalid_argument("compute_metrics: log needs at least two records");
    const double dt = log.tick_dt();
    if (!(dt > 0.0))
        throw std::invalid_argument("compute_metrics: time is not increasing");
    if (log.duration() + 0.5 * dt < 2.0 * cfg.metrics_window_s)
        throw std::invalid_argument("compute_metrics: log shorter than two metric windows");

    const std::size_t n = recs.size();
    const auto w = std::min(n / 2, static_cast<std::size_t>(std::lround(cfg.metrics_window_s / dt)));
    const std::size_t last = n - w;

    MetricsReport rep;
    const LogRecord& final_rec = recs.back();
    for (std::size_t j = 0; j < kTrackedJoints.size(); ++j) {
        const int i = kTrackedJoints[j];
        const double mean_q = window_mean(recs, last, n, [i](const LogRecord& r) { return r.theta(i); });
        rep.theta_errors_deg[j] = rad2deg(std::abs(mean_q - final_rec.avatar(i)));

        auto torque = [i](const LogRecord& r) { return std::abs(i == 4 ? r.tau5_net : r.tau(i)); };
        const double first_mean = window_mean(recs, 0, w, torque);
        const double last_mean = window_mean(recs, last, n, torque);
        const bool dagger = std::abs(first_mean) < cfg.dagger_threshold;
        const double denom = dagger ? last_mean : first_mean;
        rep.tau_change_dagger[j] = dagger;
        rep.tau_change_pct[j] = denom == 0.0 ? 0.0 : 100.0 * (last_mean - first_mean) / denom;
    }

    double f_acc = 0.0;
    Vector3d p_acc = Vector3d::Zero();
    for (const auto& r : recs) {
        const double e = r.force_ref - r.force_measured;
        f_acc += e * e;
        p_acc += (r.ee - r.ref).cwiseAbs2();
    }
    rep.f_e = std::sqrt(f_acc / static_cast<double>(n));
    // per-axis RMS, then RMS across axes; metres to mm
    rep.p_e = 1e3 * std::sqrt((p_acc / static_cast<double>(n)).mean());

    Rng carrier_rng(kEmgSeed);
    std::normal_distribution<double> carrier(0.0, 1.0);
    for (int ch = 0; ch < 4; ++ch) {
        signal::Series raw{std::vector<double>(n), 1.0 / dt};
        for (std::size_t k = 0; k < n; ++k) {
            const double a = activation(recs[k], ch) / kEmgTorqueScale + kEmgTonic;
            raw.samples[k] = kEmgOffset + a * carrier(carrier_rng);
        }
        rep.effort_rms[ch] = signal::effort_envelope_rms(raw);
    }
    return rep;
}

} // namespace ergoload
