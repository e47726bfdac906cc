#include "ergoload/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ergoload::signal {

std::vector<double> Biquad::apply(const std::vector<double>& x) const
{
    std::vector<double> y(x.size());
    double z1 = 0.0, z2 = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double out = b[0] * x[n] + z1;
        z1 = b[1] * x[n] - a[0] * out + z2;
        z2 = b[2] * x[n] - a[1] * out;
        y[n] = out;
    }
    return y;
}

namespace {

void check_cutoff(double fc_hz, double rate_hz)
{
    if (!(rate_hz > 0.0))
        throw std::invalid_argument("filter: sampling rate must be positive");
    if (!(fc_hz > 0.0) || !(fc_hz < 0.5 * rate_hz))
        throw std::invalid_argument("filter: cutoff must lie in (0, Nyquist)");
}

struct Prewarped {
    double k2, norm, a1, a2;
};

Prewarped prewarp(double fc_hz, double rate_hz)
{
    const double k = std::tan(std::numbers::pi * fc_hz / rate_hz);
    const double k2 = k * k;
    const double norm = 1.0 + std::numbers::sqrt2 * k + k2;
    return {k2, norm, 2.0 * (k2 - 1.0) / norm, (1.0 - std::numbers::sqrt2 * k + k2) / norm};
}

} // namespace

Biquad butterworth_lowpass(double fc_hz, double rate_hz)
{
    check_cutoff(fc_hz, rate_hz);
    const auto p = prewarp(fc_hz, rate_hz);
    const double b0 = p.k2 / p.norm;
    return {{b0, 2.0 * b0, b0}, {p.a1, p.a2}};
}

Biquad butterworth_highpass(double fc_hz, double rate_hz)
{
    check_cutoff(fc_hz, rate_hz);
    const auto p = prewarp(fc_hz, rate_hz);
    const double b0 = 1.0 / p.norm;
    return {{b0, -2.0 * b0, b0}, {p.a1, p.a2}};
}

Series highpass2(const Series& s, double fc_hz)
{
    if (s.samples.empty())
        throw std::invalid_argument("highpass2: empty series");
    return {butterworth_highpass(fc_hz, s.rate_hz).apply(s.samples), s.rate_hz};
}

Series lowpass2(const Series& s, double fc_hz)
{
    if (s.samples.empty())
        throw std::invalid_argument("lowpass2: empty series");
    return {butterworth_lowpass(fc_hz, s.rate_hz).apply(s.samples), s.rate_hz};
}

Series rectify(const Series& s)
{
    Series out{s.samples, s.rate_hz};
    for (double& v : out.samples)
        v = std::abs(v);
    return out;
}

double rms(const std::vector<double>& x)
{
    if (x.empty())
        throw std::invalid_argument("rms: empty series");
    double acc = 0.0;
    for (double v : x)
        acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

double rms(const Series& s) { return rms(s.samples); }

double effort_envelope_rms(const Series& raw, double highpass_hz, double lowpass_hz)
{
    return rms(lowpass2(rectify(highpass2(raw, highpass_hz)), lowpass_hz));
}

} // namespace ergoload::signal
