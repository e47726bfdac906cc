#pragma once

#include <array>
#include <vector>

namespace ergoload::signal {

/// Uniformly sampled scalar channel.
struct Series {
    std::vector<double> samples;
    double rate_hz = 1.0;
};

/// Second-order IIR section, direct form II transposed, zero initial state.
struct Biquad {
    std::array<double, 3> b{};
    std::array<double, 2> a{}; // a1, a2 (a0 normalised to 1)

    std::vector<double> apply(const std::vector<double>& x) const;
};

/// Butterworth sections from the bilinear transform prewarped at fc.
Biquad butterworth_lowpass(double fc_hz, double rate_hz);
Biquad butterworth_highpass(double fc_hz, double rate_hz);

/// Throws std::invalid_argument unless 0 < fc < rate/2 and the series is non-empty.
Series highpass2(const Series& s, double fc_hz);
Series lowpass2(const Series& s, double fc_hz);

Series rectify(const Series& s);

/// sqrt(mean(x²)). Throws std::invalid_argument on an empty series.
double rms(const Series& s);
double rms(const std::vector<double>& x);

/// highpass2 -> rectify -> lowpass2 -> rms with the EMG cutoffs (0.1 Hz, 2.5 Hz).
double effort_envelope_rms(const Series& raw, double highpass_hz = 0.1, double lowpass_hz = 2.5);

} // namespace ergoload::signal
