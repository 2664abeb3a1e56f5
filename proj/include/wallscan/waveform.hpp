// SPDX-License-Identifier: Apache-2.0
//
// wallscan - in-wall impulse radar imaging and material analysis toolkit
// Copyright (C) 2026 The wallscan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wallscan
{

/// Vacuum speed of light [m/s].
inline constexpr double kSpeedOfLight = 299792458.0;

/// Transmitted impulse: a Gaussian envelope on a carrier.
///
/// The envelope width follows from the -10 dB two-sided bandwidth of the
/// power spectrum: |S(f)|^2 ~ exp(-(2 pi f sigma)^2) drops by 10 dB at
/// f = B/2, hence sigma = sqrt(ln 10) / (pi B).
class WaveformConfig
{
public:
    static constexpr double kDefaultAmplitude = 1.0;
    static constexpr double kDefaultCarrier = 7.29e9;
    static constexpr double kDefaultBandwidth = 1.5e9;
    static constexpr double kDefaultSampleRate = 23.328e9;

    WaveformConfig() : WaveformConfig(kDefaultAmplitude, kDefaultCarrier, kDefaultBandwidth, kDefaultSampleRate) {}

    /// Throws std::invalid_argument for non-positive parameters or when the
    /// sample rate does not exceed 2 (f_c + B/2).
    WaveformConfig(double amplitude, double carrier_hz, double bandwidth_hz, double sample_rate_hz)
        : amplitude_(amplitude), carrier_(carrier_hz), bandwidth_(bandwidth_hz), sample_rate_(sample_rate_hz)
    {
        if (!(amplitude > 0.0) || !std::isfinite(amplitude))
            throw std::invalid_argument("WaveformConfig: amplitude must be > 0");
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw std::invalid_argument("WaveformConfig: carrier must be > 0");
        if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
            throw std::invalid_argument("WaveformConfig: bandwidth must be > 0");
        if (!(sample_rate_hz > nyquist_rate()) || !std::isfinite(sample_rate_hz))
            throw std::invalid_argument("WaveformConfig: sample rate " + std::to_string(sample_rate_hz) +
                                        " Hz violates Nyquist limit " + std::to_string(nyquist_rate()) + " Hz");
    }

    double amplitude() const noexcept { return amplitude_; }
    double carrier() const noexcept { return carrier_; }
    double bandwidth() const noexcept { return bandwidth_; }
    double sample_rate() const noexcept { return sample_rate_; }
    double sample_period() const noexcept { return 1.0 / sample_rate_; }
    double sigma() const noexcept { return std::sqrt(std::numbers::ln10) / (std::numbers::pi * bandwidth_); }

    /// Lowest admissible sample rate, 2 (f_c + B/2).
    double nyquist_rate() const noexcept { return 2.0 * (carrier_ + 0.5 * bandwidth_); }

    bool operator==(const WaveformConfig &) const = default;

private:
    double amplitude_;
    double carrier_;
    double bandwidth_;
    double sample_rate_;
};

namespace detail
{
// Returns the spacing of `t`; throws if it is not uniform to 1e-6 relative.
inline double axis_spacing(std::span<const double> t)
{
    if (t.size() < 2)
        throw std::invalid_argument("time axis needs at least two samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(dt > 0.0))
        throw std::invalid_argument("time axis must be strictly increasing");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt)
            throw std::invalid_argument("time axis is not uniform");
    return dt;
}

// The axis must be sampled at 1/f_s of the waveform.
inline void require_rate(std::span<const double> t, const WaveformConfig &cfg)
{
    const double dt = axis_spacing(t);
    if (1.0 / dt <= cfg.nyquist_rate())
        throw std::invalid_argument("time axis sample rate violates Nyquist for f_c + B/2");
    if (std::abs(dt * cfg.sample_rate() - 1.0) > 1e-6)
        throw std::invalid_argument("time axis spacing does not match 1/f_s");
}
} // namespace detail

/// t_k = k / f_s, k = 0..n-1 (receive window starting at the transmit instant).
inline std::vector<double> causal_time_axis(const WaveformConfig &cfg, std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = static_cast<double>(k) / cfg.sample_rate();
    return t;
}

/// t_k = (k - n/2) / f_s; t = 0 falls on sample n/2.
inline std::vector<double> centered_time_axis(const WaveformConfig &cfg, std::size_t n)
{
    std::vector<double> t(n);
    const auto half = static_cast<double>(n / 2);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = (static_cast<double>(k) - half) / cfg.sample_rate();
    return t;
}

/// Baseband pulse s(t) = a exp(-t^2 / (2 sigma^2)) on a uniform axis.
inline std::vector<double> gaussian_pulse(const WaveformConfig &cfg, std::span<const double> t)
{
    const double dt = detail::axis_spacing(t);
    // t = 0 must coincide with a sample
    const double offset = t.front() / dt;
    if (std::abs(offset - std::round(offset)) > 1e-6)
        throw std::invalid_argument("gaussian_pulse: t = 0 is not on the sample grid");

    const double two_var = 2.0 * cfg.sigma() * cfg.sigma();
    std::vector<double> s(t.size());
    for (std::size_t k = 0; k < t.size(); ++k)
        s[k] = cfg.amplitude() * std::exp(-t[k] * t[k] / two_var);
    return s;
}

/// x(t) = s(t) cos(2 pi f_c t).
inline std::vector<double> modulate(std::span<const double> s, std::span<const double> t, const WaveformConfig &cfg)
{
    if (s.size() != t.size())
        throw std::invalid_argument("modulate: signal and time axis differ in length");
    detail::require_rate(t, cfg);
    std::vector<double> x(s.size());
    const double w = 2.0 * std::numbers::pi * cfg.carrier();
    for (std::size_t k = 0; k < s.size(); ++k)
        x[k] = s[k] * std::cos(w * t[k]);
    return x;
}

/// Low-pass FIR used by the quadrature demodulator: 129-tap windowed sinc,
/// Hamming window, unit DC gain. The cutoff sits at 1.5 B so the Gaussian
/// skirts survive; at exactly B the envelope error near 10% of peak is ~2%.
inline std::vector<double> demodulation_filter(const WaveformConfig &cfg)
{
    constexpr std::size_t taps = 129;
    constexpr double mid = (taps - 1) / 2.0;
    const double fc_norm = 1.5 * cfg.bandwidth() / cfg.sample_rate(); // cycles per sample
    std::vector<double> h(taps);
    double sum = 0.0;
    for (std::size_t k = 0; k < taps; ++k)
    {
        const double n = static_cast<double>(k) - mid;
        const double sinc = (n == 0.0) ? 2.0 * fc_norm
                                       : std::sin(2.0 * std::numbers::pi * fc_norm * n) / (std::numbers::pi * n);
        const double hamming = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / (taps - 1));
        h[k] = sinc * hamming;
        sum += h[k];
    }
    for (auto &v : h)
        v /= sum;
    return h;
}

/// Complex baseband: LPF{ 2 x(t) exp(-j 2 pi f_c t) }. The filter is applied
/// zero-phase (group delay removed) with zeros outside the record.
inline std::vector<std::complex<double>> demodulate(std::span<const double> x, std::span<const double> t,
                                                    const WaveformConfig &cfg)
{
    if (x.size() != t.size())
        throw std::invalid_argument("demodulate: signal and time axis differ in length");
    detail::require_rate(t, cfg);

    const double w = 2.0 * std::numbers::pi * cfg.carrier();
    std::vector<std::complex<double>> mixed(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        mixed[k] = 2.0 * x[k] * std::polar(1.0, -w * t[k]);

    const auto h = demodulation_filter(cfg);
    const auto half = static_cast<std::ptrdiff_t>(h.size() / 2);
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    std::vector<std::complex<double>> out(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i)
    {
        std::complex<double> acc{};
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
        for (std::ptrdiff_t j = lo; j <= hi; ++j)
            acc += h[static_cast<std::size_t>(j - i + half)] * mixed[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

} // namespace wallscan
