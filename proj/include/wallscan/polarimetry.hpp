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
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wallscan/fft.hpp"
#include "wallscan/waveform.hpp"

namespace wallscan
{

// ------------------------------------------------------------------------
// Fresnel reflection at a wall / target boundary
// ------------------------------------------------------------------------

/// Co- and cross-polarized reflection coefficients together with the media
/// and angles they were computed for. Refractive indices use the N = n + j k
/// convention; the refraction angle is complex in general.
struct FresnelPair
{
    cplx gamma_p;     ///< co-polarization coefficient
    cplx gamma_s;     ///< cross-polarization coefficient
    cplx n_wall;      ///< N_0
    cplx n_target;    ///< N_s
    double incidence; ///< phi_0 [rad]
    cplx refraction;  ///< phi_s [rad]
};

/// Reflection coefficients for incidence angle `incidence` in [0, pi/2).
///
///   gamma_p = (N_s cos phi_0 - N_0 cos phi_s) / (N_s cos phi_0 + N_0 cos phi_s)
///   gamma_s = (N_0 cos phi_0 - N_s cos phi_s) / (N_0 cos phi_0 + N_s cos phi_s)
///
/// with sin phi_0 / sin phi_s = N_s / N_0. cos phi_s takes the branch with
/// Im(cos phi_s) >= 0 so the transmitted wave decays into the target.
inline FresnelPair fresnel(cplx n_wall, cplx n_target, double incidence)
{
    if (n_wall == cplx{} || n_target == cplx{})
        throw std::invalid_argument("fresnel: refractive indices must be nonzero");
    if (!(incidence >= 0.0 && incidence < std::numbers::pi / 2))
        throw std::invalid_argument("fresnel: incidence angle must lie in [0, pi/2)");

    const cplx sin_s = n_wall * std::sin(incidence) / n_target;
    // 1 - sin_s^2 written without cancellation near grazing incidence.
    const double s0 = std::sin(incidence), c0 = std::cos(incidence);
    const cplx contrast = (n_target * n_target - n_wall * n_wall) / (n_target * n_target);
    cplx cos_s = std::sqrt(c0 * c0 + contrast * s0 * s0);
    // Principal root (Re >= 0); on the evanescent branch take the decaying sign.
    if (cos_s.real() == 0.0 && cos_s.imag() < 0.0)
        cos_s = -cos_s;
    const double cos_0 = c0;

    FresnelPair out;
    out.gamma_p = (n_target * cos_0 - n_wall * cos_s) / (n_target * cos_0 + n_wall * cos_s);
    out.gamma_s = (n_wall * cos_0 - n_target * cos_s) / (n_wall * cos_0 + n_target * cos_s);
    out.n_wall = n_wall;
    out.n_target = n_target;
    out.incidence = incidence;
    out.refraction = std::asin(sin_s);
    return out;
}

// ------------------------------------------------------------------------
// Material classes
// ------------------------------------------------------------------------

enum class Material : std::uint8_t
{
    NonCorrodedRebar = 0,
    CorrodedRebar = 1,
    NonLeakedPvc = 2,
    LeakedPvc = 3,
    Custom = 4,
};

inline constexpr std::size_t kMaterialClasses = 4; // Custom is not a training class

inline constexpr std::string_view to_string(Material m)
{
    switch (m)
    {
    case Material::NonCorrodedRebar: return "non_corroded_rebar";
    case Material::CorrodedRebar: return "corroded_rebar";
    case Material::NonLeakedPvc: return "non_leaked_pvc";
    case Material::LeakedPvc: return "leaked_pvc";
    case Material::Custom: return "custom";
    }
    return "custom";
}

inline Material material_from_string(std::string_view s)
{
    for (auto m : {Material::NonCorrodedRebar, Material::CorrodedRebar, Material::NonLeakedPvc, Material::LeakedPvc,
                   Material::Custom})
        if (to_string(m) == s)
            return m;
    throw std::invalid_argument("unknown material: " + std::string(s));
}

/// Simulation parameters of a material class. These are tunable knobs for
/// the synthetic generator, not measured constants.
struct MaterialProperties
{
    cplx reflectivity;       ///< base scaling of the echo
    cplx refractive_index;   ///< N_s
    double dispersion_slope; ///< envelope broadening [s/Hz], i.e. ns/GHz * 1e-18
};

inline MaterialProperties default_material_properties(Material m)
{
    constexpr double ns_per_ghz = 1e-18;
    switch (m)
    {
    case Material::NonCorrodedRebar: return {{1.0, 0.0}, {40.0, 40.0}, 0.0};
    case Material::CorrodedRebar: return {{0.8, 0.0}, {12.0, 6.0}, 0.03 * ns_per_ghz};
    case Material::NonLeakedPvc: return {{1.0, 0.0}, {1.7, 0.01}, 0.01 * ns_per_ghz};
    case Material::LeakedPvc: return {{1.0, 0.0}, {9.0, 1.5}, 0.06 * ns_per_ghz};
    case Material::Custom: break;
    }
    return {{1.0, 0.0}, {3.0, 0.0}, 0.0};
}

// ------------------------------------------------------------------------
// Training records for material identification
// ------------------------------------------------------------------------

inline constexpr std::size_t kSequenceLength = 1120;

enum class WallType : std::uint8_t
{
    Drywall = 0,
    Brick = 1,
    Concrete = 2,
};

/// Nuisance condition of a recording: wall type x depth bucket x water content.
struct Environment
{
    WallType wall = WallType::Concrete;
    std::uint8_t depth_bucket = 0; ///< 0: 3-5 cm, 1: 5-7.5 cm, 2: 7.5-10 cm
    bool wet = false;

    static constexpr int kCount = 3 * 3 * 2;

    int id() const noexcept { return static_cast<int>(wall) * 6 + depth_bucket * 2 + (wet ? 1 : 0); }

    static Environment from_id(int id)
    {
        if (id < 0 || id >= kCount)
            throw std::invalid_argument("environment id out of range");
        return {static_cast<WallType>(id / 6), static_cast<std::uint8_t>((id % 6) / 2), (id % 2) == 1};
    }

    bool operator==(const Environment &) const = default;
};

/// Dual-polarization sequence pair around one detected target. Labels are -1
/// when unknown (e.g. sequences extracted from a measured scan).
struct PolSample
{
    std::vector<float> co_pol;
    std::vector<float> cross_pol;
    int material = -1;
    int environment = -1;

    void validate() const
    {
        if (co_pol.size() != kSequenceLength || cross_pol.size() != kSequenceLength)
            throw std::invalid_argument("PolSample: sequences must have length " + std::to_string(kSequenceLength));
        for (std::size_t i = 0; i < kSequenceLength; ++i)
            if (!std::isfinite(co_pol[i]) || !std::isfinite(cross_pol[i]))
                throw std::invalid_argument("PolSample: non-finite sample");
    }

    bool operator==(const PolSample &) const = default;
};

// ------------------------------------------------------------------------
// Spectral division and dispersion descriptors
// ------------------------------------------------------------------------

/// Transmitted RF pulse centred on sample 0 and wrapped circularly, so that
/// a copy delayed by m samples is a pure linear phase in the DFT domain.
inline std::vector<double> circular_reference_pulse(const WaveformConfig &wf, std::size_t n)
{
    std::vector<double> x(n);
    const double two_var = 2.0 * wf.sigma() * wf.sigma();
    const double w = 2.0 * std::numbers::pi * wf.carrier();
    const auto nn = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t k = 0; k < nn; ++k)
    {
        const std::ptrdiff_t signed_k = (k < (nn + 1) / 2) ? k : k - nn;
        const double t = static_cast<double>(signed_k) / wf.sample_rate();
        x[static_cast<std::size_t>(k)] = wf.amplitude() * std::exp(-t * t / two_var) * std::cos(w * t);
    }
    return x;
}

/// Reflection coefficient per positive-frequency bin.
struct ReflectionSpectrum
{
    std::vector<double> frequency; ///< Hz, bins 0..N/2
    std::vector<cplx> gamma;       ///< zero on invalid bins
    std::vector<bool> valid;       ///< |X(f)| > 5% of max |X|

    std::size_t valid_count() const { return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true)); }
};

/// Gamma(f) = Echo(f) / X(f) with X the spectrum of the transmitted pulse.
/// Division is restricted to bins where |X| exceeds 5% of its peak.
inline ReflectionSpectrum estimate_reflection_spectrum(std::span<const double> echo, const WaveformConfig &wf)
{
    const std::size_t n = echo.size();
    if (n < 2)
        throw std::invalid_argument("estimate_reflection_spectrum: echo too short");

    const auto ref = circular_reference_pulse(wf, n);
    std::vector<cplx> e(echo.begin(), echo.end());
    std::vector<cplx> x(ref.begin(), ref.end());
    fft(e);
    fft(x);

    double peak = 0.0;
    for (std::size_t k = 0; k <= n / 2; ++k)
        peak = std::max(peak, std::abs(x[k]));

    ReflectionSpectrum out;
    const std::size_t bins = n / 2 + 1;
    out.frequency.resize(bins);
    out.gamma.assign(bins, cplx{});
    out.valid.assign(bins, false);
    for (std::size_t k = 0; k < bins; ++k)
    {
        out.frequency[k] = static_cast<double>(k) * wf.sample_rate() / static_cast<double>(n);
        if (std::abs(x[k]) > 0.05 * peak)
        {
            out.valid[k] = true;
            out.gamma[k] = e[k] / x[k];
        }
    }
    return out;
}

/// Envelope |analytic signal| of a real sequence.
inline std::vector<double> envelope(std::span<const double> x)
{
    const std::size_t n = x.size();
    std::vector<cplx> a(x.begin(), x.end());
    fft(a);
    for (std::size_t k = 1; k < n; ++k)
    {
        if (2 * k < n)
            a[k] *= 2.0;
        else if (2 * k > n)
            a[k] = 0.0;
    }
    ifft(a);
    std::vector<double> env(n);
    for (std::size_t k = 0; k < n; ++k)
        env[k] = std::abs(a[k]);
    return env;
}

/// Width of the region around the maximum where `env` stays above peak/sqrt(2),
/// with linear interpolation at both crossings, in samples.
inline double half_power_width(std::span<const double> env)
{
    const auto peak_it = std::max_element(env.begin(), env.end());
    const auto p = static_cast<std::size_t>(peak_it - env.begin());
    const double level = *peak_it / std::numbers::sqrt2;

    double left = 0.0;
    std::size_t i = p;
    while (i > 0 && env[i - 1] >= level)
        --i;
    if (i > 0)
        left = static_cast<double>(i) - (env[i] - level) / (env[i] - env[i - 1]);
    else
        left = 0.0;

    double right = static_cast<double>(env.size() - 1);
    std::size_t j = p;
    while (j + 1 < env.size() && env[j + 1] >= level)
        ++j;
    if (j + 1 < env.size())
        right = static_cast<double>(j) + (env[j] - level) / (env[j] - env[j + 1]);
    return right - left;
}

struct DispersionFeatures
{
    double width;             ///< envelope -3 dB width [s]
    double spectral_centroid; ///< power-weighted mean frequency [Hz]
    double spectral_skewness; ///< standardized third moment of the power spectrum
};

/// Time- and frequency-domain dispersion descriptors of an echo. Throws when
/// the envelope peak does not exceed five times its median.
inline DispersionFeatures dispersion_features(std::span<const double> echo, const WaveformConfig &wf)
{
    if (echo.size() < 4)
        throw std::invalid_argument("dispersion_features: echo too short");
    const auto env = envelope(echo);
    std::vector<double> sorted = env;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double peak = *std::max_element(env.begin(), env.end());
    if (!(peak > 5.0 * median))
        throw std::invalid_argument("dispersion_features: no detectable pulse");

    DispersionFeatures f{};
    f.width = half_power_width(env) / wf.sample_rate();

    const std::size_t n = echo.size();
    std::vector<cplx> spec(echo.begin(), echo.end());
    fft(spec);
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t k = 0; k <= n / 2; ++k)
    {
        const double p = std::norm(spec[k]);
        const double fk = static_cast<double>(k) * wf.sample_rate() / static_cast<double>(n);
        w0 += p;
        w1 += p * fk;
    }
    const double mean = w1 / w0;
    double m2 = 0.0, m3 = 0.0;
    for (std::size_t k = 0; k <= n / 2; ++k)
    {
        const double p = std::norm(spec[k]) / w0;
        const double d = static_cast<double>(k) * wf.sample_rate() / static_cast<double>(n) - mean;
        m2 += p * d * d;
        m3 += p * d * d * d;
    }
    f.spectral_centroid = mean;
    f.spectral_skewness = m3 / std::pow(m2, 1.5);
    return f;
}

} // namespace wallscan
