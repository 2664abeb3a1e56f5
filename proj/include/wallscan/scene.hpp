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

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "wallscan/matrix.hpp"
#include "wallscan/polarimetry.hpp"
#include "wallscan/waveform.hpp"

namespace wallscan
{

/// Point scatterer buried in the wall.
struct Target
{
    double x = 0.0; ///< horizontal position [m]
    double z = 0.0; ///< depth below the surface [m]
    Material material = Material::NonCorrodedRebar;
    cplx reflectivity{1.0, 0.0};
    cplx refractive_index{40.0, 40.0};
    double dispersion_slope = 0.0; ///< [s/Hz]

    /// Target with the default simulation parameters of its material class.
    static Target make(Material m, double x, double z)
    {
        const auto p = default_material_properties(m);
        return {x, z, m, p.reflectivity, p.refractive_index, p.dispersion_slope};
    }

    bool operator==(const Target &) const = default;
};

struct Scene
{
    double permittivity = 9.0;          ///< relative permittivity of the wall
    double attenuation_db_per_m = 50.0; ///< one-way loss at f_c
    std::vector<Target> targets;

    /// c = c_0 / sqrt(eps)
    double wave_speed() const { return kSpeedOfLight / std::sqrt(permittivity); }
    double refractive_index() const { return std::sqrt(permittivity); }

    void validate() const
    {
        if (!(permittivity >= 1.0) || !std::isfinite(permittivity))
            throw std::invalid_argument("Scene: permittivity must be >= 1");
        if (!(attenuation_db_per_m >= 0.0) || !std::isfinite(attenuation_db_per_m))
            throw std::invalid_argument("Scene: attenuation must be >= 0");
        for (std::size_t i = 0; i < targets.size(); ++i)
        {
            const auto &t = targets[i];
            if (!(t.z > 0.0) || !std::isfinite(t.z) || !std::isfinite(t.x))
                throw std::invalid_argument("Scene: target depth must be > 0");
            if (std::abs(t.reflectivity) > 1.0 + 1e-12)
                throw std::invalid_argument("Scene: |reflectivity| must be <= 1");
            if (t.refractive_index == cplx{})
                throw std::invalid_argument("Scene: target refractive index must be nonzero");
            if (!(t.dispersion_slope >= 0.0))
                throw std::invalid_argument("Scene: dispersion slope must be >= 0");
            for (std::size_t j = 0; j < i; ++j)
                if (targets[j].x == t.x && targets[j].z == t.z)
                    throw std::invalid_argument("Scene: duplicate target position");
        }
    }

    bool operator==(const Scene &) const = default;
};

struct ScanConfig
{
    double speed = 0.02;             ///< probe speed v [m/s]
    double frame_rate = 40.0;        ///< frames per second
    double scan_length = 0.4;        ///< [m]
    double noise_std = 0.0;          ///< additive Gaussian noise, signal units
    std::uint64_t seed = 0;          ///< noise and jitter seed
    std::size_t range_samples = 512; ///< N_t
    double speed_jitter = 0.0;       ///< relative std of the per-column step, 0 = steady hand

    double dx() const { return speed / frame_rate; }

    /// N_x = floor(scan_length / dx)
    std::size_t columns() const
    {
        return static_cast<std::size_t>(std::floor(scan_length / dx() + 1e-9));
    }

    void validate() const
    {
        if (!(speed > 0.0) || !std::isfinite(speed))
            throw std::invalid_argument("ScanConfig: speed must be > 0");
        if (!(frame_rate > 0.0) || !std::isfinite(frame_rate))
            throw std::invalid_argument("ScanConfig: frame rate must be > 0");
        if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
            throw std::invalid_argument("ScanConfig: noise std must be >= 0");
        if (range_samples < 1)
            throw std::invalid_argument("ScanConfig: range_samples must be >= 1");
        if (!(speed_jitter >= 0.0) || !std::isfinite(speed_jitter))
            throw std::invalid_argument("ScanConfig: speed jitter must be >= 0");
        if (!(scan_length >= dx()))
            throw std::invalid_argument("ScanConfig: scan length shorter than one step");
    }

    bool operator==(const ScanConfig &) const = default;
};

enum class Channel : std::uint8_t
{
    CoPol = 0,
    CrossPol = 1,
};

inline constexpr std::string_view to_string(Channel c) { return c == Channel::CoPol ? "co" : "cross"; }

inline Channel channel_from_string(std::string_view s)
{
    if (s == "co")
        return Channel::CoPol;
    if (s == "cross")
        return Channel::CrossPol;
    throw std::invalid_argument("unknown channel: " + std::string(s));
}

/// Generator state of a synthetic scan.
struct Provenance
{
    Scene scene;
    ScanConfig scan;
    bool operator==(const Provenance &) const = default;
};

/// 2-D signal matrix r(x, t): row i is the A-scan recorded at probe
/// position i, column k the range sample at t = k / f_s.
struct BScan
{
    Matrix<float> data;
    Channel channel = Channel::CoPol;
    double dx = 0.0;         ///< nominal column spacing [m]
    double frame_rate = 40.0;
    WaveformConfig waveform;
    std::optional<Provenance> provenance;

    std::size_t columns() const noexcept { return data.rows(); }
    std::size_t samples() const noexcept { return data.cols(); }
    double sample_rate() const noexcept { return waveform.sample_rate(); }

    void validate() const
    {
        if (data.rows() < 1 || data.cols() < 1)
            throw std::invalid_argument("BScan: empty matrix");
        if (!(dx > 0.0) || !(frame_rate > 0.0))
            throw std::invalid_argument("BScan: dx and frame rate must be > 0");
        for (float v : data.flat())
            if (!std::isfinite(v))
                throw std::invalid_argument("BScan: non-finite entry");
    }

    bool operator==(const BScan &) const = default;
};

// ------------------------------------------------------------------------

/// Two-way travel time along the hyperbola (2/c) sqrt((x - x0)^2 + z0^2).
inline double echo_delay(const Target &target, double probe_x, const Scene &scene)
{
    const double dx = probe_x - target.x;
    return 2.0 / scene.wave_speed() * std::sqrt(dx * dx + target.z * target.z);
}

/// |gamma_p| (co) or |gamma_s| (cross) at the geometric incidence angle seen
/// from `probe_x`; both reduce to the normal-incidence value at the apex.
inline double polarization_gain(const Target &target, double probe_x, const Scene &scene, Channel channel)
{
    const double incidence = std::atan2(std::abs(probe_x - target.x), target.z);
    const auto f = fresnel(cplx{scene.refractive_index(), 0.0}, target.refractive_index, incidence);
    return channel == Channel::CoPol ? std::abs(f.gamma_p) : std::abs(f.gamma_s);
}

/// Complex echo scaling: reflectivity x polarization gain x spherical
/// spreading 1/r x two-way wall loss.
inline cplx echo_amplitude(const Target &target, double probe_x, const Scene &scene, Channel channel)
{
    const double dx = probe_x - target.x;
    const double r = std::sqrt(dx * dx + target.z * target.z);
    const double loss = std::pow(10.0, -scene.attenuation_db_per_m * 2.0 * r / 20.0);
    return target.reflectivity * polarization_gain(target, probe_x, scene, channel) * loss / r;
}

/// Envelope width of the echo from `target`, broadened by its dispersion.
inline double echo_sigma(const Target &target, const WaveformConfig &wf)
{
    return wf.sigma() + target.dispersion_slope * wf.bandwidth();
}

namespace detail
{
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream per (seed, purpose, index).
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index)
{
    return std::mt19937_64(splitmix64(splitmix64(seed ^ (purpose * 0xd1b54a32d192ed03ULL)) + index));
}

inline constexpr std::uint64_t kNoiseCo = 1;
inline constexpr std::uint64_t kNoiseCross = 2;
inline constexpr std::uint64_t kJitter = 3;
} // namespace detail

/// One received trace: sum over targets of beta_k' s(t - tau_k) cos(2 pi f_c
/// (t - tau_k)) plus white Gaussian noise. `stream` selects the noise stream
/// (the column index inside a B-scan).
inline std::vector<double> synthesize_ascan(const Scene &scene, double probe_x, const ScanConfig &cfg,
                                            const WaveformConfig &wf, Channel channel, std::uint64_t stream = 0)
{
    scene.validate();
    cfg.validate();
    const std::size_t n = cfg.range_samples;
    const double fs = wf.sample_rate();
    const double w = 2.0 * std::numbers::pi * wf.carrier();
    std::vector<double> out(n, 0.0);

    for (const auto &target : scene.targets)
    {
        const double tau = echo_delay(target, probe_x, scene);
        const cplx beta = echo_amplitude(target, probe_x, scene, channel) * wf.amplitude();
        const double sigma = echo_sigma(target, wf);
        const double two_var = 2.0 * sigma * sigma;
        // the envelope is below 1e-13 of its peak outside +-8 sigma
        const double lo = std::max(0.0, std::ceil((tau - 8.0 * sigma) * fs));
        const double hi = std::min(static_cast<double>(n) - 1.0, std::floor((tau + 8.0 * sigma) * fs));
        for (double kk = lo; kk <= hi; kk += 1.0)
        {
            const double dt = kk / fs - tau;
            const double env = std::exp(-dt * dt / two_var);
            const double phase = w * dt;
            out[static_cast<std::size_t>(kk)] += env * (beta.real() * std::cos(phase) - beta.imag() * std::sin(phase));
        }
    }

    if (cfg.noise_std > 0.0)
    {
        auto rng = detail::stream_rng(cfg.seed, channel == Channel::CoPol ? detail::kNoiseCo : detail::kNoiseCross,
                                      stream);
        std::normal_distribution<double> noise(0.0, cfg.noise_std);
        for (auto &v : out)
            v += noise(rng);
    }
    return out;
}

/// Probe positions x_i. With jitter off these are exactly i * dx; otherwise
/// every step is dx (1 + jitter * N(0,1)), floored at zero.
inline std::vector<double> probe_positions(const ScanConfig &cfg)
{
    const std::size_t nx = cfg.columns();
    std::vector<double> x(nx, 0.0);
    const double dx = cfg.dx();
    if (cfg.speed_jitter == 0.0)
    {
        for (std::size_t i = 0; i < nx; ++i)
            x[i] = static_cast<double>(i) * dx;
        return x;
    }
    auto rng = detail::stream_rng(cfg.seed, detail::kJitter, 0);
    std::normal_distribution<double> step(0.0, cfg.speed_jitter);
    for (std::size_t i = 1; i < nx; ++i)
        x[i] = x[i - 1] + dx * std::max(0.0, 1.0 + step(rng));
    return x;
}

/// Stacks A-scans recorded at every probe position into a B-scan.
inline BScan synthesize_bscan(const Scene &scene, const ScanConfig &cfg, const WaveformConfig &wf, Channel channel)
{
    scene.validate();
    cfg.validate();
    const auto xs = probe_positions(cfg);

    BScan b;
    b.data = Matrix<float>(xs.size(), cfg.range_samples);
    b.channel = channel;
    b.dx = cfg.dx();
    b.frame_rate = cfg.frame_rate;
    b.waveform = wf;
    b.provenance = Provenance{scene, cfg};
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        const auto trace = synthesize_ascan(scene, xs[i], cfg, wf, channel, i);
        auto row = b.data.row(i);
        for (std::size_t k = 0; k < trace.size(); ++k)
            row[k] = static_cast<float>(trace[k]);
    }
    return b;
}

/// Noise std giving the requested per-sample SNR, 20 log10(A / sigma), where
/// A is the strongest apex echo amplitude in the co-polarized channel.
inline double noise_std_for_snr(const Scene &scene, const WaveformConfig &wf, double snr_db)
{
    double peak = 0.0;
    for (const auto &t : scene.targets)
        peak = std::max(peak, std::abs(echo_amplitude(t, t.x, scene, Channel::CoPol)) * wf.amplitude());
    return peak / std::pow(10.0, snr_db / 20.0);
}

} // namespace wallscan
