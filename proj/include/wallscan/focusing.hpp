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
#include <stdexcept>
#include <vector>

#include "wallscan/fft.hpp"
#include "wallscan/matrix.hpp"
#include "wallscan/scene.hpp"
#include "wallscan/waveform.hpp"

namespace wallscan
{

/// Magnitude image in the moving-depth domain; row i is x = origin_x + i * dx,
/// column n is z = origin_depth + n * dz.
struct FocusedImage
{
    Matrix<float> data;
    double dx = 0.0;
    double dz = 0.0;
    double origin_depth = 0.0;
    double origin_x = 0.0;

    std::size_t nx() const noexcept { return data.rows(); }
    std::size_t nz() const noexcept { return data.cols(); }
    double x_at(double row) const noexcept { return origin_x + row * dx; }
    double z_at(double col) const noexcept { return origin_depth + col * dz; }

    void validate() const
    {
        if (data.rows() < 1 || data.cols() < 1)
            throw std::invalid_argument("FocusedImage: empty");
        if (!(dx > 0.0) || !(dz > 0.0))
            throw std::invalid_argument("FocusedImage: spacings must be > 0");
        for (float v : data.flat())
            if (!std::isfinite(v) || v < 0.0f)
                throw std::invalid_argument("FocusedImage: entries must be finite and >= 0");
    }

    bool operator==(const FocusedImage &) const = default;
};

/// R(kappa_x, omega): 2-D spectrum of a range-compressed B-scan. Both axes
/// are in DFT order; omega is the absolute (RF) angular frequency.
struct SpectrumMatrix
{
    Matrix<cplx> data;
    std::vector<double> kx;    ///< [rad/m], one per row
    std::vector<double> omega; ///< [rad/s], one per column
};

/// Pixel lattice for back-projection.
struct ImageGrid
{
    double x0 = 0.0;
    double dx = 0.0;
    std::size_t nx = 0;
    double z0 = 0.0;
    double dz = 0.0;
    std::size_t nz = 0;
};

struct FocusOptions
{
    /// Range-compression regularization, relative to the peak replica power.
    double regularization = 0.01;
    /// Hann taper across the aperture before focusing.
    bool hann_taper = false;
};

// ------------------------------------------------------------------------
// Range compression
// ------------------------------------------------------------------------

/// Complex baseband range compression. Each trace is taken to its analytic
/// spectrum, weighted by the regularized matched filter
/// H = S / (S^2 + eta max S^2) with S(f) = exp(-2 pi^2 sigma^2 (f - f_c)^2)
/// the pulse spectrum around the carrier, and shifted to baseband. The
/// transform spans the record, so delays are circular: a point echo at delay
/// tau lands on sample round(tau f_s), and a pulse centred on sample 0 wraps
/// its leading half onto the end of the record.
inline Matrix<cplx> range_compress(const BScan &b, const WaveformConfig &wf, double regularization = 0.01)
{
    b.validate();
    if (std::abs(b.sample_rate() / wf.sample_rate() - 1.0) > 1e-9)
        throw std::invalid_argument("range_compress: scan sample rate differs from waveform sample rate");
    if (!(regularization > 0.0))
        throw std::invalid_argument("range_compress: regularization must be > 0");

    const std::size_t nt = b.samples();
    const double fs = wf.sample_rate();
    const double a = 2.0 * std::numbers::pi * std::numbers::pi * wf.sigma() * wf.sigma();

    // analytic-signal weights folded into the filter: 1 at DC and Nyquist,
    // 2 on positive bins, 0 on negative ones
    std::vector<double> h(nt, 0.0);
    for (std::size_t k = 0; 2 * k <= nt; ++k)
    {
        const double df = static_cast<double>(k) * fs / static_cast<double>(nt) - wf.carrier();
        const double s = std::exp(-a * df * df);
        const double fold = (k == 0 || 2 * k == nt) ? 1.0 : 2.0;
        h[k] = fold * s / (s * s + regularization);
    }

    const double w = 2.0 * std::numbers::pi * wf.carrier() / fs;
    std::vector<cplx> shift(nt);
    for (std::size_t k = 0; k < nt; ++k)
        shift[k] = std::polar(1.0, -w * static_cast<double>(k));

    Matrix<cplx> out(b.columns(), nt);
    std::vector<cplx> buf(nt);
    for (std::size_t i = 0; i < b.columns(); ++i)
    {
        const auto row = b.data.row(i);
        std::copy(row.begin(), row.end(), buf.begin());
        fft(buf);
        for (std::size_t k = 0; k < nt; ++k)
            buf[k] *= h[k];
        ifft(buf);
        auto dst = out.row(i);
        for (std::size_t k = 0; k < nt; ++k)
            dst[k] = buf[k] * shift[k];
    }
    return out;
}

// ------------------------------------------------------------------------
// Range migration (omega-k)
// ------------------------------------------------------------------------

namespace detail
{
inline void validate_focus_parameters(double permittivity, double speed)
{
    if (!(permittivity >= 1.0) || !std::isfinite(permittivity))
        throw std::invalid_argument("focusing: permittivity must be >= 1");
    if (!(speed > 0.0) || !std::isfinite(speed))
        throw std::invalid_argument("focusing: probe speed must be > 0");
}

inline void hann_taper(Matrix<cplx> &m)
{
    const std::size_t n = m.rows();
    if (n < 2)
        return;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / (n - 1));
        for (auto &v : m.row(i))
            v *= w;
    }
}
} // namespace detail

/// 2-D DFT of a (zero-padded) range-compressed matrix, with axes labelled.
inline SpectrumMatrix wavenumber_spectrum(const Matrix<cplx> &compressed, double dx, const WaveformConfig &wf,
                                          std::size_t rows_padded, std::size_t cols_padded)
{
    SpectrumMatrix out;
    out.data = Matrix<cplx>(rows_padded, cols_padded);
    for (std::size_t i = 0; i < compressed.rows(); ++i)
        std::copy(compressed.row(i).begin(), compressed.row(i).end(), out.data.row(i).begin());
    fft2(out.data);

    out.kx.resize(rows_padded);
    for (std::size_t r = 0; r < rows_padded; ++r)
        out.kx[r] = 2.0 * std::numbers::pi * fft_frequency(r, rows_padded, dx);
    out.omega.resize(cols_padded);
    for (std::size_t c = 0; c < cols_padded; ++c)
        out.omega[c] =
            2.0 * std::numbers::pi * (wf.carrier() + fft_frequency(c, cols_padded, 1.0 / wf.sample_rate()));
    return out;
}

/// Stolt mapping: resamples every kappa_x row from omega onto a uniform
/// kappa_z grid through omega = (c/2) sqrt(kappa_x^2 + kappa_z^2), by linear
/// interpolation in omega. Evanescent and out-of-band cells are zeroed.
/// kappa_z = 4 pi f_c / c + 2 pi m / (N dz) with dz = c / (2 f_s), so the
/// inverse DFT over m lands on depth samples z_n = n dz.
inline Matrix<cplx> stolt_map(const SpectrumMatrix &spec, double wave_speed, const WaveformConfig &wf)
{
    const std::size_t rows = spec.data.rows();
    const std::size_t cols = spec.data.cols();
    const double fs = wf.sample_rate();
    const double dz = wave_speed / (2.0 * fs);
    const double kz_centre = 4.0 * std::numbers::pi * wf.carrier() / wave_speed;
    const double omega_max = 2.0 * std::numbers::pi * (wf.carrier() + 0.5 * fs);
    const double kx_limit = 2.0 * omega_max / wave_speed;
    const auto ncols = static_cast<double>(cols);

    Matrix<cplx> out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
    {
        const double kx = spec.kx[r];
        if (kx * kx > kx_limit * kx_limit)
            continue;
        const auto in = spec.data.row(r);
        auto dst = out.row(r);
        for (std::size_t m = 0; m < cols; ++m)
        {
            const double kz = kz_centre + 2.0 * std::numbers::pi * fft_frequency(m, cols, dz);
            if (kz <= 0.0)
                continue;
            const double omega = 0.5 * wave_speed * std::sqrt(kx * kx + kz * kz);
            const double pos = (omega / (2.0 * std::numbers::pi) - wf.carrier()) * ncols / fs; // signed bin
            if (pos < -0.5 * ncols || pos >= 0.5 * ncols - 1.0)
                continue;
            const double base = std::floor(pos);
            const double frac = pos - base;
            const auto wrap = [&](double k) {
                const auto i = static_cast<std::ptrdiff_t>(k);
                return static_cast<std::size_t>(i < 0 ? i + static_cast<std::ptrdiff_t>(cols) : i);
            };
            dst[m] = (1.0 - frac) * in[wrap(base)] + frac * in[wrap(base + 1.0)];
        }
    }
    return out;
}

/// Range migration focusing: range compression, 2-D FFT, Stolt mapping,
/// inverse 2-D FFT, magnitude. `permittivity` and `speed` are the caller's
/// estimates; the column spacing is taken as speed / frame_rate.
inline FocusedImage rma(const BScan &b, double permittivity, double speed, const FocusOptions &opts = {})
{
    detail::validate_focus_parameters(permittivity, speed);
    b.validate();
    const WaveformConfig &wf = b.waveform;
    const double c = kSpeedOfLight / std::sqrt(permittivity);
    const double dx = speed / b.frame_rate;

    auto compressed = range_compress(b, wf, opts.regularization);
    if (opts.hann_taper)
        detail::hann_taper(compressed);

    const std::size_t nx = b.columns();
    const std::size_t nt = b.samples();
    const auto spec = wavenumber_spectrum(compressed, dx, wf, next_pow2(nx), next_pow2(2 * nt));
    auto focused = stolt_map(spec, c, wf);
    ifft2(focused);

    FocusedImage img;
    img.dx = dx;
    img.dz = c / (2.0 * wf.sample_rate());
    img.data = Matrix<float>(nx, nt);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t n = 0; n < nt; ++n)
            img.data(i, n) = static_cast<float>(std::abs(focused(i, n)));
    return img;
}

// ------------------------------------------------------------------------
// Time-domain back-projection
// ------------------------------------------------------------------------

/// Grid matching the RMA output of `b` for the given parameter estimates.
inline ImageGrid default_grid(const BScan &b, double permittivity, double speed)
{
    detail::validate_focus_parameters(permittivity, speed);
    const double c = kSpeedOfLight / std::sqrt(permittivity);
    return {0.0, speed / b.frame_rate, b.columns(), 0.0, c / (2.0 * b.sample_rate()), b.samples()};
}

/// Delay-and-sum focusing: every pixel coherently accumulates the
/// range-compressed trace of each probe position at the two-way delay to
/// that pixel, with carrier phase exp(j 2 pi f_c t) restored.
inline FocusedImage backproject(const BScan &b, double permittivity, double speed, const ImageGrid &grid,
                                const FocusOptions &opts = {})
{
    detail::validate_focus_parameters(permittivity, speed);
    b.validate();
    if (grid.nx < 1 || grid.nz < 1 || !(grid.dx > 0.0) || !(grid.dz > 0.0))
        throw std::invalid_argument("backproject: invalid image grid");

    const WaveformConfig &wf = b.waveform;
    const double c = kSpeedOfLight / std::sqrt(permittivity);
    const double dx = speed / b.frame_rate;
    const double fs = wf.sample_rate();
    const double w = 2.0 * std::numbers::pi * wf.carrier();

    auto compressed = range_compress(b, wf, opts.regularization);
    if (opts.hann_taper)
        detail::hann_taper(compressed);
    const std::size_t nx = b.columns();
    const std::size_t nt = b.samples();

    const auto sample = [&](std::size_t j, double t) -> cplx {
        const double pos = t * fs;
        if (!(pos >= 0.0) || pos >= static_cast<double>(nt - 1))
            return {};
        const auto k = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(k);
        const auto row = compressed.row(j);
        return ((1.0 - frac) * row[k] + frac * row[k + 1]) * std::polar(1.0, w * t);
    };

    FocusedImage img;
    img.dx = grid.dx;
    img.dz = grid.dz;
    img.origin_depth = grid.z0;
    img.origin_x = grid.x0;
    img.data = Matrix<float>(grid.nx, grid.nz);

    // On the probe lattice the delay depends only on |column offset| and
    // depth, so the geometry is tabulated once.
    const double lattice = grid.x0 / dx;
    const bool on_lattice = std::abs(grid.dx - dx) <= 1e-12 * dx && std::abs(lattice - std::round(lattice)) < 1e-9;
    if (on_lattice)
    {
        const auto first = static_cast<std::ptrdiff_t>(std::llround(lattice));
        const auto last = first + static_cast<std::ptrdiff_t>(grid.nx) - 1;
        const auto span = static_cast<std::size_t>(
            std::max(std::abs(last), std::abs(static_cast<std::ptrdiff_t>(nx) - 1 - first)) + 1);
        Matrix<double> delay(span, grid.nz);
        for (std::size_t d = 0; d < span; ++d)
            for (std::size_t n = 0; n < grid.nz; ++n)
            {
                const double ox = static_cast<double>(d) * dx;
                const double z = grid.z0 + static_cast<double>(n) * grid.dz;
                delay(d, n) = 2.0 / c * std::sqrt(ox * ox + z * z);
            }
        for (std::size_t i = 0; i < grid.nx; ++i)
        {
            const std::ptrdiff_t pixel_col = first + static_cast<std::ptrdiff_t>(i);
            for (std::size_t n = 0; n < grid.nz; ++n)
            {
                cplx acc{};
                for (std::size_t j = 0; j < nx; ++j)
                {
                    const auto off = static_cast<std::size_t>(std::abs(static_cast<std::ptrdiff_t>(j) - pixel_col));
                    acc += sample(j, delay(off, n));
                }
                img.data(i, n) = static_cast<float>(std::abs(acc));
            }
        }
        return img;
    }

    for (std::size_t i = 0; i < grid.nx; ++i)
    {
        const double x = grid.x0 + static_cast<double>(i) * grid.dx;
        for (std::size_t n = 0; n < grid.nz; ++n)
        {
            const double z = grid.z0 + static_cast<double>(n) * grid.dz;
            cplx acc{};
            for (std::size_t j = 0; j < nx; ++j)
            {
                const double ox = static_cast<double>(j) * dx - x;
                acc += sample(j, 2.0 / c * std::sqrt(ox * ox + z * z));
            }
            img.data(i, n) = static_cast<float>(std::abs(acc));
        }
    }
    return img;
}

// ------------------------------------------------------------------------
// Image measures
// ------------------------------------------------------------------------

/// Shannon entropy (nats) of the image intensity |I|^2 normalized to unit
/// sum; lower means more concentrated energy. A single bright pixel gives 0,
/// a uniform N-pixel image ln N.
inline double image_entropy(const FocusedImage &img)
{
    double total = 0.0;
    for (float v : img.data.flat())
        total += static_cast<double>(v) * static_cast<double>(v);
    if (!(total > 0.0))
        throw std::invalid_argument("image_entropy: image is all zero");
    double h = 0.0;
    for (float v : img.data.flat())
    {
        const double p = static_cast<double>(v) * static_cast<double>(v) / total;
        if (p > 0.0)
            h -= p * std::log(p);
    }
    return h;
}

struct ImagePeak
{
    std::size_t row = 0; ///< x index
    std::size_t col = 0; ///< z index
    double x = 0.0;
    double z = 0.0;
    double value = 0.0;
};

inline ImagePeak image_argmax(const FocusedImage &img)
{
    ImagePeak p;
    const auto flat = img.data.flat();
    const auto it = std::max_element(flat.begin(), flat.end());
    const auto idx = static_cast<std::size_t>(it - flat.begin());
    p.row = idx / img.nz();
    p.col = idx % img.nz();
    p.x = img.x_at(static_cast<double>(p.row));
    p.z = img.z_at(static_cast<double>(p.col));
    p.value = *it;
    return p;
}

} // namespace wallscan
