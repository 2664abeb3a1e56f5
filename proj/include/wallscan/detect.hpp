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
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wallscan/focusing.hpp"
#include "wallscan/matrix.hpp"
#include "wallscan/polarimetry.hpp"
#include "wallscan/scene.hpp"

namespace wallscan
{

struct CfarConfig
{
    std::size_t training = 8; ///< training cells per side
    std::size_t guard = 6;    ///< guard cells per side, about one focused spot radius
    double pfa = 1e-4;        ///< design probability of false alarm

    void validate() const
    {
        if (training < 1)
            throw std::invalid_argument("CfarConfig: need at least one training cell");
        if (!(pfa > 0.0 && pfa < 1.0))
            throw std::invalid_argument("CfarConfig: pfa must lie in (0, 1)");
    }

    /// Cells in the square training ring around the cell under test.
    std::size_t training_cells() const
    {
        const std::size_t outer = 2 * (training + guard) + 1;
        const std::size_t inner = 2 * guard + 1;
        return outer * outer - inner * inner;
    }

    /// alpha = N (pfa^(-1/N) - 1): exact for exponentially distributed power.
    double threshold_factor() const
    {
        const auto n = static_cast<double>(training_cells());
        return n * (std::pow(pfa, -1.0 / n) - 1.0);
    }
};

struct Detection
{
    double x = 0.0;      ///< x_e [m]
    double z = 0.0;      ///< z_e [m]
    double peak = 0.0;   ///< peak magnitude in the cluster
    double snr_db = 0.0; ///< peak power over the local training mean
    std::size_t cells = 0;
};

/// Cells whose power |I|^2 exceeds alpha times the mean power of their
/// training ring. Cells closer than training + guard to the border are not
/// tested.
inline Matrix<unsigned char> cfar_mask(const FocusedImage &img, const CfarConfig &cfg,
                                       Matrix<double> *noise_level = nullptr)
{
    cfg.validate();
    const std::size_t reach = cfg.training + cfg.guard;
    const std::size_t nx = img.nx(), nz = img.nz();
    if (nx <= 2 * reach + 1 || nz <= 2 * reach + 1)
        throw std::invalid_argument("cfar_detect: image smaller than the CFAR window");

    // summed-area table of the power, one guard row/column of zeros
    Matrix<double> sat(nx + 1, nz + 1);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t k = 0; k < nz; ++k)
        {
            const double p = static_cast<double>(img.data(i, k)) * img.data(i, k);
            sat(i + 1, k + 1) = p + sat(i, k + 1) + sat(i + 1, k) - sat(i, k);
        }
    const auto box = [&](std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1) {
        return sat(r1 + 1, c1 + 1) - sat(r0, c1 + 1) - sat(r1 + 1, c0) + sat(r0, c0);
    };

    const double alpha = cfg.threshold_factor();
    const auto n_train = static_cast<double>(cfg.training_cells());
    Matrix<unsigned char> mask(nx, nz, 0);
    if (noise_level)
        *noise_level = Matrix<double>(nx, nz, 0.0);
    for (std::size_t i = reach; i + reach < nx; ++i)
        for (std::size_t k = reach; k + reach < nz; ++k)
        {
            const double outer = box(i - reach, k - reach, i + reach, k + reach);
            const double inner = box(i - cfg.guard, k - cfg.guard, i + cfg.guard, k + cfg.guard);
            const double mean = (outer - inner) / n_train;
            const double p = static_cast<double>(img.data(i, k)) * img.data(i, k);
            if (noise_level)
                (*noise_level)(i, k) = mean;
            if (p > alpha * mean)
                mask(i, k) = 1;
        }
    return mask;
}

/// Two-dimensional cell-averaging CFAR. Exceedances are grouped by
/// 8-connectivity; every group becomes one detection at its
/// magnitude-weighted centroid. Sorted by decreasing peak magnitude.
inline std::vector<Detection> cfar_detect(const FocusedImage &img, const CfarConfig &cfg = {})
{
    Matrix<double> noise;
    auto mask = cfar_mask(img, cfg, &noise);
    const std::size_t nx = img.nx(), nz = img.nz();

    std::vector<Detection> out;
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t k = 0; k < nz; ++k)
        {
            if (mask(i, k) != 1)
                continue;
            double wsum = 0.0, wr = 0.0, wc = 0.0, peak = -1.0, peak_noise = 0.0;
            std::size_t cells = 0;
            stack.assign(1, {i, k});
            mask(i, k) = 2;
            while (!stack.empty())
            {
                const auto [r, c] = stack.back();
                stack.pop_back();
                const double m = img.data(r, c);
                wsum += m;
                wr += m * static_cast<double>(r);
                wc += m * static_cast<double>(c);
                ++cells;
                if (m > peak)
                {
                    peak = m;
                    peak_noise = noise(r, c);
                }
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc)
                    {
                        const auto rr = static_cast<std::ptrdiff_t>(r) + dr;
                        const auto cc = static_cast<std::ptrdiff_t>(c) + dc;
                        if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(nx) ||
                            cc >= static_cast<std::ptrdiff_t>(nz))
                            continue;
                        auto &flag = mask(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                        if (flag == 1)
                        {
                            flag = 2;
                            stack.emplace_back(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                        }
                    }
            }
            Detection d;
            d.x = img.x_at(wr / wsum);
            d.z = img.z_at(wc / wsum);
            d.peak = peak;
            d.cells = cells;
            d.snr_db = peak_noise > 0.0 ? 10.0 * std::log10(peak * peak / peak_noise)
                                        : std::numeric_limits<double>::max();
            out.push_back(d);
        }
    std::sort(out.begin(), out.end(), [](const Detection &a, const Detection &b) { return a.peak > b.peak; });
    return out;
}

/// (|x_e - x_a|, |z_e - z_a|)
inline std::pair<double, double> localization_error(const Detection &d, const Target &truth)
{
    return {std::abs(d.x - truth.x), std::abs(d.z - truth.z)};
}

/// Index of the target closest to the detection, or -1 when there is none.
inline std::ptrdiff_t nearest_target(const Detection &d, const std::vector<Target> &targets)
{
    std::ptrdiff_t best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < targets.size(); ++i)
    {
        const double ex = d.x - targets[i].x, ez = d.z - targets[i].z;
        const double d2 = ex * ex + ez * ez;
        if (d2 < best_d2)
        {
            best_d2 = d2;
            best = static_cast<std::ptrdiff_t>(i);
        }
    }
    return best;
}

struct Extraction
{
    PolSample sample;
    std::size_t column = 0;
    bool clamped = false; ///< the search window was cut at the scan border
};

/// Picks, among columns within +-window of the detection, the one with the
/// largest co-polarized energy and returns both channels at that column,
/// cropped or zero-padded to kSequenceLength samples. Labels are taken from
/// the scan provenance when available.
inline Extraction extract_sequence(const BScan &co, const BScan &cross, const Detection &d, std::size_t window = 10)
{
    co.validate();
    cross.validate();
    if (co.columns() != cross.columns() || co.samples() != cross.samples() || co.dx != cross.dx ||
        co.sample_rate() != cross.sample_rate())
        throw std::invalid_argument("extract_sequence: channels do not share axes");

    const double pos = d.x / co.dx;
    if (!(pos > -0.5) || pos >= static_cast<double>(co.columns()) - 0.5)
        throw std::invalid_argument("extract_sequence: detection outside the scan");
    const auto centre = static_cast<std::ptrdiff_t>(std::llround(pos));
    const auto last = static_cast<std::ptrdiff_t>(co.columns()) - 1;
    const auto w = static_cast<std::ptrdiff_t>(window);

    Extraction out;
    std::ptrdiff_t lo = centre - w, hi = centre + w;
    if (lo < 0 || hi > last)
    {
        out.clamped = true;
        lo = std::max<std::ptrdiff_t>(lo, 0);
        hi = std::min(hi, last);
    }

    double best = 0.0;
    std::ptrdiff_t best_col = -1;
    for (std::ptrdiff_t c = lo; c <= hi; ++c)
    {
        double e = 0.0;
        for (float v : co.data.row(static_cast<std::size_t>(c)))
            e += static_cast<double>(v) * v;
        if (e > best)
        {
            best = e;
            best_col = c;
        }
    }
    if (best_col < 0)
        throw std::invalid_argument("extract_sequence: no signal in the search window");

    out.column = static_cast<std::size_t>(best_col);
    const auto take = [&](const BScan &b) {
        std::vector<float> seq(kSequenceLength, 0.0f);
        const auto row = b.data.row(out.column);
        std::copy_n(row.begin(), std::min(row.size(), kSequenceLength), seq.begin());
        return seq;
    };
    out.sample.co_pol = take(co);
    out.sample.cross_pol = take(cross);
    if (co.provenance && !co.provenance->scene.targets.empty())
    {
        const auto idx = nearest_target(d, co.provenance->scene.targets);
        const auto m = co.provenance->scene.targets[static_cast<std::size_t>(idx)].material;
        if (m != Material::Custom)
            out.sample.material = static_cast<int>(m);
    }
    return out;
}

} // namespace wallscan
