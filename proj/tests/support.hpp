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

// Monte Carlo helpers shared by the unit tests and the acceptance run.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "wallscan/focusing.hpp"

namespace wallscan::testing
{

/// Magnitude of circular complex Gaussian noise with unit mean power, so the
/// per-cell power is exponential with mean 1.
inline FocusedImage rayleigh_image(std::size_t nx, std::size_t nz, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    FocusedImage img;
    img.dx = 0.001;
    img.dz = 0.001;
    img.data = Matrix<float>(nx, nz);
    for (auto &v : img.data.flat())
    {
        const double re = g(rng), im = g(rng);
        v = static_cast<float>(std::hypot(re, im));
    }
    return img;
}

/// Complex noise plus a Gaussian point response of the given peak power
/// relative to the noise power, added coherently at (row, col).
inline FocusedImage point_in_noise(std::size_t nx, std::size_t nz, std::size_t row, std::size_t col,
                                   double snr_db, std::uint64_t seed, double spread = 1.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    const double amp = std::pow(10.0, snr_db / 20.0);
    FocusedImage img;
    img.dx = 0.001;
    img.dz = 0.001;
    img.data = Matrix<float>(nx, nz);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t k = 0; k < nz; ++k)
        {
            const double di = static_cast<double>(i) - static_cast<double>(row);
            const double dk = static_cast<double>(k) - static_cast<double>(col);
            const double s = amp * std::exp(-(di * di + dk * dk) / (2.0 * spread * spread));
            const double re = g(rng) + s, im = g(rng);
            img.data(i, k) = static_cast<float>(std::hypot(re, im));
        }
    return img;
}

/// Two-sided Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(double successes, double trials, double z = 1.959963984540054)
{
    const double p = successes / trials;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * trials)) / (1.0 + z2 / trials);
    const double half = z * std::sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / (1.0 + z2 / trials);
    return {centre - half, centre + half};
}

} // namespace wallscan::testing
