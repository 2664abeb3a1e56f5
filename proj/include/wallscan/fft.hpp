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

// Thin FFTW wrapper. Plans are created once per transform shape and cached;
// executing a cached plan on new arrays is thread-safe, plan creation is not,
// so the cache is guarded by a mutex.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "wallscan/matrix.hpp"

namespace wallscan
{
using cplx = std::complex<double>;

namespace detail
{
struct PlanDeleter
{
    void operator()(fftw_plan_s *p) const noexcept { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// (length, batch, stride, distance, sign)
using PlanKey = std::tuple<int, int, int, int, int>;

inline std::mutex &plan_mutex()
{
    static std::mutex m;
    return m;
}

inline fftw_plan plan_for(const PlanKey &key)
{
    static std::map<PlanKey, PlanHandle> cache;
    std::lock_guard lock(plan_mutex());
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second.get();

    const auto [n, howmany, stride, dist, sign] = key;
    const std::size_t span = static_cast<std::size_t>((n - 1) * stride + (howmany - 1) * dist + 1);
    std::vector<cplx> scratch(span);
    auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
    int len = n;
    fftw_plan p = fftw_plan_many_dft(1, &len, howmany, buf, nullptr, stride, dist, buf, nullptr, stride, dist, sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, PlanHandle(p));
    return p;
}

inline void run(cplx *data, int n, int howmany, int stride, int dist, bool inverse)
{
    if (n <= 0 || howmany <= 0)
        return;
    fftw_plan p = plan_for({n, howmany, stride, dist, inverse ? FFTW_BACKWARD : FFTW_FORWARD});
    auto *buf = reinterpret_cast<fftw_complex *>(data);
    fftw_execute_dft(p, buf, buf);
    if (inverse)
    {
        const double scale = 1.0 / n;
        for (int b = 0; b < howmany; ++b)
            for (int k = 0; k < n; ++k)
                data[static_cast<std::size_t>(b * dist + k * stride)] *= scale;
    }
}
} // namespace detail

/// Forward DFT in place: X[k] = sum_n x[n] exp(-j 2 pi k n / N).
inline void fft(std::span<cplx> x)
{
    detail::run(x.data(), static_cast<int>(x.size()), 1, 1, 1, false);
}

/// Inverse DFT in place, scaled by 1/N so that ifft(fft(x)) == x.
inline void ifft(std::span<cplx> x)
{
    detail::run(x.data(), static_cast<int>(x.size()), 1, 1, 1, true);
}

/// Transforms every row (contiguous axis) of `m`.
inline void fft_rows(Matrix<cplx> &m, bool inverse = false)
{
    detail::run(m.data(), static_cast<int>(m.cols()), static_cast<int>(m.rows()), 1, static_cast<int>(m.cols()),
                inverse);
}

/// Transforms every column (strided axis) of `m`.
inline void fft_cols(Matrix<cplx> &m, bool inverse = false)
{
    detail::run(m.data(), static_cast<int>(m.rows()), static_cast<int>(m.cols()), static_cast<int>(m.cols()), 1,
                inverse);
}

inline void fft2(Matrix<cplx> &m)
{
    fft_rows(m);
    fft_cols(m);
}

inline void ifft2(Matrix<cplx> &m)
{
    fft_rows(m, true);
    fft_cols(m, true);
}

/// Frequency of DFT bin k for an N-point transform with sample spacing d,
/// in FFT order (0, 1, ..., N/2-1, -N/2, ..., -1) / (N d).
inline double fft_frequency(std::size_t k, std::size_t n, double d)
{
    const auto kk = static_cast<std::ptrdiff_t>(k);
    const auto nn = static_cast<std::ptrdiff_t>(n);
    const std::ptrdiff_t signed_k = (kk < (nn + 1) / 2) ? kk : kk - nn;
    return static_cast<double>(signed_k) / (static_cast<double>(n) * d);
}

inline std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

} // namespace wallscan
