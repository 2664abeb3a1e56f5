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

#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wallscan/polarimetry.hpp"
#include "wallscan/scene.hpp"

using namespace wallscan;
using Catch::Approx;

namespace
{
Scene single_target_scene(double x0 = 0.2, double z0 = 0.05)
{
    Scene s;
    s.targets.push_back(Target::make(Material::NonCorrodedRebar, x0, z0));
    return s;
}

std::size_t envelope_argmax(std::span<const double> trace)
{
    const auto env = envelope(trace);
    return static_cast<std::size_t>(std::max_element(env.begin(), env.end()) - env.begin());
}
} // namespace

TEST_CASE("apex delay for a 5 cm deep target in an eps = 9 wall")
{
    const auto scene = single_target_scene();
    // c = c0 / 3, two-way path 0.1 m
    const double expected = 0.1 / (299792458.0 / 3.0);
    const double tau = echo_delay(scene.targets[0], 0.2, scene);
    CHECK(tau == Approx(expected).epsilon(1e-14));
    CHECK(tau == Approx(1.0007e-9).margin(5e-14));
}

TEST_CASE("45 degree offset multiplies the delay by sqrt 2")
{
    const auto scene = single_target_scene(0.1, 0.07);
    const auto &t = scene.targets[0];
    CHECK(echo_delay(t, 0.17, scene) == Approx(std::sqrt(2.0) * echo_delay(t, 0.1, scene)).epsilon(1e-14));
    CHECK(echo_delay(t, 0.03, scene) == Approx(std::sqrt(2.0) * echo_delay(t, 0.1, scene)).epsilon(1e-14));
}

TEST_CASE("empty noise-free scene gives a zero trace")
{
    const auto trace = synthesize_ascan(Scene{}, 0.1, ScanConfig{}, WaveformConfig{}, Channel::CoPol);
    CHECK(trace.size() == 512);
    CHECK(std::all_of(trace.begin(), trace.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("single echo envelope peaks at the nearest sample to the delay")
{
    const WaveformConfig wf;
    for (double z0 : {0.03, 0.05, 0.0731, 0.1})
        for (double offset : {0.0, 0.013, -0.041})
        {
            const auto scene = single_target_scene(0.2, z0);
            const auto trace = synthesize_ascan(scene, 0.2 + offset, ScanConfig{}, wf, Channel::CoPol);
            const double tau = echo_delay(scene.targets[0], 0.2 + offset, scene);
            CHECK(envelope_argmax(trace) == static_cast<std::size_t>(std::lround(tau * wf.sample_rate())));
        }
}

TEST_CASE("synthesis is linear in the target set")
{
    Scene a, b, ab;
    a.targets.push_back(Target::make(Material::CorrodedRebar, 0.15, 0.04));
    b.targets.push_back(Target::make(Material::LeakedPvc, 0.18, 0.07));
    ab.targets = {a.targets[0], b.targets[0]};
    for (auto ch : {Channel::CoPol, Channel::CrossPol})
    {
        const auto ta = synthesize_ascan(a, 0.16, ScanConfig{}, WaveformConfig{}, ch);
        const auto tb = synthesize_ascan(b, 0.16, ScanConfig{}, WaveformConfig{}, ch);
        const auto tab = synthesize_ascan(ab, 0.16, ScanConfig{}, WaveformConfig{}, ch);
        for (std::size_t k = 0; k < tab.size(); ++k)
            CHECK(tab[k] == Approx(ta[k] + tb[k]).margin(1e-12));
    }
}

TEST_CASE("column count from speed, frame rate and length")
{
    ScanConfig c;
    c.speed = 0.02;
    c.frame_rate = 40.0;
    c.scan_length = 0.4;
    CHECK(c.dx() == Approx(0.0005));
    CHECK(c.columns() == 800);
    const auto b = synthesize_bscan(single_target_scene(), c, WaveformConfig{}, Channel::CoPol);
    CHECK(b.columns() == 800);
    CHECK(b.samples() == 512);
}

TEST_CASE("scan shorter than one step is rejected")
{
    ScanConfig c;
    c.scan_length = 0.0004;
    CHECK_THROWS_AS(synthesize_bscan(Scene{}, c, WaveformConfig{}, Channel::CoPol), std::invalid_argument);
}

TEST_CASE("invalid scenes are rejected")
{
    Scene s = single_target_scene();
    s.permittivity = 0.5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = single_target_scene();
    s.targets[0].z = -0.01;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = single_target_scene();
    s.targets.push_back(s.targets[0]);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("B-scan traces the delay hyperbola column by column")
{
    const WaveformConfig wf;
    ScanConfig c;
    c.scan_length = 0.2;
    const auto scene = single_target_scene(0.1, 0.06);
    const auto b = synthesize_bscan(scene, c, wf, Channel::CoPol);
    for (std::size_t i = 0; i < b.columns(); ++i)
    {
        const auto row = b.data.row(i);
        const std::vector<double> trace(row.begin(), row.end());
        const double tau = echo_delay(scene.targets[0], static_cast<double>(i) * c.dx(), scene);
        const double k = static_cast<double>(envelope_argmax(trace));
        CHECK(std::abs(k - tau * wf.sample_rate()) <= 1.0);
    }
}

TEST_CASE("seeded synthesis is bit-reproducible")
{
    ScanConfig c;
    c.scan_length = 0.05;
    c.noise_std = 0.3;
    c.seed = 99;
    c.speed_jitter = 0.05;
    const auto scene = single_target_scene(0.02, 0.05);
    const auto a = synthesize_bscan(scene, c, WaveformConfig{}, Channel::CoPol);
    const auto b = synthesize_bscan(scene, c, WaveformConfig{}, Channel::CoPol);
    CHECK(a.data == b.data);
    c.seed = 100;
    CHECK_FALSE(synthesize_bscan(scene, c, WaveformConfig{}, Channel::CoPol).data == a.data);
    // independent streams per channel
    CHECK_FALSE(synthesize_bscan(scene, c, WaveformConfig{}, Channel::CrossPol).data ==
                synthesize_bscan(scene, c, WaveformConfig{}, Channel::CoPol).data);
}

TEST_CASE("additive noise has the configured moments")
{
    ScanConfig c;
    c.scan_length = 2000 * c.dx() + 1e-9;
    c.range_samples = 512;
    c.noise_std = 0.3;
    c.seed = 7;
    const auto b = synthesize_bscan(Scene{}, c, WaveformConfig{}, Channel::CoPol);
    const double n = static_cast<double>(b.data.size());
    REQUIRE(n >= 1e6);
    double s = 0.0, s2 = 0.0;
    for (float v : b.data.flat())
        s += v;
    const double mean = s / n;
    for (float v : b.data.flat())
        s2 += (v - mean) * (v - mean);
    const double sd = std::sqrt(s2 / n);
    CHECK(std::abs(mean) < 3.0 * 0.3 / std::sqrt(n));
    CHECK(std::abs(sd - 0.3) < 3.0 * 0.3 / std::sqrt(2.0 * n));
}

TEST_CASE("probe positions: steady hand and jitter")
{
    ScanConfig c;
    c.scan_length = 0.05;
    const auto steady = probe_positions(c);
    for (std::size_t i = 0; i < steady.size(); ++i)
        CHECK(steady[i] == static_cast<double>(i) * c.dx());
    c.speed_jitter = 0.2;
    c.seed = 4;
    const auto shaky = probe_positions(c);
    CHECK(shaky.size() == steady.size());
    CHECK(shaky[0] == 0.0);
    CHECK(std::is_sorted(shaky.begin(), shaky.end()));
    CHECK_FALSE(shaky == steady);
}

TEST_CASE("noise level for a requested SNR follows the apex amplitude")
{
    const auto scene = single_target_scene(0.2, 0.05);
    const WaveformConfig wf;
    // normal incidence: gamma_p = (Ns - N0) / (Ns + N0)
    const cplx ns = scene.targets[0].refractive_index;
    const double gp = std::abs((ns - 3.0) / (ns + 3.0));
    const double apex = gp / 0.05 * std::pow(10.0, -50.0 * 2.0 * 0.05 / 20.0);
    CHECK(noise_std_for_snr(scene, wf, 20.0) == Approx(apex / 10.0).epsilon(1e-12));
    CHECK(noise_std_for_snr(scene, wf, 0.0) == Approx(apex).epsilon(1e-12));
}

TEST_CASE("co- and cross-polarized gains coincide at the apex and split off-axis")
{
    Scene s;
    s.targets.push_back(Target::make(Material::NonLeakedPvc, 0.1, 0.05));
    const auto &t = s.targets[0];
    CHECK(polarization_gain(t, 0.1, s, Channel::CoPol) ==
          Approx(polarization_gain(t, 0.1, s, Channel::CrossPol)).epsilon(1e-12));
    CHECK(polarization_gain(t, 0.14, s, Channel::CoPol) != Approx(polarization_gain(t, 0.14, s, Channel::CrossPol)));
}
