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

// JSON mapping of the domain types. Scene and scan files written by hand
// may omit optional fields; material parameters then default to the
// material class.

#include <json.hpp>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include "wallscan/detect.hpp"
#include "wallscan/focusing.hpp"
#include "wallscan/scene.hpp"
#include "wallscan/waveform.hpp"

namespace wallscan
{
using json = nlohmann::json;

inline constexpr double kNsPerGhz = 1e-18; // s/Hz

inline json to_json(cplx v) { return json::array({v.real(), v.imag()}); }

inline cplx complex_from_json(const json &j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("complex value must be a number or [re, im]");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json to_json(const WaveformConfig &w)
{
    return {{"amplitude", w.amplitude()},
            {"carrier_hz", w.carrier()},
            {"bandwidth_hz", w.bandwidth()},
            {"sample_rate_hz", w.sample_rate()}};
}

inline WaveformConfig waveform_from_json(const json &j)
{
    return WaveformConfig(j.value("amplitude", WaveformConfig::kDefaultAmplitude),
                          j.value("carrier_hz", WaveformConfig::kDefaultCarrier),
                          j.value("bandwidth_hz", WaveformConfig::kDefaultBandwidth),
                          j.value("sample_rate_hz", WaveformConfig::kDefaultSampleRate));
}

inline json to_json(const Target &t)
{
    return {{"x", t.x},
            {"z", t.z},
            {"material", std::string(to_string(t.material))},
            {"reflectivity", to_json(t.reflectivity)},
            {"refractive_index", to_json(t.refractive_index)},
            {"dispersion_ns_per_ghz", t.dispersion_slope / kNsPerGhz}};
}

inline Target target_from_json(const json &j)
{
    const auto material = material_from_string(j.value("material", std::string("non_corroded_rebar")));
    Target t = Target::make(material, j.at("x").get<double>(), j.at("z").get<double>());
    if (j.contains("reflectivity"))
        t.reflectivity = complex_from_json(j.at("reflectivity"));
    if (j.contains("refractive_index"))
        t.refractive_index = complex_from_json(j.at("refractive_index"));
    if (j.contains("dispersion_ns_per_ghz"))
        t.dispersion_slope = j.at("dispersion_ns_per_ghz").get<double>() * kNsPerGhz;
    return t;
}

inline json to_json(const Scene &s)
{
    json targets = json::array();
    for (const auto &t : s.targets)
        targets.push_back(to_json(t));
    return {{"permittivity", s.permittivity}, {"attenuation_db_per_m", s.attenuation_db_per_m}, {"targets", targets}};
}

inline Scene scene_from_json(const json &j)
{
    Scene s;
    s.permittivity = j.value("permittivity", s.permittivity);
    s.attenuation_db_per_m = j.value("attenuation_db_per_m", s.attenuation_db_per_m);
    if (j.contains("targets"))
        for (const auto &t : j.at("targets"))
            s.targets.push_back(target_from_json(t));
    s.validate();
    return s;
}

inline json to_json(const ScanConfig &c)
{
    return {{"speed_m_s", c.speed},         {"frame_rate_hz", c.frame_rate},
            {"scan_length_m", c.scan_length}, {"noise_std", c.noise_std},
            {"seed", c.seed},               {"range_samples", c.range_samples},
            {"speed_jitter", c.speed_jitter}};
}

inline ScanConfig scan_from_json(const json &j)
{
    ScanConfig c;
    c.speed = j.value("speed_m_s", c.speed);
    c.frame_rate = j.value("frame_rate_hz", c.frame_rate);
    c.scan_length = j.value("scan_length_m", c.scan_length);
    c.noise_std = j.value("noise_std", c.noise_std);
    c.seed = j.value("seed", c.seed);
    c.range_samples = j.value("range_samples", c.range_samples);
    c.speed_jitter = j.value("speed_jitter", c.speed_jitter);
    c.validate();
    return c;
}

inline json to_json(const std::optional<Provenance> &p)
{
    if (!p)
        return nullptr;
    return {{"scene", to_json(p->scene)}, {"scan", to_json(p->scan)}};
}

inline std::optional<Provenance> provenance_from_json(const json &j)
{
    if (j.is_null())
        return std::nullopt;
    return Provenance{scene_from_json(j.at("scene")), scan_from_json(j.at("scan"))};
}

/// Everything in a BScan except the sample matrix.
inline json metadata_to_json(const BScan &b)
{
    return {{"kind", "bscan"},
            {"channel", std::string(to_string(b.channel))},
            {"columns", b.columns()},
            {"samples", b.samples()},
            {"dx_m", b.dx},
            {"frame_rate_hz", b.frame_rate},
            {"waveform", to_json(b.waveform)},
            {"provenance", to_json(b.provenance)}};
}

inline json metadata_to_json(const FocusedImage &img)
{
    return {{"kind", "image"},
            {"nx", img.nx()},
            {"nz", img.nz()},
            {"dx_m", img.dx},
            {"dz_m", img.dz},
            {"origin_depth_m", img.origin_depth},
            {"origin_x_m", img.origin_x}};
}

inline json to_json(const Detection &d)
{
    return {{"x_m", d.x}, {"z_m", d.z}, {"peak", d.peak}, {"snr_db", d.snr_db}, {"cells", d.cells}};
}

inline Detection detection_from_json(const json &j)
{
    Detection d;
    d.x = j.at("x_m").get<double>();
    d.z = j.at("z_m").get<double>();
    d.peak = j.value("peak", 0.0);
    d.snr_db = j.value("snr_db", 0.0);
    d.cells = j.value("cells", std::size_t{0});
    return d;
}

} // namespace wallscan
