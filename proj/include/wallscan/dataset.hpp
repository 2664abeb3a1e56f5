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

// Synthetic training sets for the imaging and material networks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "wallscan/dataset_io.hpp"
#include "wallscan/detect.hpp"
#include "wallscan/focusing.hpp"
#include "wallscan/scene.hpp"

namespace wallscan
{

/// Normalization targets applied to the exported data.
namespace normalization
{
inline constexpr double kInputMean = 0.0;
inline constexpr double kInputStd = 0.017;
inline constexpr double kTargetMean = 0.092;
inline constexpr double kTargetStd = 0.2423;
inline constexpr double kCoMean = 0.0;
inline constexpr double kCoStd = 0.0052;
inline constexpr double kCrossMean = 0.0;
inline constexpr double kCrossStd = 0.0021;
} // namespace normalization

struct MomentStats
{
    double mean = 0.0;
    double std = 0.0;
};

template <typename Range>
MomentStats moments(const Range &values)
{
    double n = 0.0, s = 0.0, s2 = 0.0;
    for (auto v : values)
    {
        n += 1.0;
        s += static_cast<double>(v);
    }
    const double mean = s / n;
    for (auto v : values)
    {
        const double d = static_cast<double>(v) - mean;
        s2 += d * d;
    }
    return {mean, std::sqrt(s2 / n)};
}

/// Affine map of `values` to the given mean and standard deviation.
/// Returns the statistics before the map.
inline MomentStats normalize_to(std::span<float> values, double mean, double std, const MomentStats &from)
{
    if (!(from.std > 0.0))
        throw std::runtime_error("normalize_to: constant data cannot be normalized");
    for (auto &v : values)
        v = static_cast<float>((static_cast<double>(v) - from.mean) / from.std * std + mean);
    return from;
}

/// Overlapping square tiles along the moving axis: offsets 0, stride, ...
/// while a full tile fits.
inline std::vector<std::size_t> tile_offsets(std::size_t length, std::size_t tile, std::size_t stride)
{
    std::vector<std::size_t> out;
    if (tile == 0 || stride == 0)
        throw std::invalid_argument("tile_offsets: tile and stride must be > 0");
    for (std::size_t off = 0; off + tile <= length; off += stride)
        out.push_back(off);
    return out;
}

struct DatasetSummary
{
    std::size_t records = 0;
    std::size_t train = 0;
    std::size_t test = 0;
    json manifest;
};

namespace detail
{
inline void prepare_dataset_dir(const fs::path &dir)
{
    if (fs::exists(dir / "manifest.json") || (fs::exists(dir / "records") && !fs::is_empty(dir / "records")))
        throw DatasetError(IoErrorCode::FileSystem, dir.string() + " already holds a dataset");
    fs::create_directories(dir / "records");
}

inline double uniform(std::mt19937_64 &rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(std::mt19937_64 &rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}
} // namespace detail

// ------------------------------------------------------------------------
// Imaging pairs
// ------------------------------------------------------------------------

struct InetSampler
{
    double permittivity_min = 5.0;
    double permittivity_max = 14.0;
    double speed_min = 0.01; ///< m/s
    double speed_max = 0.04;
    std::size_t targets_min = 1;
    std::size_t targets_max = 5;
    double depth_min = 0.03;
    double depth_max = 0.10;
    std::size_t tile = 200;
    std::size_t scan_columns = 400;
    std::size_t tile_stride = 100;
    double snr_min_db = 15.0;
    double snr_max_db = 30.0;
    double speed_jitter = 0.0;
    WaveformConfig waveform;

    json to_json() const
    {
        return {{"permittivity", {permittivity_min, permittivity_max}},
                {"speed_m_s", {speed_min, speed_max}},
                {"targets", {targets_min, targets_max}},
                {"depth_m", {depth_min, depth_max}},
                {"tile", tile},
                {"scan_columns", scan_columns},
                {"tile_stride", tile_stride},
                {"snr_db", {snr_min_db, snr_max_db}},
                {"speed_jitter", speed_jitter},
                {"waveform", wallscan::to_json(waveform)}};
    }
};

/// Environment of an imaging scene: permittivity tercile x speed tercile.
/// The three "diagonal" cells (b_eps + b_v) % 3 == 0 form the test split.
struct InetEnvironment
{
    int permittivity_bucket = 0;
    int speed_bucket = 0;
    int id() const noexcept { return permittivity_bucket * 3 + speed_bucket; }
    bool is_test() const noexcept { return (permittivity_bucket + speed_bucket) % 3 == 0; }
    static InetEnvironment from_id(int id) { return {id / 3, id % 3}; }
};

/// Simulates scans over random scenes, focuses the noise-free scan with the
/// true permittivity and speed, tiles both into tile x tile crops and writes
/// exactly `n` normalized pairs plus manifest.json into `dir`.
inline DatasetSummary generate_inet_dataset(const fs::path &dir, std::size_t n, const InetSampler &sampler,
                                            std::uint64_t seed)
{
    if (n < 1)
        throw std::invalid_argument("generate_inet_dataset: n must be >= 1");
    if (sampler.scan_columns < sampler.tile)
        throw std::invalid_argument("generate_inet_dataset: scan narrower than a tile");
    detail::prepare_dataset_dir(dir);

    auto rng = detail::stream_rng(seed, 0x1e7, 0);
    const auto offsets = tile_offsets(sampler.scan_columns, sampler.tile, sampler.tile_stride);
    const double eps_step = (sampler.permittivity_max - sampler.permittivity_min) / 3.0;
    const double speed_step = (sampler.speed_max - sampler.speed_min) / 3.0;

    json records = json::array();
    DatasetSummary summary;
    for (std::size_t scene_index = 0; summary.records < n; ++scene_index)
    {
        const auto env = InetEnvironment::from_id(static_cast<int>(detail::uniform_index(rng, 0, 8)));
        Scene scene;
        scene.permittivity = detail::uniform(rng, sampler.permittivity_min + eps_step * env.permittivity_bucket,
                                             sampler.permittivity_min + eps_step * (env.permittivity_bucket + 1));
        scene.attenuation_db_per_m = detail::uniform(rng, 20.0, 80.0);

        ScanConfig scan;
        scan.speed = detail::uniform(rng, sampler.speed_min + speed_step * env.speed_bucket,
                                     sampler.speed_min + speed_step * (env.speed_bucket + 1));
        scan.scan_length = (static_cast<double>(sampler.scan_columns) + 0.5) * scan.dx();
        scan.range_samples = sampler.tile;
        scan.seed = rng();

        const std::size_t k = detail::uniform_index(rng, sampler.targets_min, sampler.targets_max);
        const double margin = 0.1 * scan.scan_length;
        for (std::size_t t = 0; t < k; ++t)
        {
            const auto material = static_cast<Material>(detail::uniform_index(rng, 0, kMaterialClasses - 1));
            scene.targets.push_back(Target::make(material, detail::uniform(rng, margin, scan.scan_length - margin),
                                                 detail::uniform(rng, sampler.depth_min, sampler.depth_max)));
        }

        ScanConfig clean = scan;
        const WaveformConfig &wf = sampler.waveform;
        const auto truth = rma(synthesize_bscan(scene, clean, wf, Channel::CoPol), scene.permittivity, scan.speed);
        scan.noise_std = noise_std_for_snr(scene, wf, detail::uniform(rng, sampler.snr_min_db, sampler.snr_max_db));
        scan.speed_jitter = sampler.speed_jitter;
        const auto input = synthesize_bscan(scene, scan, wf, Channel::CoPol);

        for (std::size_t off : offsets)
        {
            if (summary.records >= n)
                break;
            BScanPair pair{crop(input.data, off, 0, sampler.tile, sampler.tile),
                           crop(truth.data, off, 0, sampler.tile, sampler.tile)};
            const auto in_raw = moments(pair.input.flat());
            const auto tg_raw = moments(pair.target.flat());
            normalize_to(pair.input.flat(), normalization::kInputMean, normalization::kInputStd, in_raw);
            normalize_to(pair.target.flat(), normalization::kTargetMean, normalization::kTargetStd, tg_raw);

            const std::string file = record_file_name(summary.records);
            write_record(dir / file, pair);

            json targets = json::array();
            for (const auto &t : scene.targets)
            {
                json jt = wallscan::to_json(t);
                jt["x"] = t.x - static_cast<double>(off) * scan.dx();
                targets.push_back(jt);
            }
            const bool test = env.is_test();
            records.push_back({{"file", file},
                               {"split", test ? "test" : "train"},
                               {"environment", env.id()},
                               {"scene_index", scene_index},
                               {"tile_offset", off},
                               {"permittivity", scene.permittivity},
                               {"speed_m_s", scan.speed},
                               {"dx_m", scan.dx()},
                               {"dz_m", truth.dz},
                               {"input_raw", {{"mean", in_raw.mean}, {"std", in_raw.std}}},
                               {"target_raw", {{"mean", tg_raw.mean}, {"std", tg_raw.std}}},
                               {"targets", targets}});
            ++summary.records;
            (test ? summary.test : summary.train) += 1;
        }
    }

    const json config = sampler.to_json();
    json manifest = {{"schema_version", kSchemaVersion},
                     {"record_type", "bscan-pair"},
                     {"record_count", summary.records},
                     {"shape", {sampler.tile, sampler.tile}},
                     {"normalization",
                      {{"input", {{"mean", normalization::kInputMean}, {"std", normalization::kInputStd}}},
                       {"target", {{"mean", normalization::kTargetMean}, {"std", normalization::kTargetStd}}}}},
                     {"generator", {{"seed", seed}, {"config", config}, {"config_digest", config_digest(config)}}},
                     {"records", records}};
    detail::write_json(dir / "manifest.json", manifest);
    summary.manifest = std::move(manifest);
    return summary;
}

// ------------------------------------------------------------------------
// Material sequences
// ------------------------------------------------------------------------

struct MnetSampler
{
    double speed = 0.02;           ///< m/s
    std::size_t columns = 41;      ///< scan width around the target
    double snr_min_db = 15.0;
    double snr_max_db = 30.0;
    double property_jitter = 0.1;  ///< relative spread of index and dispersion
    double position_error = 0.002; ///< detection error fed to the extractor [m]
    std::size_t window = 10;
    WaveformConfig waveform;

    json to_json() const
    {
        return {{"speed_m_s", speed},
                {"columns", columns},
                {"snr_db", {snr_min_db, snr_max_db}},
                {"property_jitter", property_jitter},
                {"position_error_m", position_error},
                {"window", window},
                {"waveform", wallscan::to_json(waveform)}};
    }
};

/// Wall parameters of an environment class.
inline Scene environment_wall(const Environment &env, std::mt19937_64 &rng)
{
    static constexpr double eps_lo[] = {2.5, 4.0, 6.0};
    static constexpr double eps_hi[] = {3.5, 6.0, 9.0};
    static constexpr double loss[] = {10.0, 30.0, 50.0};
    const auto w = static_cast<std::size_t>(env.wall);
    Scene s;
    s.permittivity = detail::uniform(rng, eps_lo[w], eps_hi[w]) * (env.wet ? 1.6 : 1.0);
    s.attenuation_db_per_m = loss[w] + (env.wet ? 40.0 : 0.0);
    return s;
}

inline double environment_depth(const Environment &env, std::mt19937_64 &rng)
{
    static constexpr double lo[] = {0.03, 0.05, 0.075};
    static constexpr double hi[] = {0.05, 0.075, 0.10};
    return detail::uniform(rng, lo[env.depth_bucket], hi[env.depth_bucket]);
}

/// Test environments: (wall + depth bucket + wet) % 3 == 0.
inline bool is_test_environment(const Environment &env)
{
    return (static_cast<int>(env.wall) + env.depth_bucket + (env.wet ? 1 : 0)) % 3 == 0;
}

/// Writes `n` dual-polarization samples balanced over the material classes.
/// Channels are normalized dataset-wide so that the co/cross amplitude ratio
/// survives normalization.
inline DatasetSummary generate_mnet_dataset(const fs::path &dir, std::size_t n, std::uint64_t seed,
                                            const MnetSampler &sampler = {})
{
    if (n < 1)
        throw std::invalid_argument("generate_mnet_dataset: n must be >= 1");
    detail::prepare_dataset_dir(dir);
    auto rng = detail::stream_rng(seed, 0x3e7, 0);

    std::vector<int> classes(n);
    for (std::size_t i = 0; i < n; ++i)
        classes[i] = static_cast<int>(i % kMaterialClasses);
    std::shuffle(classes.begin(), classes.end(), rng);
    std::vector<int> env_order(Environment::kCount);
    std::iota(env_order.begin(), env_order.end(), 0);
    std::shuffle(env_order.begin(), env_order.end(), rng);

    const WaveformConfig &wf = sampler.waveform;
    std::vector<PolSample> samples;
    samples.reserve(n);
    json records = json::array();
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto env = Environment::from_id(env_order[i % env_order.size()]);
        Scene scene = environment_wall(env, rng);
        const auto material = static_cast<Material>(classes[i]);

        ScanConfig scan;
        scan.speed = sampler.speed;
        scan.scan_length = (static_cast<double>(sampler.columns) + 0.5) * scan.dx();
        scan.range_samples = kSequenceLength;
        scan.seed = rng();

        const double x0 = 0.5 * scan.scan_length + detail::uniform(rng, -0.002, 0.002);
        Target t = Target::make(material, x0, environment_depth(env, rng));
        const double j = sampler.property_jitter;
        t.refractive_index *= 1.0 + detail::uniform(rng, -j, j);
        t.dispersion_slope *= 1.0 + detail::uniform(rng, -j, j);
        scene.targets.push_back(t);
        scan.noise_std = noise_std_for_snr(scene, wf, detail::uniform(rng, sampler.snr_min_db, sampler.snr_max_db));

        const auto co = synthesize_bscan(scene, scan, wf, Channel::CoPol);
        const auto cross = synthesize_bscan(scene, scan, wf, Channel::CrossPol);
        Detection d;
        d.x = x0 + detail::uniform(rng, -sampler.position_error, sampler.position_error);
        d.z = t.z;
        auto extraction = extract_sequence(co, cross, d, sampler.window);
        extraction.sample.material = classes[i];
        extraction.sample.environment = env.id();
        samples.push_back(std::move(extraction.sample));

        records.push_back({{"file", record_file_name(i)},
                           {"split", is_test_environment(env) ? "test" : "train"},
                           {"material", classes[i]},
                           {"material_name", std::string(to_string(material))},
                           {"environment", env.id()},
                           {"permittivity", scene.permittivity},
                           {"depth_m", t.z},
                           {"column", extraction.column}});
    }

    std::vector<float> co_all, cross_all;
    co_all.reserve(n * kSequenceLength);
    cross_all.reserve(n * kSequenceLength);
    for (const auto &s : samples)
    {
        co_all.insert(co_all.end(), s.co_pol.begin(), s.co_pol.end());
        cross_all.insert(cross_all.end(), s.cross_pol.begin(), s.cross_pol.end());
    }
    const auto co_raw = moments(co_all);
    const auto cross_raw = moments(cross_all);

    DatasetSummary summary;
    for (std::size_t i = 0; i < n; ++i)
    {
        auto &s = samples[i];
        normalize_to(s.co_pol, normalization::kCoMean, normalization::kCoStd, co_raw);
        normalize_to(s.cross_pol, normalization::kCrossMean, normalization::kCrossStd, cross_raw);
        write_record(dir / record_file_name(i), s);
        ++summary.records;
        (records[i]["split"] == "test" ? summary.test : summary.train) += 1;
    }

    const json config = sampler.to_json();
    json manifest = {
        {"schema_version", kSchemaVersion},
        {"record_type", "polsample"},
        {"record_count", n},
        {"sequence_length", kSequenceLength},
        {"channel_order", {"co", "cross"}},
        {"material_classes", {"non_corroded_rebar", "corroded_rebar", "non_leaked_pvc", "leaked_pvc"}},
        {"normalization",
         {{"co", {{"mean", normalization::kCoMean}, {"std", normalization::kCoStd},
                  {"raw_mean", co_raw.mean}, {"raw_std", co_raw.std}}},
          {"cross", {{"mean", normalization::kCrossMean}, {"std", normalization::kCrossStd},
                     {"raw_mean", cross_raw.mean}, {"raw_std", cross_raw.std}}}}},
        {"generator", {{"seed", seed}, {"config", config}, {"config_digest", config_digest(config)}}},
        {"records", records}};
    detail::write_json(dir / "manifest.json", manifest);
    summary.manifest = std::move(manifest);
    return summary;
}

} // namespace wallscan
