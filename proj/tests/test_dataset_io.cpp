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

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "wallscan/dataset.hpp"
#include "wallscan/dataset_io.hpp"

using namespace wallscan;
using Catch::Approx;

namespace
{
struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string &tag)
    {
        path = fs::temp_directory_path() / ("wallscan_test_" + tag + "_" + std::to_string(std::random_device{}()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Matrix<float> random_matrix(std::size_t r, std::size_t c, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> g(0.0f, 3.0f);
    Matrix<float> m(r, c);
    for (auto &v : m.flat())
        v = g(rng);
    return m;
}

std::vector<char> bytes_of(const fs::path &p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

bool same_tree(const fs::path &a, const fs::path &b)
{
    std::set<fs::path> fa, fb;
    for (const auto &e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file())
            fa.insert(fs::relative(e.path(), a));
    for (const auto &e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file())
            fb.insert(fs::relative(e.path(), b));
    if (fa != fb)
        return false;
    for (const auto &f : fa)
        if (bytes_of(a / f) != bytes_of(b / f))
            return false;
    return true;
}

InetSampler small_sampler()
{
    InetSampler s;
    s.tile = 64;
    s.scan_columns = 128;
    s.tile_stride = 32;
    return s;
}
} // namespace

TEST_CASE("blob encoding is bit-exact, including signed zero and subnormals")
{
    Blob b{RecordKind::Image, 3, 4, {}};
    b.values = {0.0f, -0.0f, std::numeric_limits<float>::denorm_min(), std::numeric_limits<float>::max(),
                -std::numeric_limits<float>::min(), 1.0f / 3.0f, -7.25f, 1e-30f, 2.0f, 3.0f, 4.0f, 5.0f};
    const auto bytes = encode_blob(b);
    CHECK(bytes.size() == 16 + 4 * 12);
    CHECK(std::string(bytes.data(), 4) == "WSCN");
    const auto back = decode_blob(bytes);
    REQUIRE(back.values.size() == b.values.size());
    for (std::size_t i = 0; i < b.values.size(); ++i)
        CHECK(std::bit_cast<std::uint32_t>(back.values[i]) == std::bit_cast<std::uint32_t>(b.values[i]));
    CHECK(back.rows == 3);
    CHECK(back.cols == 4);
    CHECK(back.kind == RecordKind::Image);
}

TEST_CASE("header layout is little-endian")
{
    Blob b{RecordKind::BScanPair, 1, 2, {1.0f, 2.0f, 3.0f, 4.0f}};
    const auto bytes = encode_blob(b);
    CHECK(static_cast<unsigned char>(bytes[4]) == 1);
    CHECK(static_cast<unsigned char>(bytes[5]) == 0);
    CHECK(static_cast<unsigned char>(bytes[6]) == 3);
    CHECK(static_cast<unsigned char>(bytes[8]) == 1);
    CHECK(static_cast<unsigned char>(bytes[12]) == 2);
    // 1.0f = 0x3f800000
    CHECK(static_cast<unsigned char>(bytes[16]) == 0x00);
    CHECK(static_cast<unsigned char>(bytes[19]) == 0x3f);
}

TEST_CASE("decoder errors carry distinct codes")
{
    Blob b{RecordKind::BScan, 2, 2, {1.0f, 2.0f, 3.0f, 4.0f}};
    const auto good = encode_blob(b);
    const auto code_of = [](std::vector<char> bytes) {
        try
        {
            decode_blob(bytes);
        }
        catch (const DatasetError &e)
        {
            return e.code();
        }
        FAIL("no error raised");
        return IoErrorCode::FileSystem;
    };

    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK(code_of(bad_magic) == IoErrorCode::BadHeader);
    CHECK(std::string(describe(IoErrorCode::BadHeader)) == "bad header");

    auto version = good;
    version[4] = 2;
    CHECK(code_of(version) == IoErrorCode::VersionMismatch);

    auto truncated = good;
    truncated.resize(truncated.size() - 3);
    CHECK(code_of(truncated) == IoErrorCode::Truncated);
    CHECK(code_of(std::vector<char>(good.begin(), good.begin() + 10)) == IoErrorCode::BadHeader);

    auto nan = good;
    const auto q = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN());
    for (int i = 0; i < 4; ++i)
        nan[20 + i] = static_cast<char>((q >> (8 * i)) & 0xff);
    CHECK(code_of(nan) == IoErrorCode::NonFinite);

    b.values[1] = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(encode_blob(b), DatasetError);

    std::set<IoErrorCode> codes{IoErrorCode::BadHeader, IoErrorCode::VersionMismatch, IoErrorCode::Truncated,
                                IoErrorCode::NonFinite, IoErrorCode::InconsistentManifest};
    CHECK(codes.size() == 5);
}

TEST_CASE("B-scan files round-trip bit-exactly with provenance")
{
    TempDir tmp("bscan");
    Scene s;
    s.targets.push_back(Target::make(Material::LeakedPvc, 0.03, 0.05));
    ScanConfig c;
    c.scan_length = 0.06;
    c.noise_std = 0.01;
    c.seed = 3;
    c.range_samples = 300;
    const auto b = synthesize_bscan(s, c, WaveformConfig{}, Channel::CrossPol);
    write_bscan(tmp.path / "scan", b);
    const auto back = read_bscan(tmp.path / "scan");
    CHECK(back == b);

    BScan bare = b;
    bare.provenance.reset();
    write_bscan(tmp.path / "bare", bare);
    CHECK(read_bscan(tmp.path / "bare") == bare);
}

TEST_CASE("image files round-trip bit-exactly")
{
    TempDir tmp("image");
    FocusedImage img;
    img.data = random_matrix(30, 40, 1);
    for (auto &v : img.data.flat())
        v = std::abs(v);
    img.dx = 0.0005;
    img.dz = 0.00214;
    img.origin_x = 0.01;
    img.origin_depth = 0.002;
    write_image(tmp.path / "img", img, {{"entropy", 1.5}});
    json meta;
    CHECK(read_image(tmp.path / "img", &meta) == img);
    CHECK(meta.at("entropy") == 1.5);
    CHECK_THROWS_AS(read_bscan(tmp.path / "img"), DatasetError);
}

TEST_CASE("pair and PolSample records round-trip")
{
    TempDir tmp("records");
    BScanPair p{random_matrix(20, 20, 4), random_matrix(20, 20, 5)};
    write_record(tmp.path / "p.bin", p);
    CHECK(read_pair_record(tmp.path / "p.bin") == p);
    CHECK_THROWS_AS(read_polsample_record(tmp.path / "p.bin"), DatasetError);

    PolSample s;
    const auto m = random_matrix(2, kSequenceLength, 6);
    s.co_pol.assign(m.row(0).begin(), m.row(0).end());
    s.cross_pol.assign(m.row(1).begin(), m.row(1).end());
    write_record(tmp.path / "s.bin", s);
    CHECK(read_polsample_record(tmp.path / "s.bin") == s);
}

TEST_CASE("missing files report a file-system error")
{
    try
    {
        read_blob("/nonexistent/wallscan.bin");
        FAIL("no error");
    }
    catch (const DatasetError &e)
    {
        CHECK(e.code() == IoErrorCode::FileSystem);
    }
}

TEST_CASE("imaging dataset: count, normalization, split")
{
    TempDir tmp("inet");
    const auto sampler = small_sampler();
    const auto summary = generate_inet_dataset(tmp.path / "d", 11, sampler, 5);
    CHECK(summary.records == 11);
    CHECK(summary.train + summary.test == 11);
    const auto manifest = load_manifest(tmp.path / "d");
    CHECK(manifest.at("record_count") == 11);
    CHECK(manifest.at("record_type") == "bscan-pair");
    CHECK(manifest.at("normalization").at("input").at("std") == 0.017);
    CHECK(manifest.at("normalization").at("target").at("mean") == 0.092);
    CHECK(manifest.at("normalization").at("target").at("std") == 0.2423);

    std::vector<float> inputs, targets;
    std::set<int> train_env, test_env;
    for (const auto &r : manifest.at("records"))
    {
        const auto p = read_pair_record(tmp.path / "d" / r.at("file").get<std::string>());
        CHECK(p.input.rows() == 64);
        CHECK(p.input.cols() == 64);
        const auto in = moments(p.input.flat());
        const auto tg = moments(p.target.flat());
        CHECK(in.mean == Approx(0.0).margin(1e-6));
        CHECK(in.std == Approx(0.017).margin(1e-6));
        CHECK(tg.mean == Approx(0.092).margin(1e-6));
        CHECK(tg.std == Approx(0.2423).margin(1e-6));
        inputs.insert(inputs.end(), p.input.flat().begin(), p.input.flat().end());
        targets.insert(targets.end(), p.target.flat().begin(), p.target.flat().end());
        const int env = r.at("environment");
        const double eps = r.at("permittivity"), v = r.at("speed_m_s");
        CHECK(eps >= 5.0);
        CHECK(eps <= 14.0);
        CHECK(v >= 0.01);
        CHECK(v <= 0.04);
        (r.at("split") == "test" ? test_env : train_env).insert(env);
    }
    const auto all_in = moments(inputs), all_tg = moments(targets);
    CHECK(all_in.mean == Approx(0.0).margin(1e-6));
    CHECK(all_in.std == Approx(0.017).margin(1e-6));
    CHECK(all_tg.mean == Approx(0.092).margin(1e-6));
    CHECK(all_tg.std == Approx(0.2423).margin(1e-6));
    for (int e : train_env)
        CHECK(test_env.count(e) == 0);
}

TEST_CASE("imaging dataset targets are RMA images of the clean scan")
{
    TempDir tmp("inet_truth");
    auto sampler = small_sampler();
    const auto summary = generate_inet_dataset(tmp.path / "d", 1, sampler, 21);
    const auto &r = summary.manifest.at("records")[0];
    const auto p = read_pair_record(tmp.path / "d" / r.at("file").get<std::string>());

    Scene s;
    s.permittivity = r.at("permittivity");
    for (const auto &t : r.at("targets"))
        s.targets.push_back(target_from_json(t));
    // focus a clean scan of the first tile and compare the brightest pixel
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.target.size(); ++i)
        if (p.target.data()[i] > p.target.data()[best])
            best = i;
    const double x = static_cast<double>(best / 64) * r.at("dx_m").get<double>();
    const double z = static_cast<double>(best % 64) * r.at("dz_m").get<double>();
    double nearest = 1e9;
    for (const auto &t : s.targets)
        nearest = std::min(nearest, std::hypot(t.x - x, t.z - z));
    CHECK(nearest < 0.01);
}

TEST_CASE("seeded datasets are byte-identical")
{
    TempDir tmp("repro");
    const auto sampler = small_sampler();
    generate_inet_dataset(tmp.path / "a", 6, sampler, 9);
    generate_inet_dataset(tmp.path / "b", 6, sampler, 9);
    generate_inet_dataset(tmp.path / "c", 6, sampler, 10);
    CHECK(same_tree(tmp.path / "a", tmp.path / "b"));
    CHECK_FALSE(same_tree(tmp.path / "a", tmp.path / "c"));

    generate_mnet_dataset(tmp.path / "m1", 12, 7);
    generate_mnet_dataset(tmp.path / "m2", 12, 7);
    CHECK(same_tree(tmp.path / "m1", tmp.path / "m2"));
}

TEST_CASE("material dataset: balance, length, normalization, disjoint environments")
{
    TempDir tmp("mnet");
    const auto summary = generate_mnet_dataset(tmp.path / "d", 50, 3);
    const auto manifest = load_manifest(tmp.path / "d");
    CHECK(manifest.at("record_type") == "polsample");
    CHECK(manifest.at("channel_order") == json({"co", "cross"}));
    CHECK(manifest.at("normalization").at("co").at("std") == 0.0052);
    CHECK(manifest.at("normalization").at("cross").at("std") == 0.0021);

    std::array<int, 4> hist{};
    std::set<int> envs, train_env, test_env;
    std::vector<float> co, cross;
    for (const auto &r : manifest.at("records"))
    {
        const auto s = read_polsample_record(tmp.path / "d" / r.at("file").get<std::string>());
        CHECK(s.co_pol.size() == 1120);
        CHECK(s.cross_pol.size() == 1120);
        co.insert(co.end(), s.co_pol.begin(), s.co_pol.end());
        cross.insert(cross.end(), s.cross_pol.begin(), s.cross_pol.end());
        hist[r.at("material").get<std::size_t>()] += 1;
        const int e = r.at("environment");
        envs.insert(e);
        (r.at("split") == "test" ? test_env : train_env).insert(e);
    }
    const auto [lo, hi] = std::minmax_element(hist.begin(), hist.end());
    CHECK(*hi - *lo <= 1);
    CHECK(envs.size() >= 3);
    CHECK_FALSE(train_env.empty());
    CHECK_FALSE(test_env.empty());
    for (int e : train_env)
        CHECK(test_env.count(e) == 0);
    CHECK(summary.train + summary.test == 50);

    const auto mc = moments(co), mx = moments(cross);
    CHECK(mc.mean == Approx(0.0).margin(1e-6));
    CHECK(mc.std == Approx(0.0052).margin(1e-6));
    CHECK(mx.mean == Approx(0.0).margin(1e-6));
    CHECK(mx.std == Approx(0.0021).margin(1e-6));
}

TEST_CASE("manifest disagreeing with the directory is rejected")
{
    TempDir tmp("manifest");
    generate_mnet_dataset(tmp.path / "d", 8, 1);
    CHECK_NOTHROW(load_manifest(tmp.path / "d"));

    const auto code_of = [&] {
        try
        {
            load_manifest(tmp.path / "d");
        }
        catch (const DatasetError &e)
        {
            return e.code();
        }
        return IoErrorCode::FileSystem;
    };

    // an extra blob on disk
    fs::copy_file(tmp.path / "d" / "records" / "000000.bin", tmp.path / "d" / "records" / "999999.bin");
    CHECK(code_of() == IoErrorCode::InconsistentManifest);
    fs::remove(tmp.path / "d" / "records" / "999999.bin");

    // a listed blob missing
    fs::rename(tmp.path / "d" / "records" / "000003.bin", tmp.path / "d" / "elsewhere.bin");
    CHECK(code_of() == IoErrorCode::InconsistentManifest);
    fs::rename(tmp.path / "d" / "elsewhere.bin", tmp.path / "d" / "records" / "000003.bin");

    // count field wrong
    auto m = detail::read_json(tmp.path / "d" / "manifest.json");
    m["record_count"] = 9;
    detail::write_json(tmp.path / "d" / "manifest.json", m);
    CHECK(code_of() == IoErrorCode::InconsistentManifest);

    m["record_count"] = 8;
    m["schema_version"] = 2;
    detail::write_json(tmp.path / "d" / "manifest.json", m);
    CHECK(code_of() == IoErrorCode::VersionMismatch);
}

TEST_CASE("generators refuse to overwrite a dataset")
{
    TempDir tmp("exclusive");
    generate_mnet_dataset(tmp.path / "d", 4, 1);
    CHECK_THROWS_AS(generate_mnet_dataset(tmp.path / "d", 4, 1), DatasetError);
    CHECK_THROWS_AS(generate_mnet_dataset(tmp.path / "e", 0, 1), std::invalid_argument);
}

TEST_CASE("tiling offsets")
{
    CHECK(tile_offsets(400, 200, 100) == std::vector<std::size_t>{0, 100, 200});
    CHECK(tile_offsets(800, 200, 100).size() == 7);
    CHECK(tile_offsets(150, 200, 100).empty());
}

TEST_CASE("config digest is stable and content-sensitive")
{
    const json a = {{"x", 1}, {"y", {1, 2}}};
    const json b = {{"y", {1, 2}}, {"x", 1}};
    CHECK(config_digest(a) == config_digest(b));
    CHECK(config_digest(a) != config_digest(json{{"x", 2}, {"y", {1, 2}}}));
    CHECK(config_digest(a).rfind("fnv1a64:", 0) == 0);
}
