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

// On-disk record format
// ---------------------
// Every record is one binary blob:
//
//   offset  size  field
//   0       4     magic "WSCN"
//   4       2     format version (uint16, little endian)
//   6       2     record kind (uint16, see RecordKind)
//   8       4     rows (uint32)
//   12      4     cols (uint32)
//   16      ...   planes(kind) * rows * cols float32, little endian, row major
//
// Scalar metadata (axes, waveform, labels, provenance) lives in JSON next to
// the blob: `<stem>.json` for standalone scans and images, or the record's
// entry in `manifest.json` for datasets.

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wallscan/json_io.hpp"
#include "wallscan/matrix.hpp"

namespace wallscan
{
namespace fs = std::filesystem;

inline constexpr std::array<char, 4> kRecordMagic{'W', 'S', 'C', 'N'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr int kSchemaVersion = 1;

enum class RecordKind : std::uint16_t
{
    BScan = 1,
    Image = 2,
    BScanPair = 3, ///< network input and focused target, same shape
    PolSample = 4, ///< rows = 2 (co, cross), cols = sequence length
};

inline constexpr std::size_t planes(RecordKind k) { return k == RecordKind::BScanPair ? 2 : 1; }

enum class IoErrorCode
{
    BadHeader,
    VersionMismatch,
    Truncated,
    NonFinite,
    InconsistentManifest,
    KindMismatch,
    FileSystem,
};

inline const char *describe(IoErrorCode c)
{
    switch (c)
    {
    case IoErrorCode::BadHeader: return "bad header";
    case IoErrorCode::VersionMismatch: return "version mismatch";
    case IoErrorCode::Truncated: return "truncated file";
    case IoErrorCode::NonFinite: return "non-finite value";
    case IoErrorCode::InconsistentManifest: return "inconsistent manifest";
    case IoErrorCode::KindMismatch: return "record kind mismatch";
    case IoErrorCode::FileSystem: return "file system error";
    }
    return "unknown";
}

class DatasetError : public std::runtime_error
{
public:
    DatasetError(IoErrorCode code, const std::string &what)
        : std::runtime_error(std::string(describe(code)) + ": " + what), code_(code) {}
    IoErrorCode code() const noexcept { return code_; }

private:
    IoErrorCode code_;
};

// ------------------------------------------------------------------------
// Blob level
// ------------------------------------------------------------------------

namespace detail
{
template <typename U>
void put_le(std::vector<char> &buf, U v)
{
    for (std::size_t i = 0; i < sizeof(U); ++i)
        buf.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(const char *p)
{
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return static_cast<U>(v);
}

inline std::vector<char> read_file(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DatasetError(IoErrorCode::FileSystem, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path &path, std::span<const char> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DatasetError(IoErrorCode::FileSystem, "cannot create " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw DatasetError(IoErrorCode::FileSystem, "write failed for " + path.string());
}
} // namespace detail

struct Blob
{
    RecordKind kind = RecordKind::BScan;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> values; ///< planes * rows * cols
};

inline std::vector<char> encode_blob(const Blob &blob)
{
    if (blob.values.size() != planes(blob.kind) * blob.rows * blob.cols)
        throw std::invalid_argument("encode_blob: value count does not match the header");
    for (float v : blob.values)
        if (!std::isfinite(v))
            throw DatasetError(IoErrorCode::NonFinite, "refusing to write a non-finite value");

    std::vector<char> buf;
    buf.reserve(16 + 4 * blob.values.size());
    buf.insert(buf.end(), kRecordMagic.begin(), kRecordMagic.end());
    detail::put_le<std::uint16_t>(buf, kFormatVersion);
    detail::put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(blob.kind));
    detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(blob.rows));
    detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(blob.cols));
    for (float v : blob.values)
        detail::put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(v));
    return buf;
}

inline Blob decode_blob(std::span<const char> bytes)
{
    if (bytes.size() < 16 || !std::equal(kRecordMagic.begin(), kRecordMagic.end(), bytes.begin()))
        throw DatasetError(IoErrorCode::BadHeader, "missing record magic");
    const auto version = detail::get_le<std::uint16_t>(bytes.data() + 4);
    if (version != kFormatVersion)
        throw DatasetError(IoErrorCode::VersionMismatch,
                           "format version " + std::to_string(version) + ", expected " +
                               std::to_string(kFormatVersion));
    const auto kind = detail::get_le<std::uint16_t>(bytes.data() + 6);
    if (kind < 1 || kind > 4)
        throw DatasetError(IoErrorCode::BadHeader, "unknown record kind " + std::to_string(kind));

    Blob blob;
    blob.kind = static_cast<RecordKind>(kind);
    blob.rows = detail::get_le<std::uint32_t>(bytes.data() + 8);
    blob.cols = detail::get_le<std::uint32_t>(bytes.data() + 12);
    const std::size_t count = planes(blob.kind) * blob.rows * blob.cols;
    if (bytes.size() - 16 < 4 * count)
        throw DatasetError(IoErrorCode::Truncated, "payload shorter than header dimensions");
    if (bytes.size() - 16 > 4 * count)
        throw DatasetError(IoErrorCode::BadHeader, "trailing bytes after payload");
    blob.values.resize(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        const float v = std::bit_cast<float>(detail::get_le<std::uint32_t>(bytes.data() + 16 + 4 * i));
        if (!std::isfinite(v))
            throw DatasetError(IoErrorCode::NonFinite, "value " + std::to_string(i) + " is not finite");
        blob.values[i] = v;
    }
    return blob;
}

inline void write_blob(const fs::path &path, const Blob &blob) { detail::write_file(path, encode_blob(blob)); }

inline Blob read_blob(const fs::path &path, std::optional<RecordKind> expected = std::nullopt)
{
    const auto bytes = detail::read_file(path);
    auto blob = decode_blob(bytes);
    if (expected && blob.kind != *expected)
        throw DatasetError(IoErrorCode::KindMismatch, path.string());
    return blob;
}

namespace detail
{
inline Blob matrix_blob(RecordKind kind, const Matrix<float> &m)
{
    return {kind, m.rows(), m.cols(), {m.flat().begin(), m.flat().end()}};
}

inline Matrix<float> blob_matrix(const Blob &b, std::size_t plane = 0)
{
    Matrix<float> m(b.rows, b.cols);
    const auto offset = static_cast<std::ptrdiff_t>(plane * b.rows * b.cols);
    std::copy_n(b.values.begin() + offset, b.rows * b.cols, m.data());
    return m;
}

inline json read_json(const fs::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw DatasetError(IoErrorCode::FileSystem, "cannot open " + path.string());
    try
    {
        return json::parse(in);
    }
    catch (const json::exception &e)
    {
        throw DatasetError(IoErrorCode::BadHeader, path.string() + ": " + e.what());
    }
}

inline void write_json(const fs::path &path, const json &j)
{
    const std::string text = j.dump(2) + "\n";
    write_file(path, std::span<const char>(text.data(), text.size()));
}

inline fs::path with_suffix(const fs::path &stem, const char *suffix)
{
    return fs::path(stem.string() + suffix);
}
} // namespace detail

// ------------------------------------------------------------------------
// Standalone scans and images: <stem>.bin + <stem>.json
// ------------------------------------------------------------------------

inline void write_bscan(const fs::path &stem, const BScan &b)
{
    b.validate();
    write_blob(detail::with_suffix(stem, ".bin"), detail::matrix_blob(RecordKind::BScan, b.data));
    detail::write_json(detail::with_suffix(stem, ".json"), metadata_to_json(b));
}

inline BScan read_bscan(const fs::path &stem)
{
    const auto meta = detail::read_json(detail::with_suffix(stem, ".json"));
    const auto blob = read_blob(detail::with_suffix(stem, ".bin"), RecordKind::BScan);
    try
    {
        BScan b;
        b.data = detail::blob_matrix(blob);
        b.channel = channel_from_string(meta.at("channel").get<std::string>());
        b.dx = meta.at("dx_m").get<double>();
        b.frame_rate = meta.at("frame_rate_hz").get<double>();
        b.waveform = waveform_from_json(meta.at("waveform"));
        b.provenance = provenance_from_json(meta.value("provenance", json(nullptr)));
        if (meta.value("columns", b.columns()) != b.columns() || meta.value("samples", b.samples()) != b.samples())
            throw DatasetError(IoErrorCode::InconsistentManifest, "metadata dimensions differ from blob");
        b.validate();
        return b;
    }
    catch (const json::exception &e)
    {
        throw DatasetError(IoErrorCode::BadHeader, stem.string() + ".json: " + e.what());
    }
}

/// `extra` is merged into the image metadata (algorithm, parameters, ...).
inline void write_image(const fs::path &stem, const FocusedImage &img, const json &extra = json::object())
{
    img.validate();
    write_blob(detail::with_suffix(stem, ".bin"), detail::matrix_blob(RecordKind::Image, img.data));
    json meta = metadata_to_json(img);
    for (auto it = extra.begin(); it != extra.end(); ++it)
        meta[it.key()] = it.value();
    detail::write_json(detail::with_suffix(stem, ".json"), meta);
}

inline FocusedImage read_image(const fs::path &stem, json *metadata = nullptr)
{
    const auto meta = detail::read_json(detail::with_suffix(stem, ".json"));
    const auto blob = read_blob(detail::with_suffix(stem, ".bin"), RecordKind::Image);
    try
    {
        FocusedImage img;
        img.data = detail::blob_matrix(blob);
        img.dx = meta.at("dx_m").get<double>();
        img.dz = meta.at("dz_m").get<double>();
        img.origin_depth = meta.value("origin_depth_m", 0.0);
        img.origin_x = meta.value("origin_x_m", 0.0);
        img.validate();
        if (metadata)
            *metadata = meta;
        return img;
    }
    catch (const json::exception &e)
    {
        throw DatasetError(IoErrorCode::BadHeader, stem.string() + ".json: " + e.what());
    }
}

// ------------------------------------------------------------------------
// Dataset records
// ------------------------------------------------------------------------

/// Network input (B-scan crop) and its focused target, same shape.
struct BScanPair
{
    Matrix<float> input;
    Matrix<float> target;
    bool operator==(const BScanPair &) const = default;
};

inline void write_record(const fs::path &path, const BScanPair &pair)
{
    if (pair.input.rows() != pair.target.rows() || pair.input.cols() != pair.target.cols())
        throw std::invalid_argument("BScanPair: input and target differ in shape");
    Blob b{RecordKind::BScanPair, pair.input.rows(), pair.input.cols(), {}};
    b.values.reserve(2 * pair.input.size());
    b.values.insert(b.values.end(), pair.input.flat().begin(), pair.input.flat().end());
    b.values.insert(b.values.end(), pair.target.flat().begin(), pair.target.flat().end());
    write_blob(path, b);
}

inline BScanPair read_pair_record(const fs::path &path)
{
    const auto b = read_blob(path, RecordKind::BScanPair);
    return {detail::blob_matrix(b, 0), detail::blob_matrix(b, 1)};
}

/// Sequences go to the blob; labels belong in the manifest entry.
inline void write_record(const fs::path &path, const PolSample &s)
{
    s.validate();
    Blob b{RecordKind::PolSample, 2, kSequenceLength, {}};
    b.values.reserve(2 * kSequenceLength);
    b.values.insert(b.values.end(), s.co_pol.begin(), s.co_pol.end());
    b.values.insert(b.values.end(), s.cross_pol.begin(), s.cross_pol.end());
    write_blob(path, b);
}

inline PolSample read_polsample_record(const fs::path &path)
{
    const auto b = read_blob(path, RecordKind::PolSample);
    if (b.rows != 2 || b.cols != kSequenceLength)
        throw DatasetError(IoErrorCode::BadHeader, "PolSample record must be 2 x " + std::to_string(kSequenceLength));
    PolSample s;
    s.co_pol.assign(b.values.begin(), b.values.begin() + static_cast<std::ptrdiff_t>(kSequenceLength));
    s.cross_pol.assign(b.values.begin() + static_cast<std::ptrdiff_t>(kSequenceLength), b.values.end());
    return s;
}

// ------------------------------------------------------------------------
// Manifest
// ------------------------------------------------------------------------

inline std::string record_file_name(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "records/%06zu.bin", index);
    return buf;
}

/// 64-bit FNV-1a of a canonical JSON dump, as "fnv1a64:<hex>".
inline std::string config_digest(const json &j)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump())
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Loads manifest.json and checks it against the directory: schema version,
/// record count, and that exactly the listed blobs exist under records/.
inline json load_manifest(const fs::path &dir)
{
    const auto manifest = detail::read_json(dir / "manifest.json");
    try
    {
        if (manifest.at("schema_version").get<int>() != kSchemaVersion)
            throw DatasetError(IoErrorCode::VersionMismatch, "manifest schema version");
        const auto count = manifest.at("record_count").get<std::size_t>();
        const auto &records = manifest.at("records");
        if (records.size() != count)
            throw DatasetError(IoErrorCode::InconsistentManifest,
                               "record_count " + std::to_string(count) + " but " + std::to_string(records.size()) +
                                   " entries");
        for (const auto &r : records)
            if (!fs::is_regular_file(dir / r.at("file").get<std::string>()))
                throw DatasetError(IoErrorCode::InconsistentManifest, "missing " + r.at("file").get<std::string>());
        std::size_t on_disk = 0;
        if (fs::is_directory(dir / "records"))
            for (const auto &e : fs::directory_iterator(dir / "records"))
                on_disk += (e.is_regular_file() && e.path().extension() == ".bin") ? 1 : 0;
        if (on_disk != count)
            throw DatasetError(IoErrorCode::InconsistentManifest,
                               std::to_string(on_disk) + " blobs on disk, manifest lists " + std::to_string(count));
        for (const auto &[key, stats] : manifest.at("normalization").items())
            for (const auto &[name, v] : stats.items())
                if (v.is_number() && !std::isfinite(v.get<double>()))
                    throw DatasetError(IoErrorCode::NonFinite, "normalization constant " + key + "." + name);
    }
    catch (const json::exception &e)
    {
        throw DatasetError(IoErrorCode::BadHeader, "manifest.json: " + std::string(e.what()));
    }
    return manifest;
}

} // namespace wallscan
