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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "wallscan/dataset_io.hpp"

using namespace wallscan;

namespace
{
struct Workspace
{
    fs::path dir;
    Workspace()
    {
        dir = fs::temp_directory_path() / ("wallscan_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }

    int run(const std::string &args) const
    {
        const std::string cmd =
            "cd '" + dir.string() + "' && '" + WALLSCAN_CLI_PATH + "' " + args + " > out.log 2> err.log";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    void write(const std::string &name, const std::string &text) const { std::ofstream(dir / name) << text; }
};

std::vector<char> bytes_of(const fs::path &p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

const char *kScene = R"({"permittivity": 9, "attenuation_db_per_m": 50,
  "targets": [{"x": 0.1, "z": 0.05, "material": "corroded_rebar"}]})";
const char *kScan = R"({"speed_m_s": 0.02, "frame_rate_hz": 40, "scan_length_m": 0.2,
  "noise_std": 0.02, "seed": 5, "range_samples": 256})";
} // namespace

TEST_CASE("simulate, focus, detect and eval on a one-target scene")
{
    Workspace w;
    w.write("scene.json", kScene);
    w.write("scan.json", kScan);
    REQUIRE(w.run("simulate --scene scene.json --scan scan.json --out s") == 0);
    CHECK(fs::exists(w.dir / "s" / "co.bin"));
    CHECK(fs::exists(w.dir / "s" / "cross.json"));
    REQUIRE(w.run("focus --algo rma --eps 9 --speed 0.02 --in s") == 0);
    CHECK(fs::exists(w.dir / "s" / "image.pgm"));
    const auto meta = detail::read_json(w.dir / "s" / "image.json");
    CHECK(meta.at("entropy").get<double>() > 0.0);

    REQUIRE(w.run("detect --pfa 1e-4 --in s") == 0);
    const auto det = detail::read_json(w.dir / "s" / "detections.json");
    REQUIRE(det.at("detections").size() == 1);
    const auto &d = det.at("detections")[0];
    CHECK(d.at("error").at("x_m").get<double>() < 0.01);
    CHECK(d.at("error").at("z_m").get<double>() < 0.008);

    REQUIRE(w.run("features --in s") == 0);
    std::ifstream csv(w.dir / "s" / "features.csv");
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header.rfind("detection,", 0) == 0);
    CHECK(row.find("corroded_rebar") != std::string::npos);

    REQUIRE(w.run("eval --pred s --truth s --out e") == 0);
    CHECK(fs::exists(w.dir / "e" / "cdf_x.csv"));
    CHECK(fs::exists(w.dir / "e" / "cdf_z.csv"));
}

TEST_CASE("back-projection through the command line")
{
    Workspace w;
    w.write("scene.json", kScene);
    w.write("scan.json", R"({"scan_length_m": 0.2, "range_samples": 128})");
    REQUIRE(w.run("simulate --scene scene.json --scan scan.json --out s") == 0);
    REQUIRE(w.run("focus --algo bp --eps 9 --speed 0.02 --in s --out b") == 0);
    CHECK(fs::exists(w.dir / "b" / "image.bin"));
}

TEST_CASE("exit codes")
{
    Workspace w;
    w.write("scene.json", kScene);
    w.write("scan.json", kScan);
    REQUIRE(w.run("simulate --scene scene.json --scan scan.json --out s") == 0);
    CHECK(w.run("focus --eps 0.5 --in s") == 1);
    CHECK(w.run("focus --speed 0 --in s") == 1);
    CHECK(w.run("focus --algo fk --in s") == 1);
    CHECK(w.run("frobnicate") == 1);
    CHECK(w.run("") == 1);
    CHECK(w.run("focus --in missing") == 2);

    w.write("broken.json", "{\"permittivity\": ");
    CHECK(w.run("simulate --scene broken.json --scan scan.json --out t") == 2);
    w.write("bad_eps.json", R"({"permittivity": 0.2, "targets": []})");
    CHECK(w.run("simulate --scene bad_eps.json --scan scan.json --out t") == 2);

    fs::create_directories(w.dir / "junk");
    std::ofstream(w.dir / "junk" / "co.bin") << "not a record";
    std::ofstream(w.dir / "junk" / "co.json") << R"({"channel": "co", "dx_m": 0.0005, "frame_rate_hz": 40})";
    CHECK(w.run("focus --in junk") == 2);
}

TEST_CASE("dataset export is reproducible")
{
    Workspace w;
    REQUIRE(w.run("export-dataset --kind mnet --n 100 --seed 7 --out a") == 0);
    REQUIRE(w.run("export-dataset --kind mnet --n 100 --seed 7 --out b") == 0);
    std::set<fs::path> files;
    for (const auto &e : fs::recursive_directory_iterator(w.dir / "a"))
        if (e.is_regular_file())
            files.insert(fs::relative(e.path(), w.dir / "a"));
    CHECK(files.size() == 101);
    for (const auto &f : files)
        CHECK(bytes_of(w.dir / "a" / f) == bytes_of(w.dir / "b" / f));
    CHECK(load_manifest(w.dir / "a").at("record_count") == 100);

    REQUIRE(w.run("export-dataset --kind inet --n 3 --seed 1 --out i") == 0);
    CHECK(load_manifest(w.dir / "i").at("record_type") == "bscan-pair");
    CHECK(w.run("export-dataset --kind inet --n 3 --seed 1 --out i") == 1);
    CHECK(w.run("export-dataset --kind inet --n 0 --seed 1 --out j") == 1);
}
