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

// wallscan: batch front end for simulation, focusing, detection, feature
// extraction and dataset export.
//
// Exit codes: 0 ok, 1 usage, 2 bad input file, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wallscan/wallscan.hpp"

namespace
{

using namespace wallscan;

enum ExitCode : int
{
    kOk = 0,
    kUsage = 1,
    kBadInput = 2,
    kNumerical = 3,
};

/// Failure attributable to an input file rather than to the computation.
struct InputError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

template <typename F>
auto load(const fs::path &what, F &&f) -> decltype(f())
{
    try
    {
        return f();
    }
    catch (const std::exception &e)
    {
        throw InputError(what.string() + ": " + e.what());
    }
}

void require_dir(const fs::path &dir)
{
    if (!fs::is_directory(dir))
        throw InputError(dir.string() + ": not a directory");
}

/// 8-bit binary PGM, linear over [0, max]; x runs left to right, depth down.
void write_pgm(const fs::path &path, const FocusedImage &img)
{
    const auto flat = img.data.flat();
    const float peak = flat.empty() ? 0.0f : *std::max_element(flat.begin(), flat.end());
    std::ofstream os(path, std::ios::binary);
    os << "P5\n" << img.nx() << ' ' << img.nz() << "\n255\n";
    for (std::size_t z = 0; z < img.nz(); ++z)
        for (std::size_t x = 0; x < img.nx(); ++x)
        {
            const double v = peak > 0.0f ? img.data(x, z) / peak : 0.0;
            os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)))));
        }
    if (!os)
        throw std::runtime_error(path.string() + ": write failed");
}

// ------------------------------------------------------------------------

struct SimulateArgs
{
    std::string scene, scan, out;
};

int run_simulate(const SimulateArgs &a)
{
    const Scene scene = load(a.scene, [&] {
        Scene s = scene_from_json(detail::read_json(a.scene));
        s.validate();
        return s;
    });
    const json scan_json = load(a.scan, [&] { return detail::read_json(a.scan); });
    const ScanConfig scan = load(a.scan, [&] {
        ScanConfig c = scan_from_json(scan_json);
        c.validate();
        return c;
    });
    const WaveformConfig wf = load(a.scan, [&] {
        return scan_json.contains("waveform") ? waveform_from_json(scan_json.at("waveform")) : WaveformConfig{};
    });

    fs::create_directories(a.out);
    const fs::path out(a.out);
    write_bscan(out / "co", synthesize_bscan(scene, scan, wf, Channel::CoPol));
    write_bscan(out / "cross", synthesize_bscan(scene, scan, wf, Channel::CrossPol));
    detail::write_json(out / "scene.json", to_json(scene));
    json sj = to_json(scan);
    sj["waveform"] = to_json(wf);
    detail::write_json(out / "scan.json", sj);
    std::cout << "simulated " << scan.columns() << " x " << scan.range_samples << " samples, "
              << scene.targets.size() << " target(s) -> " << out.string() << '\n';
    return kOk;
}

struct FocusArgs
{
    std::string algo = "rma", in, out, channel = "co";
    double eps = 9.0, speed = 0.02;
};

int run_focus(const FocusArgs &a)
{
    require_dir(a.in);
    const fs::path in(a.in), out(a.out.empty() ? a.in : a.out);
    const BScan b = load(in / a.channel, [&] { return read_bscan(in / a.channel); });

    const FocusedImage img = a.algo == "rma" ? rma(b, a.eps, a.speed)
                                             : backproject(b, a.eps, a.speed, default_grid(b, a.eps, a.speed));
    const double entropy = image_entropy(img);
    fs::create_directories(out);
    json extra = {{"algorithm", a.algo},
                  {"permittivity", a.eps},
                  {"speed_m_s", a.speed},
                  {"channel", a.channel},
                  {"entropy", entropy},
                  {"provenance", to_json(b.provenance)}};
    write_image(out / "image", img, extra);
    write_pgm(out / "image.pgm", img);
    std::printf("entropy %.6f\n", entropy);
    return kOk;
}

struct DetectArgs
{
    std::string in;
    double pfa = 1e-4;
    std::size_t training = 8, guard = 6;
};

int run_detect(const DetectArgs &a)
{
    require_dir(a.in);
    const fs::path in(a.in);
    json meta;
    const FocusedImage img = load(in / "image", [&] { return read_image(in / "image", &meta); });
    const auto provenance = load(in / "image.json", [&] { return provenance_from_json(meta.value("provenance", json(nullptr))); });

    CfarConfig cfg;
    cfg.pfa = a.pfa;
    cfg.training = a.training;
    cfg.guard = a.guard;
    cfg.validate();
    const auto found = cfar_detect(img, cfg);

    json list = json::array();
    for (const auto &d : found)
    {
        json jd = to_json(d);
        if (provenance)
        {
            const auto k = nearest_target(d, provenance->scene.targets);
            if (k >= 0)
            {
                const auto [ex, ez] = localization_error(d, provenance->scene.targets[static_cast<std::size_t>(k)]);
                jd["error"] = {{"target", k}, {"x_m", ex}, {"z_m", ez}};
            }
        }
        list.push_back(jd);
    }
    detail::write_json(in / "detections.json",
                       {{"pfa", cfg.pfa}, {"training", cfg.training}, {"guard", cfg.guard}, {"detections", list}});
    std::cout << found.size() << " detection(s)\n";
    return kOk;
}

std::vector<Detection> read_detections(const fs::path &path)
{
    return load(path, [&] {
        std::vector<Detection> out;
        const json doc = detail::read_json(path);
        for (const auto &j : doc.at("detections"))
            out.push_back(detection_from_json(j));
        return out;
    });
}

struct FeaturesArgs
{
    std::string in;
    std::size_t window = 10;
    double wall_index = 3.0;
};

int run_features(const FeaturesArgs &a)
{
    require_dir(a.in);
    const fs::path in(a.in);
    const BScan co = load(in / "co", [&] { return read_bscan(in / "co"); });
    const BScan cross = load(in / "cross", [&] { return read_bscan(in / "cross"); });
    const auto dets = read_detections(in / "detections.json");

    std::ofstream os(in / "features.csv");
    os << "detection,x_m,z_m,column,clamped,co_energy,cross_energy,cross_co_ratio,"
          "mean_abs_gamma,valid_bins,width_s,centroid_hz,skewness,material\n";
    for (std::size_t i = 0; i < dets.size(); ++i)
    {
        const auto ex = extract_sequence(co, cross, dets[i], a.window);
        const std::vector<double> c(ex.sample.co_pol.begin(), ex.sample.co_pol.end());
        const std::vector<double> x(ex.sample.cross_pol.begin(), ex.sample.cross_pol.end());
        double ec = 0.0, ex2 = 0.0;
        for (double v : c)
            ec += v * v;
        for (double v : x)
            ex2 += v * v;
        const auto spec = estimate_reflection_spectrum(c, co.waveform);
        double mag = 0.0;
        for (std::size_t k = 0; k < spec.gamma.size(); ++k)
            if (spec.valid[k])
                mag += std::abs(spec.gamma[k]);
        const std::size_t nv = spec.valid_count();

        char buf[512];
        std::string disp = ",,";
        try
        {
            const auto f = dispersion_features(c, co.waveform);
            std::snprintf(buf, sizeof buf, "%.6e,%.6e,%.6f", f.width, f.spectral_centroid, f.spectral_skewness);
            disp = buf;
        }
        catch (const std::invalid_argument &)
        {
        }
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%zu,%d,%.6e,%.6e,%.6f,%.6f,%zu,", i, dets[i].x, dets[i].z,
                      ex.column, ex.clamped ? 1 : 0, ec, ex2, ec > 0.0 ? std::sqrt(ex2 / ec) : 0.0,
                      nv ? mag / static_cast<double>(nv) : 0.0, nv);
        os << buf << disp << ','
           << (ex.sample.material >= 0 ? to_string(static_cast<Material>(ex.sample.material)) : "") << '\n';
    }
    std::cout << dets.size() << " feature row(s) -> " << (in / "features.csv").string() << '\n';
    return kOk;
}

struct ExportArgs
{
    std::string kind, out;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

int run_export(const ExportArgs &a)
{
    const auto summary = a.kind == "inet" ? generate_inet_dataset(a.out, a.n, InetSampler{}, a.seed)
                                          : generate_mnet_dataset(a.out, a.n, a.seed);
    std::cout << summary.records << " record(s): " << summary.train << " train, " << summary.test << " test\n";
    return kOk;
}

struct EvalArgs
{
    std::string pred, truth, out;
};

void write_cdf(const fs::path &path, std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    std::ofstream os(path);
    os << "error_m,fraction\n";
    char buf[64];
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        std::snprintf(buf, sizeof buf, "%.6e,%.6f\n", v[i], static_cast<double>(i + 1) / static_cast<double>(v.size()));
        os << buf;
    }
}

double median(std::vector<double> v)
{
    if (v.empty())
        return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Pairs every detections.json under --pred with scene.json at the same
/// relative location under --truth; each detection is scored against its
/// nearest ground-truth target.
int run_eval(const EvalArgs &a)
{
    require_dir(a.pred);
    require_dir(a.truth);
    const fs::path pred(a.pred), truth(a.truth), out(a.out.empty() ? a.pred : a.out);
    std::vector<fs::path> files;
    for (const auto &e : fs::recursive_directory_iterator(pred))
        if (e.is_regular_file() && e.path().filename() == "detections.json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw InputError(pred.string() + ": no detections.json found");

    std::vector<double> ex, ez;
    for (const auto &f : files)
    {
        const fs::path scene_path = truth / fs::relative(f.parent_path(), pred) / "scene.json";
        const Scene scene = load(scene_path, [&] { return scene_from_json(detail::read_json(scene_path)); });
        for (const auto &d : read_detections(f))
        {
            const auto k = nearest_target(d, scene.targets);
            if (k < 0)
                continue;
            const auto [dx, dz] = localization_error(d, scene.targets[static_cast<std::size_t>(k)]);
            ex.push_back(dx);
            ez.push_back(dz);
        }
    }
    fs::create_directories(out);
    write_cdf(out / "cdf_x.csv", ex);
    write_cdf(out / "cdf_z.csv", ez);
    std::printf("%zu matched detection(s); median |dx| %.4f m, median |dz| %.4f m\n", ex.size(), median(ex),
                median(ez));
    return kOk;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"in-wall impulse radar imaging and material analysis"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto *c_sim = app.add_subcommand("simulate", "synthesize co- and cross-polarized B-scans");
    c_sim->add_option("--scene", sim.scene, "scene JSON")->required()->check(CLI::ExistingFile);
    c_sim->add_option("--scan", sim.scan, "scan JSON")->required()->check(CLI::ExistingFile);
    c_sim->add_option("--out", sim.out, "output directory")->required();

    FocusArgs foc;
    auto *c_foc = app.add_subcommand("focus", "focus a B-scan into an image");
    c_foc->add_option("--algo", foc.algo, "rma or bp")->check(CLI::IsMember({"rma", "bp"}));
    c_foc->add_option("--eps", foc.eps, "wall permittivity (>= 1)")->check(CLI::Range(1.0, 1e6));
    c_foc->add_option("--speed", foc.speed, "scan speed in m/s (> 0)")
        ->check(CLI::Range(std::nextafter(0.0, 1.0), 1e6));
    c_foc->add_option("--channel", foc.channel, "co or cross")->check(CLI::IsMember({"co", "cross"}));
    c_foc->add_option("--in", foc.in, "scan directory")->required();
    c_foc->add_option("--out", foc.out, "output directory (default: --in)");

    DetectArgs det;
    auto *c_det = app.add_subcommand("detect", "CA-CFAR detection on a focused image");
    c_det->add_option("--pfa", det.pfa, "false-alarm probability")->check(CLI::Range(1e-300, 0.999999));
    c_det->add_option("--training", det.training, "training cells per side");
    c_det->add_option("--guard", det.guard, "guard cells per side");
    c_det->add_option("--in", det.in, "image directory")->required();

    FeaturesArgs fea;
    auto *c_fea = app.add_subcommand("features", "polarimetric and dispersion features per detection");
    c_fea->add_option("--in", fea.in, "directory with co, cross and detections.json")->required();
    c_fea->add_option("--window", fea.window, "column search window");

    ExportArgs exp;
    auto *c_exp = app.add_subcommand("export-dataset", "write a training dataset");
    c_exp->add_option("--kind", exp.kind, "inet or mnet")->required()->check(CLI::IsMember({"inet", "mnet"}));
    c_exp->add_option("--n", exp.n, "record count")->required()->check(CLI::PositiveNumber);
    c_exp->add_option("--seed", exp.seed, "generator seed");
    c_exp->add_option("--out", exp.out, "output directory")->required();

    EvalArgs ev;
    auto *c_ev = app.add_subcommand("eval", "localization error CDFs");
    c_ev->add_option("--pred", ev.pred, "tree with detections.json files")->required();
    c_ev->add_option("--truth", ev.truth, "tree with matching scene.json files")->required();
    c_ev->add_option("--out", ev.out, "output directory (default: --pred)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try
    {
        if (*c_sim)
            return run_simulate(sim);
        if (*c_foc)
            return run_focus(foc);
        if (*c_det)
            return run_detect(det);
        if (*c_fea)
            return run_features(fea);
        if (*c_exp)
            return run_export(exp);
        if (*c_ev)
            return run_eval(ev);
    }
    catch (const InputError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
    catch (const DatasetError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == IoErrorCode::FileSystem ? kUsage : kBadInput;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
