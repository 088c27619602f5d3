#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "skintone/cascade.hpp"
#include "skintone/config.hpp"
#include "skintone/error.hpp"
#include "skintone/extraction.hpp"
#include "skintone/fixtures.hpp"
#include "skintone/manifest.hpp"
#include "skintone/recolor.hpp"
#include "skintone/relight.hpp"
#include "skintone/report.hpp"
#include "skintone/run.hpp"
#include "skintone/util.hpp"

using namespace skintone;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

json estimate_json(const SkinEstimate& e) {
    return {{"method", std::string(to_string(e.method))},
            {"srgb", {e.mean.r, e.mean.g, e.mean.b}},
            {"lab", {e.lab.L, e.lab.a, e.lab.b}},
            {"ita", e.ita},
            {"ita_class", std::string(to_string(e.ita_class))},
            {"samples", e.samples},
            {"fallback_mask", e.fallback_mask}};
}

std::optional<FaceBox> face_from(const std::vector<int>& v) {
    if (v.empty()) return std::nullopt;
    if (v.size() != 4) throw CLI::ValidationError("--face", "expects x y w h");
    return FaceBox{v[0], v[1], v[2], v[3]};
}

SrgbColor color_from(const std::vector<double>& v, const char* name) {
    if (v.size() != 3) throw CLI::ValidationError(name, "expects three values in [0, 1]");
    return {v[0], v[1], v[2]};
}

template <typename T, typename Parse>
std::vector<T> parse_names(const std::vector<std::string>& names, const char* flag, Parse parse) {
    std::vector<T> out;
    for (const auto& n : names) {
        const auto v = parse(n);
        if (!v) throw CLI::ValidationError(flag, "unknown value '" + n + "'");
        if (std::find(out.begin(), out.end(), *v) == out.end()) out.push_back(*v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skin tone extraction, recoloring and relighting evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "skintone 1.0.0");

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::string out_override;

    // detect
    auto* detect = app.add_subcommand("detect", "Detect faces with a Haar cascade");
    std::string detect_image, detect_cascade;
    DetectParams detect_params;
    detect->add_option("image", detect_image, "Input image (PNG or PPM)")->required();
    detect->add_option("--cascade", detect_cascade, "Cascade XML")->required();
    detect->add_option("--scale-factor", detect_params.scale_factor, "Pyramid step")->capture_default_str();
    detect->add_option("--min-size", detect_params.min_size, "Smallest face side in pixels")->capture_default_str();
    detect->add_option("--min-neighbors", detect_params.min_neighbors, "Grouping threshold")->capture_default_str();
    detect->add_option("--jobs", detect_params.threads, "Worker threads")->capture_default_str();

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "Estimate skin colour from one image");
    std::string ex_photo, ex_albedo, ex_landmarks, ex_cascade, ex_method = "MMM";
    std::vector<int> ex_face;
    extract_cmd->add_option("photo", ex_photo, "Photograph")->required();
    extract_cmd->add_option("--albedo", ex_albedo, "Albedo map for T-Cheek / T-MMM");
    extract_cmd->add_option("--landmarks", ex_landmarks, "Landmark file (x y per line)");
    extract_cmd->add_option("--face", ex_face, "Face box x y w h")->expected(4);
    extract_cmd->add_option("--cascade", ex_cascade, "Cascade XML used when --face is absent");
    extract_cmd->add_option("--method", ex_method, "Cheek, MMM, T-Cheek, T-MMM or all")->capture_default_str();

    // recolor
    auto* recolor_cmd = app.add_subcommand("recolor", "Recolor a base texture towards a target colour");
    std::string rc_base, rc_out, rc_strategy = "normalize", rc_space = "srgb";
    std::vector<double> rc_target;
    int rc_size = 128;
    recolor_cmd->add_option("--target", rc_target, "Target sRGB r g b in [0, 1]")->required()->expected(3);
    recolor_cmd->add_option("--base", rc_base, "Base texture; synthetic when omitted");
    recolor_cmd->add_option("--size", rc_size, "Synthetic base size")->capture_default_str();
    recolor_cmd->add_option("--strategy", rc_strategy, "normalize or variation")->capture_default_str();
    recolor_cmd->add_option("--space", rc_space, "srgb or linear")->capture_default_str();
    recolor_cmd->add_option("-o,--output", rc_out, "Output PNG or PPM")->required();

    // render
    auto* render_cmd = app.add_subcommand("render", "Shade a texture on the sphere proxy");
    std::string rn_texture, rn_out, rn_lighting = "frontal", rn_sh, rn_proxy = "sphere";
    double rn_exposure = std::numbers::pi;
    render_cmd->add_option("texture", rn_texture, "Texture image")->required();
    render_cmd->add_option("--lighting", rn_lighting, "frontal, paramount or cfd-sh")->capture_default_str();
    render_cmd->add_option("--sh", rn_sh, "SH coefficient JSON for cfd-sh");
    render_cmd->add_option("--proxy", rn_proxy, "sphere or flat")->capture_default_str();
    render_cmd->add_option("--exposure", rn_exposure, "Exposure multiplier")->capture_default_str();
    render_cmd->add_option("-o,--output", rn_out, "Output PNG or PPM")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "Evaluate every manifest image x method x recolor x lighting cell");
    std::string run_manifest;
    std::vector<std::string> run_methods, run_recolors, run_lightings;
    std::string run_cascade, run_roi, run_space, run_correction;
    bool run_no_cache = false;
    run_cmd->add_option("manifest", run_manifest, "Manifest CSV or JSON")->required();
    run_cmd->add_option("--config", config_path, "RunConfig JSON");
    run_cmd->add_option("--seed", seed, "Master seed");
    run_cmd->add_option("--jobs", jobs, "Worker threads");
    run_cmd->add_option("--out", out_override, "Output directory");
    run_cmd->add_option("--methods", run_methods, "Subset of Cheek MMM T-Cheek T-MMM");
    run_cmd->add_option("--recolors", run_recolors, "Subset of normalize variation");
    run_cmd->add_option("--lightings", run_lightings, "Subset of cfd-sh frontal paramount");
    run_cmd->add_option("--cascade", run_cascade, "Cascade XML for rows without a face box");
    run_cmd->add_option("--rendered-roi", run_roi, "same-method or central-patch");
    run_cmd->add_option("--recolor-space", run_space, "srgb or linear");
    run_cmd->add_option("--correction", run_correction, "bonferroni or holm");
    run_cmd->add_flag("--no-cache", run_no_cache, "Ignore and do not write the cell cache");

    // report
    auto* report_cmd = app.add_subcommand("report", "Build the summary bundle from a records CSV");
    std::string rp_records, rp_ledger, rp_out, rp_correction = "bonferroni";
    report_cmd->add_option("records", rp_records, "records.csv from run")->required();
    report_cmd->add_option("--ledger", rp_ledger, "ledger.json from run");
    report_cmd->add_option("--out", rp_out, "Report directory (default: <records dir>/reports)");
    report_cmd->add_option("--correction", rp_correction, "bonferroni or holm")->capture_default_str();

    // gen-fixtures
    auto* gen_cmd = app.add_subcommand("gen-fixtures", "Write a synthetic manifest with photos, albedos and SH files");
    std::string gen_out;
    FixtureParams gen_params;
    gen_cmd->add_option("--out", gen_out, "Output directory")->required();
    gen_cmd->add_option("--count", gen_params.count, "Number of faces")->capture_default_str();
    gen_cmd->add_option("--size", gen_params.size, "Image side in pixels")->capture_default_str();
    gen_cmd->add_option("--noise", gen_params.noise, "Albedo noise amplitude")->capture_default_str();
    gen_cmd->add_option("--seed", gen_params.seed, "Noise seed")->capture_default_str();
    gen_cmd->add_flag("--closed-loop", gen_params.closed_loop, "Albedo = photo under identity ambient light");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*detect) {
            const Cascade cascade = load_cascade(detect_cascade);
            const auto boxes = detect_faces(read_image(detect_image), cascade, detect_params);
            json out = json::array();
            for (const auto& b : boxes) out.push_back({b.x, b.y, b.w, b.h});
            std::cout << json{{"faces", out}}.dump() << "\n";
        } else if (*extract_cmd) {
            ExtractionInput input;
            input.photo = read_image(ex_photo);
            if (!ex_albedo.empty()) input.albedo = read_image(ex_albedo);
            if (!ex_landmarks.empty()) input.landmarks = read_landmarks(ex_landmarks);
            input.face = face_from(ex_face);
            std::optional<Cascade> cascade;
            if (!ex_cascade.empty()) cascade = load_cascade(ex_cascade);
            ExtractParams params;
            params.cascade = cascade ? &*cascade : nullptr;
            std::vector<Method> methods;
            if (ex_method == "all") {
                methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
                if (!input.albedo) methods = {Method::Cheek, Method::Mmm};
            } else {
                methods = parse_names<Method>({ex_method}, "--method", parse_method);
            }
            json out = json::array();
            for (Method m : methods) out.push_back(estimate_json(extract(input, m, params)));
            std::cout << out.dump(2) << "\n";
        } else if (*recolor_cmd) {
            const auto strategy = parse_recolor_strategy(rc_strategy);
            const auto space = parse_recolor_space(rc_space);
            if (!strategy) throw CLI::ValidationError("--strategy", "normalize or variation");
            if (!space) throw CLI::ValidationError("--space", "srgb or linear");
            BaseTextureParams bp;
            bp.width = bp.height = rc_size;
            const Texture base = rc_base.empty() ? synthetic_base_texture(bp) : Texture(read_image(rc_base));
            const auto result = recolor(base, color_from(rc_target, "--target"), *strategy, *space);
            write_image(rc_out, result.texture.texels());
            std::cout << json{{"output", rc_out}, {"clip_fraction", result.clip_fraction}}.dump() << "\n";
        } else if (*render_cmd) {
            const auto kind = parse_lighting_kind(rn_lighting);
            if (!kind) throw CLI::ValidationError("--lighting", "frontal, paramount or cfd-sh");
            LightingConfig light{*kind, std::nullopt};
            if (*kind == LightingKind::CfdSh) {
                if (rn_sh.empty()) throw CLI::ValidationError("--sh", "required for cfd-sh lighting");
                light.sh = read_sh_json(rn_sh);
            }
            const Texture texture(read_image(rn_texture));
            RenderProxy proxy = rn_proxy == "flat" ? RenderProxy::flat(texture.width(), texture.height())
                                                   : RenderProxy::sphere(texture.width(), texture.height());
            RenderOptions options;
            options.exposure = rn_exposure;
            write_image(rn_out, render_proxy(texture, light.expand(), proxy, options));
        } else if (*run_cmd) {
            RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
            if (seed) config.seed = *seed;
            if (jobs) config.jobs = *jobs;
            if (!out_override.empty()) config.out_dir = out_override;
            if (!run_methods.empty()) config.methods = parse_names<Method>(run_methods, "--methods", parse_method);
            if (!run_recolors.empty()) {
                config.recolors = parse_names<RecolorStrategy>(run_recolors, "--recolors", parse_recolor_strategy);
            }
            if (!run_lightings.empty()) {
                config.lightings = parse_names<LightingKind>(run_lightings, "--lightings", parse_lighting_kind);
            }
            if (!run_cascade.empty()) config.cascade_path = run_cascade;
            json overrides = json::object();
            if (!run_roi.empty()) overrides["rendered_roi"] = run_roi;
            if (!run_space.empty()) overrides["recolor_space"] = run_space;
            if (!run_correction.empty()) overrides["correction"] = run_correction;
            config = config_from_json(overrides, config);
            if (run_no_cache) config.cache = false;

            const Manifest manifest = load_manifest(run_manifest);
            const RunResult result = run_pipeline(manifest, config);
            const auto& ledger = result.ledger;
            std::cout << "config " << ledger.config_hash << ": " << ledger.cells.size() << " cells, "
                      << ledger.count(CellStatus::Ok) << " ok (" << ledger.cache_hits() << " cached), "
                      << ledger.count(CellStatus::Skipped) << " skipped, " << ledger.count(CellStatus::Error)
                      << " errors -> " << (config.out_dir / "records.csv").string() << "\n";
            for (const auto& c : ledger.cells) {
                if (c.status == CellStatus::Error) {
                    std::cerr << "error: " << c.image_id << " " << to_string(c.method) << " " << to_string(c.recolor)
                              << " " << to_string(c.lighting) << ": " << c.reason << "\n";
                }
            }
        } else if (*report_cmd) {
            ReportOptions options;
            const auto parsed = config_from_json(json{{"correction", rp_correction}});
            options.correction = parsed.correction;
            if (!rp_ledger.empty()) options.ledger = json::parse(read_text(rp_ledger));
            const std::filesystem::path dir =
                rp_out.empty() ? std::filesystem::path(rp_records).parent_path() / "reports" : std::filesystem::path(rp_out);
            const auto files = write_report(read_records(rp_records), dir, options);
            std::cout << "wrote " << files.size() << " files to " << dir.string() << "\n";
        } else if (*gen_cmd) {
            const Manifest manifest = generate_fixtures(gen_out, gen_params);
            std::cout << "wrote " << manifest.rows.size() << " fixtures to " << gen_out << "\n";
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const skintone::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
