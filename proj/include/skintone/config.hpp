#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "skintone/extraction.hpp"
#include "skintone/face_detect.hpp"
#include "skintone/recolor.hpp"
#include "skintone/relight.hpp"
#include "skintone/stats.hpp"

namespace skintone {

// How colour is sampled from the rendered proxy image. SameMethod applies the
// cell's own method family: cheek squares over the proxy's bounding box, or
// clustering over its coverage mask. CentralPatch averages a centred square.
enum class RenderedRoi : std::uint8_t { SameMethod = 0, CentralPatch };

struct RunConfig {
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    std::vector<RecolorStrategy> recolors{std::begin(kAllRecolorStrategies), std::end(kAllRecolorStrategies)};
    std::vector<LightingKind> lightings{std::begin(kAllLightingKinds), std::end(kAllLightingKinds)};

    std::string cascade_path;  // only needed for rows without a face box
    DetectParams detect;
    RoiParams roi;
    MmmParams mmm;  // seed is overwritten by `seed`
    ChromaGate gate;
    ItaThresholds ita;

    BaseTextureParams base;  // size follows proxy_size, seed follows `seed`
    RecolorSpace recolor_space = RecolorSpace::Srgb;
    int proxy_size = 128;
    double exposure = std::numbers::pi;
    RenderedRoi rendered_roi = RenderedRoi::SameMethod;
    double central_patch_fraction = 0.2;

    Correction correction = Correction::Bonferroni;
    std::uint64_t seed = 0;

    // Execution only; not part of the config hash.
    std::filesystem::path out_dir = "out";
    int jobs = 1;
    bool cache = true;
};

nlohmann::json config_to_json(const RunConfig& config);
// Missing keys keep the values already in `base`. Throws ParseError on bad values.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);

// First 16 hex digits of the sha256 of the semantic fields.
std::string config_hash(const RunConfig& config);

// Validates the subsets and numeric ranges; throws DataError.
void validate_config(const RunConfig& config);

ExtractParams extract_params(const RunConfig& config, const Cascade* cascade = nullptr);
BaseTextureParams base_texture_params(const RunConfig& config);

}  // namespace skintone
