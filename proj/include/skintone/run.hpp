#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "skintone/analysis.hpp"
#include "skintone/config.hpp"
#include "skintone/manifest.hpp"

namespace skintone {

enum class CellStatus : std::uint8_t { Ok, Skipped, Error };
std::string_view to_string(CellStatus s);

struct CellEntry {
    std::string image_id;
    Method method = Method::Cheek;
    RecolorStrategy recolor = RecolorStrategy::Normalize;
    LightingKind lighting = LightingKind::Frontal;
    CellStatus status = CellStatus::Ok;
    std::string reason;  // skip or error message
    bool cached = false;
    double seconds = 0;
};

struct RunLedger {
    std::string config_hash;
    nlohmann::json config;
    std::vector<CellEntry> cells;  // manifest order, then method, recolor, lighting

    std::size_t count(CellStatus s) const;
    std::size_t cache_hits() const;
};

nlohmann::json ledger_to_json(const RunLedger& ledger);

struct RunResult {
    RunLedger ledger;
    std::vector<EvalRecord> records;  // Ok cells, ledger order
};

// Sampling of the rendered proxy image for one method. `albedo` is the
// recoloured texture laid over the proxy, used by the T-variants.
SkinEstimate extract_rendered(const RgbImage& rendered, const RgbImage& albedo, const RenderProxy& proxy, Method method,
                              const RunConfig& config);

// Recolour the base towards the reference, render, re-extract and compare.
EvalRecord evaluate_cell(const std::string& image_id, const SkinEstimate& reference, RecolorStrategy recolor,
                         const LightingConfig& lighting, const Texture& base, const RenderProxy& proxy,
                         const RunConfig& config);

// Executes every cell of manifest x config. Per-cell failures land in the
// ledger; nothing short of an unusable config or output directory throws.
// With write_outputs, writes out_dir/{records.csv, ledger.json, config.json}
// and uses out_dir/cache when config.cache is set.
RunResult run_pipeline(const Manifest& manifest, const RunConfig& config, bool write_outputs = true);

}  // namespace skintone
