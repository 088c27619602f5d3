#include "skintone/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "skintone/cascade.hpp"
#include "skintone/error.hpp"
#include "skintone/records.hpp"
#include "skintone/util.hpp"

namespace skintone {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(CellStatus s) {
    switch (s) {
        case CellStatus::Ok: return "ok";
        case CellStatus::Skipped: return "skipped";
        case CellStatus::Error: return "error";
    }
    return "?";
}

std::size_t RunLedger::count(CellStatus s) const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.status == s;
    return n;
}

std::size_t RunLedger::cache_hits() const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.cached;
    return n;
}

json ledger_to_json(const RunLedger& ledger) {
    json cells = json::array();
    for (const auto& c : ledger.cells) {
        json e = {{"image_id", c.image_id},
                  {"method", std::string(to_string(c.method))},
                  {"recolor", std::string(to_string(c.recolor))},
                  {"lighting", std::string(to_string(c.lighting))},
                  {"status", std::string(to_string(c.status))},
                  {"cached", c.cached},
                  {"seconds", c.seconds}};
        if (!c.reason.empty()) e["reason"] = c.reason;
        cells.push_back(std::move(e));
    }
    return {{"config_hash", ledger.config_hash},
            {"config", ledger.config},
            {"summary",
             {{"cells", ledger.cells.size()},
              {"ok", ledger.count(CellStatus::Ok)},
              {"skipped", ledger.count(CellStatus::Skipped)},
              {"error", ledger.count(CellStatus::Error)},
              {"cache_hits", ledger.cache_hits()}}},
            {"cells", std::move(cells)}};
}

SkinEstimate extract_rendered(const RgbImage& rendered, const RgbImage& albedo, const RenderProxy& proxy, Method method,
                              const RunConfig& config) {
    const RgbImage& source = uses_albedo(method) ? albedo : rendered;
    if (config.rendered_roi == RenderedRoi::CentralPatch) {
        const int w = source.width(), h = source.height();
        const int side = std::max(1, static_cast<int>(std::lround(config.central_patch_fraction * std::min(w, h))));
        const RegionSpec patch{(w - side) / 2, (h - side) / 2, side, side, Side::Left};
        return mean_color(source, std::span(&patch, 1), method, config.roi.min_area, config.ita);
    }
    SkinMask coverage(proxy.width(), proxy.height());
    for (int y = 0; y < proxy.height(); ++y) {
        for (int x = 0; x < proxy.width(); ++x) {
            if (proxy.covered(x, y)) coverage.set(x, y, true);
        }
    }
    ExtractionInput input;
    input.photo = rendered;
    input.albedo = albedo;
    input.face = proxy.bounds();
    input.mask = std::move(coverage);
    return extract(input, method, extract_params(config));
}

EvalRecord evaluate_cell(const std::string& image_id, const SkinEstimate& reference, RecolorStrategy recolor_strategy,
                         const LightingConfig& lighting, const Texture& base, const RenderProxy& proxy,
                         const RunConfig& config) {
    const RecoloredTexture texture = recolor(base, reference.mean, recolor_strategy, config.recolor_space);
    RenderOptions options;
    options.exposure = config.exposure;
    const RgbImage rendered = render_proxy(texture, lighting, proxy, options);

    RgbImage albedo(proxy.width(), proxy.height(), Rgb{options.background.r, options.background.g, options.background.b});
    for (int y = 0; y < proxy.height(); ++y) {
        for (int x = 0; x < proxy.width(); ++x) {
            if (proxy.covered(x, y)) albedo.at(x, y) = texture.texture.texels().at(x, y);
        }
    }
    const SkinEstimate estimate = extract_rendered(rendered, albedo, proxy, reference.method, config);
    return make_record(image_id, recolor_strategy, lighting.kind, reference, estimate, texture.clip_fraction);
}

namespace {

json estimate_to_json(const SkinEstimate& e) {
    return {{"mean", {e.mean.r, e.mean.g, e.mean.b}},
            {"lab", {e.lab.L, e.lab.a, e.lab.b}},
            {"ita", e.ita},
            {"class", std::string(to_string(e.ita_class))},
            {"samples", e.samples},
            {"fallback", e.fallback_mask}};
}

SkinEstimate estimate_from_json(const json& j, Method method) {
    SkinEstimate e;
    e.method = method;
    const auto m = j.at("mean").get<std::vector<double>>();
    const auto l = j.at("lab").get<std::vector<double>>();
    if (m.size() != 3 || l.size() != 3) throw ParseError("cache: bad estimate");
    e.mean = {m[0], m[1], m[2]};
    e.lab = {l[0], l[1], l[2]};
    e.ita = j.at("ita").get<double>();
    const auto cls = parse_ita_class(j.at("class").get<std::string>());
    if (!cls) throw ParseError("cache: bad class");
    e.ita_class = *cls;
    e.samples = j.at("samples").get<std::size_t>();
    e.fallback_mask = j.at("fallback").get<bool>();
    return e;
}

json record_to_json(const EvalRecord& r) {
    return {{"reference", estimate_to_json(r.reference)},
            {"rendered", estimate_to_json(r.rendered)},
            {"delta_e", r.delta_e},
            {"ita_error", r.ita_error},
            {"clip_fraction", r.clip_fraction}};
}

// Any malformed or mismatched entry counts as a miss.
std::optional<EvalRecord> load_cached(const fs::path& path, const CellEntry& cell) {
    std::error_code ec;
    if (!fs::exists(path, ec)) return std::nullopt;
    try {
        const json j = json::parse(read_text(path));
        EvalRecord r;
        r.image_id = cell.image_id;
        r.method = cell.method;
        r.recolor = cell.recolor;
        r.lighting = cell.lighting;
        r.reference = estimate_from_json(j.at("reference"), cell.method);
        r.rendered = estimate_from_json(j.at("rendered"), cell.method);
        r.delta_e = j.at("delta_e").get<double>();
        r.ita_error = j.at("ita_error").get<double>();
        r.clip_fraction = j.at("clip_fraction").get<double>();
        return r;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string optional_digest(const std::optional<fs::path>& p) { return p ? sha256_file(*p) : std::string(); }

struct RowState {
    std::string input_digest;  // empty when hashing failed
    std::string error;         // row-level failure (unreadable input)
    std::optional<ExtractionInput> input;
    std::optional<ShLighting> sh;
    std::map<Method, SkinEstimate> references;
    std::map<Method, std::string> reference_errors;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunResult run_pipeline(const Manifest& manifest, const RunConfig& config, bool write_outputs) {
    validate_config(config);
    const std::string hash = config_hash(config);
    const bool use_cache = write_outputs && config.cache;
    const fs::path cache_dir = config.out_dir / "cache";
    if (write_outputs) fs::create_directories(use_cache ? cache_dir : config.out_dir);

    const auto& rows = manifest.rows;
    std::vector<RowState> state(rows.size());

    // Input digests key the cache.
    parallel_for(rows.size(), config.jobs, [&](std::size_t i) {
        const auto& row = rows[i];
        try {
            json key = {{"photo", sha256_file(row.photo)},
                        {"albedo", optional_digest(row.albedo)},
                        {"landmarks", optional_digest(row.landmarks)},
                        {"sh", optional_digest(row.sh)}};
            if (row.face) key["face"] = {row.face->x, row.face->y, row.face->w, row.face->h};
            state[i].input_digest = key.dump();
        } catch (const std::exception& e) {
            state[i].error = e.what();
        }
    });

    RunResult result;
    result.ledger.config_hash = hash;
    result.ledger.config = config_to_json(config);
    auto& cells = result.ledger.cells;
    std::vector<std::string> cache_keys;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (Method m : config.methods) {
            for (RecolorStrategy s : config.recolors) {
                for (LightingKind k : config.lightings) {
                    CellEntry c;
                    c.image_id = rows[i].id;
                    c.method = m;
                    c.recolor = s;
                    c.lighting = k;
                    if (uses_albedo(m) && !rows[i].albedo) {
                        c.status = CellStatus::Skipped;
                        c.reason = "no albedo map for " + std::string(to_string(m));
                    } else if (k == LightingKind::CfdSh && !rows[i].sh) {
                        c.status = CellStatus::Skipped;
                        c.reason = "no SH lighting file for cfd-sh";
                    }
                    const json key = {{"config", hash},
                                      {"inputs", state[i].input_digest},
                                      {"id", c.image_id},
                                      {"method", std::string(to_string(m))},
                                      {"recolor", std::string(to_string(s))},
                                      {"lighting", std::string(to_string(k))}};
                    cells.push_back(std::move(c));
                    cache_keys.push_back(sha256_hex(key.dump()));
                }
            }
        }
    }
    const std::size_t per_row = config.methods.size() * config.recolors.size() * config.lightings.size();

    std::vector<std::optional<EvalRecord>> outcomes(cells.size());
    if (use_cache) {
        parallel_for(cells.size(), config.jobs, [&](std::size_t c) {
            if (cells[c].status != CellStatus::Ok || !state[c / per_row].error.empty()) return;
            const auto t0 = std::chrono::steady_clock::now();
            outcomes[c] = load_cached(cache_dir / (cache_keys[c] + ".json"), cells[c]);
            if (outcomes[c]) {
                cells[c].cached = true;
                cells[c].seconds = seconds_since(t0);
            }
        });
    }

    // What each row still has to compute.
    std::vector<std::vector<Method>> needed_methods(rows.size());
    std::vector<bool> needs_sh(rows.size(), false);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].status != CellStatus::Ok || outcomes[c]) continue;
        auto& methods = needed_methods[c / per_row];
        if (std::find(methods.begin(), methods.end(), cells[c].method) == methods.end()) methods.push_back(cells[c].method);
        if (cells[c].lighting == LightingKind::CfdSh) needs_sh[c / per_row] = true;
    }

    std::unique_ptr<Cascade> cascade;
    std::string cascade_error;
    const bool want_cascade = [&] {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].face) continue;
            for (Method m : needed_methods[i]) {
                if (!uses_clustering(m)) return true;
            }
        }
        return false;
    }();
    if (want_cascade) {
        if (config.cascade_path.empty()) {
            cascade_error = "no face box in the manifest and no cascade configured";
        } else {
            try {
                cascade = std::make_unique<Cascade>(load_cascade(config.cascade_path));
            } catch (const std::exception& e) {
                cascade_error = e.what();
            }
        }
    }
    const ExtractParams params = extract_params(config, cascade.get());

    // Load inputs, then one reference estimate per (row, method).
    parallel_for(rows.size(), config.jobs, [&](std::size_t i) {
        if (needed_methods[i].empty() || !state[i].error.empty()) return;
        const auto& row = rows[i];
        try {
            ExtractionInput input;
            input.photo = read_image(row.photo.string());
            if (row.albedo) input.albedo = read_image(row.albedo->string());
            if (row.landmarks) input.landmarks = read_landmarks(row.landmarks->string());
            input.face = row.face;
            state[i].input = std::move(input);
            if (needs_sh[i]) state[i].sh = read_sh_json(row.sh->string());
        } catch (const std::exception& e) {
            state[i].error = e.what();
        }
    });
    std::vector<std::pair<std::size_t, Method>> reference_tasks;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!state[i].error.empty()) continue;
        for (Method m : needed_methods[i]) reference_tasks.emplace_back(i, m);
    }
    std::vector<std::optional<SkinEstimate>> reference_out(reference_tasks.size());
    std::vector<std::string> reference_err(reference_tasks.size());
    parallel_for(reference_tasks.size(), config.jobs, [&](std::size_t t) {
        const auto [i, m] = reference_tasks[t];
        try {
            if (!uses_clustering(m) && !rows[i].face && !cascade) throw DataError(cascade_error);
            reference_out[t] = extract(*state[i].input, m, params);
        } catch (const std::exception& e) {
            reference_err[t] = e.what();
        }
    });
    for (std::size_t t = 0; t < reference_tasks.size(); ++t) {
        const auto [i, m] = reference_tasks[t];
        if (reference_out[t]) {
            state[i].references[m] = *reference_out[t];
        } else {
            state[i].reference_errors[m] = reference_err[t];
        }
    }

    const Texture base = synthetic_base_texture(base_texture_params(config));
    const RenderProxy proxy = RenderProxy::sphere(config.proxy_size, config.proxy_size);

    parallel_for(cells.size(), config.jobs, [&](std::size_t c) {
        auto& cell = cells[c];
        const auto& row_state = state[c / per_row];
        if (cell.status != CellStatus::Ok || outcomes[c]) return;
        const auto t0 = std::chrono::steady_clock::now();
        if (!row_state.error.empty()) {
            cell.status = CellStatus::Error;
            cell.reason = row_state.error;
            return;
        }
        if (const auto it = row_state.reference_errors.find(cell.method); it != row_state.reference_errors.end()) {
            cell.status = CellStatus::Error;
            cell.reason = "reference extraction: " + it->second;
            return;
        }
        try {
            LightingConfig lighting{cell.lighting, std::nullopt};
            if (cell.lighting == LightingKind::CfdSh) lighting.sh = row_state.sh;
            outcomes[c] = evaluate_cell(cell.image_id, row_state.references.at(cell.method), cell.recolor, lighting, base,
                                        proxy, config);
            if (use_cache) write_atomic(cache_dir / (cache_keys[c] + ".json"), record_to_json(*outcomes[c]).dump());
        } catch (const std::exception& e) {
            cell.status = CellStatus::Error;
            cell.reason = e.what();
            outcomes[c].reset();
        }
        cell.seconds = seconds_since(t0);
    });

    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].status == CellStatus::Ok && outcomes[c]) result.records.push_back(std::move(*outcomes[c]));
    }

    if (write_outputs) {
        write_atomic(config.out_dir / "records.csv", records_to_csv(result.records, hash));
        write_atomic(config.out_dir / "ledger.json", ledger_to_json(result.ledger).dump(2) + "\n");
        write_atomic(config.out_dir / "config.json",
                     json{{"config_hash", hash}, {"config", result.ledger.config}}.dump(2) + "\n");
    }
    return result;
}

}  // namespace skintone
