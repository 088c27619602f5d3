#include "skintone/config.hpp"

#include <algorithm>
#include <set>

#include "skintone/error.hpp"
#include "skintone/util.hpp"

namespace skintone {

using nlohmann::json;

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const json& j, const char* key, Parse parse) {
    if (!j.is_array()) throw ParseError(std::string("config: '") + key + "' must be an array");
    std::vector<T> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw ParseError(std::string("config: '") + key + "' entries must be strings");
        const auto parsed = parse(v.get<std::string>());
        if (!parsed) throw ParseError(std::string("config: unknown ") + key + " entry '" + v.get<std::string>() + "'");
        if (std::find(out.begin(), out.end(), *parsed) == out.end()) out.push_back(*parsed);
    }
    return out;
}

template <typename T>
void read(const json& j, const char* key, T& target) {
    if (!j.contains(key)) return;
    try {
        target = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

template <typename T, typename Fn>
json names(const std::vector<T>& v, Fn fn) {
    json out = json::array();
    for (const auto& x : v) out.push_back(std::string(fn(x)));
    return out;
}

json semantic_json(const RunConfig& c) {
    json j;
    j["methods"] = names(c.methods, [](Method m) { return to_string(m); });
    j["recolors"] = names(c.recolors, [](RecolorStrategy s) { return to_string(s); });
    j["lightings"] = names(c.lightings, [](LightingKind k) { return to_string(k); });
    j["cascade"] = c.cascade_path;
    j["detect"] = {{"scale_factor", c.detect.scale_factor}, {"min_size", c.detect.min_size},
                   {"max_size", c.detect.max_size},         {"step", c.detect.step},
                   {"min_neighbors", c.detect.min_neighbors}, {"group_iou", c.detect.group_iou},
                   {"min_variance", c.detect.min_variance}};
    j["roi"] = {{"width_fraction", c.roi.width_fraction},
                {"x_offset_fraction", c.roi.x_offset_fraction},
                {"y_offset_fraction", c.roi.y_offset_fraction},
                {"anchor", c.roi.anchor == RoiAnchor::Edges ? "edges" : "centers"},
                {"min_area", c.roi.min_area}};
    j["mmm"] = {{"k", c.mmm.k}, {"top_m", c.mmm.top_m}, {"max_iterations", c.mmm.max_iterations},
                {"tolerance", c.mmm.tolerance}};
    j["chroma_gate"] = {{"l", {c.gate.l_min, c.gate.l_max}}, {"a", {c.gate.a_min, c.gate.a_max}},
                        {"b", {c.gate.b_min, c.gate.b_max}}};
    j["ita_thresholds"] = {c.ita.i_ii, c.ita.ii_iii, c.ita.iii_iv, c.ita.iv_v, c.ita.v_vi};
    j["base_texture"] = {{"mean", c.base.mean}, {"amplitude", c.base.amplitude}, {"cell", c.base.cell}};
    j["recolor_space"] = std::string(to_string(c.recolor_space));
    j["proxy_size"] = c.proxy_size;
    j["exposure"] = c.exposure;
    j["rendered_roi"] = c.rendered_roi == RenderedRoi::SameMethod ? "same-method" : "central-patch";
    j["central_patch_fraction"] = c.central_patch_fraction;
    j["correction"] = std::string(to_string(c.correction));
    j["seed"] = c.seed;
    return j;
}

}  // namespace

json config_to_json(const RunConfig& c) {
    json j = semantic_json(c);
    j["out"] = c.out_dir.generic_string();
    j["jobs"] = c.jobs;
    j["cache"] = c.cache;
    return j;
}

RunConfig config_from_json(const json& j, RunConfig c) {
    if (!j.is_object()) throw ParseError("config: expected a JSON object");
    if (j.contains("methods")) c.methods = parse_list<Method>(j["methods"], "methods", parse_method);
    if (j.contains("recolors")) c.recolors = parse_list<RecolorStrategy>(j["recolors"], "recolors", parse_recolor_strategy);
    if (j.contains("lightings")) c.lightings = parse_list<LightingKind>(j["lightings"], "lightings", parse_lighting_kind);
    read(j, "cascade", c.cascade_path);
    if (j.contains("detect")) {
        const auto& d = j["detect"];
        read(d, "scale_factor", c.detect.scale_factor);
        read(d, "min_size", c.detect.min_size);
        read(d, "max_size", c.detect.max_size);
        read(d, "step", c.detect.step);
        read(d, "min_neighbors", c.detect.min_neighbors);
        read(d, "group_iou", c.detect.group_iou);
        read(d, "min_variance", c.detect.min_variance);
    }
    if (j.contains("roi")) {
        const auto& r = j["roi"];
        read(r, "width_fraction", c.roi.width_fraction);
        read(r, "x_offset_fraction", c.roi.x_offset_fraction);
        read(r, "y_offset_fraction", c.roi.y_offset_fraction);
        read(r, "min_area", c.roi.min_area);
        if (r.contains("anchor")) {
            const auto a = r["anchor"].get<std::string>();
            if (a == "edges") c.roi.anchor = RoiAnchor::Edges;
            else if (a == "centers") c.roi.anchor = RoiAnchor::Centers;
            else throw ParseError("config: roi.anchor must be 'edges' or 'centers'");
        }
    }
    if (j.contains("mmm")) {
        const auto& m = j["mmm"];
        read(m, "k", c.mmm.k);
        read(m, "top_m", c.mmm.top_m);
        read(m, "max_iterations", c.mmm.max_iterations);
        read(m, "tolerance", c.mmm.tolerance);
    }
    if (j.contains("chroma_gate")) {
        const auto& g = j["chroma_gate"];
        const auto range = [&](const char* key, double& lo, double& hi) {
            if (!g.contains(key)) return;
            const auto v = g[key].get<std::vector<double>>();
            if (v.size() != 2) throw ParseError(std::string("config: chroma_gate.") + key + " must be [min, max]");
            lo = v[0];
            hi = v[1];
        };
        range("l", c.gate.l_min, c.gate.l_max);
        range("a", c.gate.a_min, c.gate.a_max);
        range("b", c.gate.b_min, c.gate.b_max);
    }
    if (j.contains("ita_thresholds")) {
        const auto t = j["ita_thresholds"].get<std::vector<double>>();
        if (t.size() != 5) throw ParseError("config: ita_thresholds needs 5 edges");
        c.ita = {t[0], t[1], t[2], t[3], t[4]};
    }
    if (j.contains("base_texture")) {
        const auto& b = j["base_texture"];
        read(b, "mean", c.base.mean);
        read(b, "amplitude", c.base.amplitude);
        read(b, "cell", c.base.cell);
    }
    if (j.contains("recolor_space")) {
        const auto s = parse_recolor_space(j["recolor_space"].get<std::string>());
        if (!s) throw ParseError("config: recolor_space must be 'srgb' or 'linear'");
        c.recolor_space = *s;
    }
    read(j, "proxy_size", c.proxy_size);
    read(j, "exposure", c.exposure);
    if (j.contains("rendered_roi")) {
        const auto s = j["rendered_roi"].get<std::string>();
        if (s == "same-method") c.rendered_roi = RenderedRoi::SameMethod;
        else if (s == "central-patch") c.rendered_roi = RenderedRoi::CentralPatch;
        else throw ParseError("config: rendered_roi must be 'same-method' or 'central-patch'");
    }
    read(j, "central_patch_fraction", c.central_patch_fraction);
    if (j.contains("correction")) {
        const auto s = j["correction"].get<std::string>();
        if (s == "bonferroni") c.correction = Correction::Bonferroni;
        else if (s == "holm") c.correction = Correction::Holm;
        else throw ParseError("config: correction must be 'bonferroni' or 'holm'");
    }
    read(j, "seed", c.seed);
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    read(j, "jobs", c.jobs);
    read(j, "cache", c.cache);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ParseError("config '" + path.string() + "': " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const RunConfig& config) {
    return sha256_hex(semantic_json(config).dump()).substr(0, 16);
}

void validate_config(const RunConfig& c) {
    if (c.methods.empty()) throw DataError("config: no methods selected");
    if (c.recolors.empty()) throw DataError("config: no recolor strategies selected");
    if (c.lightings.empty()) throw DataError("config: no lighting configurations selected");
    if (c.proxy_size < 16) throw DataError("config: proxy_size must be >= 16");
    if (!(c.exposure > 0)) throw DataError("config: exposure must be positive");
    if (c.mmm.k < 1 || c.mmm.top_m < 1 || c.mmm.top_m > c.mmm.k) throw DataError("config: need 1 <= top_m <= k");
    if (!(c.detect.scale_factor > 1)) throw DataError("config: detect.scale_factor must be > 1");
    if (c.central_patch_fraction <= 0 || c.central_patch_fraction > 1) {
        throw DataError("config: central_patch_fraction must lie in (0, 1]");
    }
    if (c.jobs < 1) throw DataError("config: jobs must be >= 1");
}

ExtractParams extract_params(const RunConfig& config, const Cascade* cascade) {
    ExtractParams p;
    p.roi = config.roi;
    p.mmm = config.mmm;
    p.mmm.seed = config.seed;
    p.gate = config.gate;
    p.ita = config.ita;
    p.cascade = cascade;
    p.detect = config.detect;
    return p;
}

BaseTextureParams base_texture_params(const RunConfig& config) {
    BaseTextureParams b = config.base;
    b.width = b.height = config.proxy_size;
    b.seed = config.seed;
    return b;
}

}  // namespace skintone
