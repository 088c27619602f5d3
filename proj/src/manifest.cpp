#include "skintone/manifest.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <set>
#include <sstream>

#include "skintone/error.hpp"
#include "skintone/util.hpp"

namespace skintone {

namespace fs = std::filesystem;

namespace {

std::optional<fs::path> optional_path(const std::string& value, const fs::path& base) {
    if (value.empty()) return std::nullopt;
    fs::path p(value);
    return p.is_absolute() ? p : base / p;
}

int parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(what + " must be an integer, got '" + s + "'");
    }
}

void validate(const Manifest& m, bool check_files) {
    std::vector<std::string> problems;
    std::map<std::string, int> seen;
    for (const auto& row : m.rows) {
        const std::string at = "row " + std::to_string(row.line);
        if (row.id.empty()) problems.push_back(at + ": empty id");
        if (auto [it, fresh] = seen.emplace(row.id, row.line); !fresh) {
            problems.push_back(at + ": duplicate id '" + row.id + "' (first at row " + std::to_string(it->second) + ")");
        }
        if (row.face && (row.face->w <= 0 || row.face->h <= 0 || row.face->x < 0 || row.face->y < 0)) {
            problems.push_back(at + ": face box must have x, y >= 0 and positive size");
        }
        if (!check_files) continue;
        const auto need = [&](const std::optional<fs::path>& p, const char* what) {
            if (p && !fs::is_regular_file(*p)) problems.push_back(at + ": " + what + " file not found: " + p->string());
        };
        need(row.photo, "photo");
        need(row.albedo, "albedo");
        need(row.landmarks, "landmarks");
        need(row.sh, "sh");
    }
    if (!problems.empty()) {
        std::string msg = "manifest invalid:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw DataError(msg);
    }
}

}  // namespace

Manifest parse_manifest_csv(std::string_view text, const fs::path& base_dir, bool check_files) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw ParseError("manifest: empty CSV");
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < rows[0].size(); ++i) col[rows[0][i]] = i;
    if (!col.count("id") || !col.count("photo")) throw ParseError("manifest: header must contain 'id' and 'photo'");
    const bool has_face = col.count("face_x") && col.count("face_y") && col.count("face_w") && col.count("face_h");

    Manifest m;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        const std::string at = "manifest row " + std::to_string(r);
        if (cells.size() != rows[0].size()) {
            throw ParseError(at + ": expected " + std::to_string(rows[0].size()) + " fields, got " +
                             std::to_string(cells.size()));
        }
        const auto get = [&](const char* name) -> std::string {
            auto it = col.find(name);
            return it == col.end() ? std::string{} : cells[it->second];
        };
        ManifestRow row;
        row.line = static_cast<int>(r);
        row.id = get("id");
        row.photo = *optional_path(get("photo").empty() ? "." : get("photo"), base_dir);
        if (get("photo").empty()) throw ParseError(at + ": missing photo path");
        row.albedo = optional_path(get("albedo"), base_dir);
        row.landmarks = optional_path(get("landmarks"), base_dir);
        row.sh = optional_path(get("sh"), base_dir);
        if (has_face && !get("face_x").empty()) {
            row.face = FaceBox{parse_int(get("face_x"), at + " face_x"), parse_int(get("face_y"), at + " face_y"),
                               parse_int(get("face_w"), at + " face_w"), parse_int(get("face_h"), at + " face_h")};
        }
        m.rows.push_back(std::move(row));
    }
    validate(m, check_files);
    return m;
}

Manifest parse_manifest_json(std::string_view text, const fs::path& base_dir, bool check_files) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    const nlohmann::json& rows = j.is_object() && j.contains("rows") ? j["rows"] : j;
    if (!rows.is_array()) throw ParseError("manifest: expected an array of rows");
    Manifest m;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& o = rows[i];
        const std::string at = "manifest row " + std::to_string(i + 1);
        if (!o.is_object() || !o.contains("id") || !o.contains("photo")) throw ParseError(at + ": needs 'id' and 'photo'");
        const auto str = [&](const char* key) -> std::string {
            if (!o.contains(key) || o[key].is_null()) return {};
            if (!o[key].is_string()) throw ParseError(at + ": '" + key + "' must be a string");
            return o[key].get<std::string>();
        };
        ManifestRow row;
        row.line = static_cast<int>(i + 1);
        row.id = str("id");
        row.photo = *optional_path(str("photo"), base_dir);
        row.albedo = optional_path(str("albedo"), base_dir);
        row.landmarks = optional_path(str("landmarks"), base_dir);
        row.sh = optional_path(str("sh"), base_dir);
        if (o.contains("face") && !o["face"].is_null()) {
            const auto& f = o["face"];
            if (!f.is_array() || f.size() != 4) throw ParseError(at + ": 'face' must be [x, y, w, h]");
            row.face = FaceBox{f[0].get<int>(), f[1].get<int>(), f[2].get<int>(), f[3].get<int>()};
        }
        m.rows.push_back(std::move(row));
    }
    validate(m, check_files);
    return m;
}

Manifest load_manifest(const fs::path& path) {
    const std::string text = read_text(path);
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    if (path.extension() == ".json") return parse_manifest_json(text, base);
    return parse_manifest_csv(text, base);
}

void write_manifest_csv(const fs::path& path, const Manifest& manifest) {
    const fs::path base = fs::absolute(path).parent_path();
    const auto rel = [&](const std::optional<fs::path>& p) {
        if (!p) return std::string{};
        return csv_field(fs::relative(fs::absolute(*p), base).generic_string());
    };
    std::ostringstream out;
    out << "id,photo,albedo,landmarks,face_x,face_y,face_w,face_h,sh\n";
    for (const auto& r : manifest.rows) {
        out << csv_field(r.id) << ',' << rel(r.photo) << ',' << rel(r.albedo) << ',' << rel(r.landmarks) << ',';
        if (r.face) {
            out << r.face->x << ',' << r.face->y << ',' << r.face->w << ',' << r.face->h;
        } else {
            out << ",,,";
        }
        out << ',' << rel(r.sh) << '\n';
    }
    write_atomic(path, out.str());
}

}  // namespace skintone
