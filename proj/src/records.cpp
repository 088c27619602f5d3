#include "skintone/records.hpp"

#include <charconv>
#include <cstdlib>

#include "skintone/error.hpp"
#include "skintone/util.hpp"

namespace skintone {

namespace {

constexpr const char* kColumns[] = {
    "config_hash", "image_id", "method", "recolor", "lighting",
    "ref_r", "ref_g", "ref_b", "ref_L", "ref_a", "ref_bstar", "ref_ita", "ref_class", "ref_samples", "ref_fallback",
    "ren_r", "ren_g", "ren_b", "ren_L", "ren_a", "ren_bstar", "ren_ita", "ren_class", "ren_samples", "ren_fallback",
    "delta_e", "ita_error", "clip_fraction"};
constexpr std::size_t kColumnCount = std::size(kColumns);

void append_estimate(std::string& out, const SkinEstimate& e) {
    for (double v : {e.mean.r, e.mean.g, e.mean.b, e.lab.L, e.lab.a, e.lab.b, e.ita}) {
        out += format_double(v);
        out += ',';
    }
    out += to_string(e.ita_class);
    out += ',';
    out += std::to_string(e.samples);
    out += ',';
    out += e.fallback_mask ? "1" : "0";
}

double parse_real(const std::string& s, std::size_t line, const char* column) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw ParseError("records line " + std::to_string(line) + ": bad number '" + s + "' in " + column);
    }
    return v;
}

SkinEstimate parse_estimate(const std::vector<std::string>& row, std::size_t first, Method method, std::size_t line) {
    SkinEstimate e;
    e.method = method;
    e.mean = {parse_real(row[first], line, kColumns[first]), parse_real(row[first + 1], line, kColumns[first + 1]),
              parse_real(row[first + 2], line, kColumns[first + 2])};
    e.lab = {parse_real(row[first + 3], line, kColumns[first + 3]), parse_real(row[first + 4], line, kColumns[first + 4]),
             parse_real(row[first + 5], line, kColumns[first + 5])};
    e.ita = parse_real(row[first + 6], line, kColumns[first + 6]);
    const auto cls = parse_ita_class(row[first + 7]);
    if (!cls) throw ParseError("records line " + std::to_string(line) + ": bad ITA class '" + row[first + 7] + "'");
    e.ita_class = *cls;
    const auto& samples = row[first + 8];
    const auto [ptr, ec] = std::from_chars(samples.data(), samples.data() + samples.size(), e.samples);
    if (ec != std::errc{} || ptr != samples.data() + samples.size()) {
        throw ParseError("records line " + std::to_string(line) + ": bad sample count '" + samples + "'");
    }
    e.fallback_mask = row[first + 9] == "1";
    return e;
}

}  // namespace

std::string records_to_csv(const std::vector<EvalRecord>& records, std::string_view config_hash) {
    std::string out;
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (i) out += ',';
        out += kColumns[i];
    }
    out += '\n';
    for (const auto& r : records) {
        out += config_hash;
        out += ',';
        out += csv_field(r.image_id);
        out += ',';
        out += to_string(r.method);
        out += ',';
        out += to_string(r.recolor);
        out += ',';
        out += to_string(r.lighting);
        out += ',';
        append_estimate(out, r.reference);
        out += ',';
        append_estimate(out, r.rendered);
        out += ',';
        out += format_double(r.delta_e);
        out += ',';
        out += format_double(r.ita_error);
        out += ',';
        out += format_double(r.clip_fraction);
        out += '\n';
    }
    return out;
}

RecordTable records_from_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw ParseError("records: empty file");
    if (rows[0].size() != kColumnCount) throw ParseError("records: unexpected header");
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (rows[0][i] != kColumns[i]) throw ParseError(std::string("records: expected column '") + kColumns[i] + "'");
    }
    RecordTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::size_t line = i + 1;
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != kColumnCount) {
            throw ParseError("records line " + std::to_string(line) + ": expected " + std::to_string(kColumnCount) +
                             " fields, got " + std::to_string(row.size()));
        }
        if (table.config_hash.empty()) {
            table.config_hash = row[0];
        } else if (row[0] != table.config_hash) {
            throw ParseError("records line " + std::to_string(line) + ": mixed config hashes");
        }
        const auto method = parse_method(row[2]);
        const auto recolor = parse_recolor_strategy(row[3]);
        const auto lighting = parse_lighting_kind(row[4]);
        if (!method || !recolor || !lighting) {
            throw ParseError("records line " + std::to_string(line) + ": unknown method, recolor or lighting tag");
        }
        EvalRecord r;
        r.image_id = row[1];
        r.method = *method;
        r.recolor = *recolor;
        r.lighting = *lighting;
        r.reference = parse_estimate(row, 5, *method, line);
        r.rendered = parse_estimate(row, 15, *method, line);
        r.delta_e = parse_real(row[25], line, kColumns[25]);
        r.ita_error = parse_real(row[26], line, kColumns[26]);
        r.clip_fraction = parse_real(row[27], line, kColumns[27]);
        table.records.push_back(std::move(r));
    }
    return table;
}

RecordTable read_records(const std::filesystem::path& path) { return records_from_csv(read_text(path)); }

}  // namespace skintone
