#include "skintone/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "skintone/error.hpp"
#include "skintone/util.hpp"

namespace skintone {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Table {
    std::string file;
    std::string title;
    std::vector<GroupKey> keys;
};

const std::vector<Table>& median_tables() {
    static const std::vector<Table> tables = {
        {"medians_method.csv", "By method", {GroupKey::Method}},
        {"medians_truth_class.csv", "By ground-truth ITA class", {GroupKey::TruthClass}},
        {"medians_lighting.csv", "By lighting", {GroupKey::Lighting}},
        {"medians_recolor.csv", "By recolor strategy", {GroupKey::Recolor}},
        {"medians_method_x_lighting.csv", "By method x lighting", {GroupKey::Method, GroupKey::Lighting}},
    };
    return tables;
}

// Class groups come out of group_records in I..VI order already; other keys
// are lexicographic.
std::string median_csv(std::span<const EvalRecord> records, std::span<const GroupKey> keys,
                       const std::map<std::string, GroundTruthLabel>& labels, const std::string& hash) {
    std::string out = "config_hash,metric,group,n,median,q1,q3,mean,min,max\n";
    for (Metric metric : {Metric::DeltaE, Metric::ItaError}) {
        for (const auto& g : summarize_records(records, keys, metric, &labels)) {
            const auto& s = g.summary;
            out += hash + "," + std::string(to_string(metric)) + "," + csv_field(g.group) + "," + std::to_string(s.n);
            for (double v : {s.median, s.q1, s.q3, s.mean, s.min, s.max}) out += "," + format_double(v);
            out += '\n';
        }
    }
    return out;
}

json stats_json(const StatsResult& r) {
    json posthoc = json::array();
    for (const auto& d : r.posthoc) {
        posthoc.push_back({{"group_a", d.group_a}, {"group_b", d.group_b}, {"z", d.z}, {"p", d.p},
                           {"p_adjusted", d.p_adjusted}});
    }
    return {{"test", r.test},         {"groups", r.groups},         {"sizes", r.sizes},
            {"h", r.h},               {"df", r.df},                 {"p", r.p},
            {"degenerate", r.degenerate}, {"correction", std::string(to_string(r.correction))},
            {"posthoc", std::move(posthoc)}};
}

std::string html_table(const std::vector<std::vector<std::string>>& rows) {
    std::string out = "<table>\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out += "<tr>";
        for (const auto& cell : rows[i]) {
            out += i == 0 ? "<th>" : "<td>";
            out += xml_escape(cell);
            out += i == 0 ? "</th>" : "</td>";
        }
        out += "</tr>\n";
    }
    return out + "</table>\n";
}

}  // namespace

std::string boxplot_svg(const std::vector<NamedGroup>& groups, const std::string& title, const std::string& y_label,
                        const std::string& config_hash) {
    const double slot = 90, left = 70, top = 40, plot_h = 300, bottom = 110;
    const double width = left + slot * static_cast<double>(std::max<std::size_t>(groups.size(), 1)) + 20;
    const double height = top + plot_h + bottom;

    double lo = 0, hi = 1;
    bool first = true;
    for (const auto& g : groups) {
        for (double v : g.values) {
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
        }
    }
    lo = std::min(lo, 0.0);
    if (hi <= lo) hi = lo + 1;
    const double pad = 0.05 * (hi - lo);
    hi += pad;
    const auto y_of = [&](double v) { return top + plot_h * (1 - (v - lo) / (hi - lo)); };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) + "\" height=\"" +
                    fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s += "<desc>config_hash " + xml_escape(config_hash) + "</desc>\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fixed(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + xml_escape(title) +
         "</text>\n";
    s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(left) + "\" y2=\"" +
         fixed(top + plot_h) + "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double v = lo + (hi - lo) * t / 5.0;
        const double y = y_of(v);
        s += "<line x1=\"" + fixed(left - 4) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(width - 20) + "\" y2=\"" +
             fixed(y) + "\" stroke=\"#ddd\"/>\n";
        s += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(y + 4) + "\" text-anchor=\"end\">" + fixed(v) +
             "</text>\n";
    }
    s += "<text transform=\"translate(16," + fixed(top + plot_h / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         xml_escape(y_label) + "</text>\n";

    for (std::size_t i = 0; i < groups.size(); ++i) {
        const double cx = left + slot * (static_cast<double>(i) + 0.5);
        std::vector<double> v = groups[i].values;
        std::sort(v.begin(), v.end());
        s += "<text transform=\"translate(" + fixed(cx) + "," + fixed(top + plot_h + 14) +
             ") rotate(30)\" text-anchor=\"start\">" + xml_escape(groups[i].name) + " (n=" + std::to_string(v.size()) +
             ")</text>\n";
        if (v.empty()) continue;
        const double q1 = quantile_sorted(v, 0.25), med = quantile_sorted(v, 0.5), q3 = quantile_sorted(v, 0.75);
        const double iqr = q3 - q1;
        double wlo = q3, whi = q1;
        for (double x : v) {
            if (x >= q1 - 1.5 * iqr) wlo = std::min(wlo, x);
            if (x <= q3 + 1.5 * iqr) whi = std::max(whi, x);
        }
        const double bw = slot * 0.5;
        s += "<line x1=\"" + fixed(cx) + "\" y1=\"" + fixed(y_of(wlo)) + "\" x2=\"" + fixed(cx) + "\" y2=\"" +
             fixed(y_of(whi)) + "\" stroke=\"black\"/>\n";
        s += "<rect x=\"" + fixed(cx - bw / 2) + "\" y=\"" + fixed(y_of(q3)) + "\" width=\"" + fixed(bw) +
             "\" height=\"" + fixed(std::max(0.0, y_of(q1) - y_of(q3))) +
             "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
        s += "<line x1=\"" + fixed(cx - bw / 2) + "\" y1=\"" + fixed(y_of(med)) + "\" x2=\"" + fixed(cx + bw / 2) +
             "\" y2=\"" + fixed(y_of(med)) + "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
        for (double x : v) {
            if (x < wlo || x > whi) {
                s += "<circle cx=\"" + fixed(cx) + "\" cy=\"" + fixed(y_of(x)) +
                     "\" r=\"2\" fill=\"none\" stroke=\"black\"/>\n";
            }
        }
    }
    return s + "</svg>\n";
}

std::string confusion_svg(const ConfusionMatrix& m, const std::string& config_hash) {
    const double cell = 60, left = 90, top = 70;
    const double size = left + cell * kItaClassCount + 20;
    long long peak = 0;
    for (const auto& row : m.counts) {
        for (long long c : row) peak = std::max(peak, c);
    }
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(size, 0) + "\" height=\"" +
                    fixed(size, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<desc>config_hash " + xml_escape(config_hash) + "</desc>\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fixed(left + cell * 3) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
         "Ground-truth class (rows) vs rendered class (columns)</text>\n";
    for (int i = 0; i < kItaClassCount; ++i) {
        const auto name = std::string(to_string(static_cast<ItaClass>(i)));
        s += "<text x=\"" + fixed(left + cell * (i + 0.5)) + "\" y=\"" + fixed(top - 8) +
             "\" text-anchor=\"middle\">" + name + "</text>\n";
        s += "<text x=\"" + fixed(left - 8) + "\" y=\"" + fixed(top + cell * (i + 0.5) + 4) +
             "\" text-anchor=\"end\">" + name + "</text>\n";
    }
    for (int r = 0; r < kItaClassCount; ++r) {
        for (int c = 0; c < kItaClassCount; ++c) {
            const long long n = m.counts[r][c];
            const double t = peak > 0 ? static_cast<double>(n) / static_cast<double>(peak) : 0.0;
            const int shade = static_cast<int>(std::lround(255 - 200 * t));
            char fill[16];
            std::snprintf(fill, sizeof fill, "#%02x%02xff", shade, shade);
            s += "<rect x=\"" + fixed(left + cell * c) + "\" y=\"" + fixed(top + cell * r) + "\" width=\"" +
                 fixed(cell) + "\" height=\"" + fixed(cell) + "\" fill=\"" + fill + "\" stroke=\"#888\"/>\n";
            s += "<text x=\"" + fixed(left + cell * (c + 0.5)) + "\" y=\"" + fixed(top + cell * (r + 0.5) + 4) +
                 "\" text-anchor=\"middle\" fill=\"" + (t > 0.6 ? "white" : "black") + "\">" + std::to_string(n) +
                 "</text>\n";
        }
    }
    return s + "</svg>\n";
}

std::vector<std::string> write_report(const RecordTable& table, const fs::path& dir, const ReportOptions& options) {
    const auto& records = table.records;
    if (records.empty()) throw DataError("report: no records");
    const std::string& hash = table.config_hash;
    fs::create_directories(dir);
    std::vector<std::string> written;
    const auto emit = [&](const std::string& name, const std::string& content) {
        write_atomic(dir / name, content);
        written.push_back(name);
    };

    const LabelSet label_set = label_images(records);
    const auto& labels = label_set.labels;
    std::set<std::string> fallback_images;
    for (const auto& r : records) {
        if (r.reference.fallback_mask || r.rendered.fallback_mask) fallback_images.insert(r.image_id);
    }
    const bool any_fallback = !fallback_images.empty();

    for (const auto& t : median_tables()) emit(t.file, median_csv(records, t.keys, labels, hash));

    std::string gt = "config_hash,image_id,class,resolution,fallback_mask\n";
    for (const auto& [id, label] : labels) {
        gt += hash + "," + csv_field(id) + "," + std::string(to_string(label.ita_class)) + "," +
              std::string(to_string(label.resolution)) + "," + (fallback_images.count(id) ? "1" : "0") + "\n";
    }
    emit("ground_truth.csv", gt);

    std::vector<EvalRecord> labeled;
    for (const auto& r : records) {
        if (labels.count(r.image_id)) labeled.push_back(r);
    }
    const ConfusionMatrix confusion = confusion_matrix(labeled, labels);
    std::string cm = "config_hash,truth";
    for (int c = 0; c < kItaClassCount; ++c) cm += "," + std::string(to_string(static_cast<ItaClass>(c)));
    cm += "\n";
    for (int r = 0; r < kItaClassCount; ++r) {
        cm += hash + "," + std::string(to_string(static_cast<ItaClass>(r)));
        for (int c = 0; c < kItaClassCount; ++c) cm += "," + std::to_string(confusion.counts[r][c]);
        cm += "\n";
    }
    emit("confusion.csv", cm);
    emit("confusion.svg", confusion_svg(confusion, hash));

    struct Plot {
        std::string file;
        std::vector<GroupKey> keys;
        Metric metric;
        std::string title;
    };
    const std::vector<Plot> plots = {
        {"box_delta_e_method.svg", {GroupKey::Method}, Metric::DeltaE, "Delta E by method"},
        {"box_ita_error_method.svg", {GroupKey::Method}, Metric::ItaError, "ITA error by method"},
        {"box_delta_e_truth_class.svg", {GroupKey::TruthClass}, Metric::DeltaE, "Delta E by ground-truth class"},
        {"box_ita_error_truth_class.svg", {GroupKey::TruthClass}, Metric::ItaError, "ITA error by ground-truth class"},
        {"box_delta_e_lighting.svg", {GroupKey::Lighting}, Metric::DeltaE, "Delta E by lighting"},
        {"box_ita_error_lighting.svg", {GroupKey::Lighting}, Metric::ItaError, "ITA error by lighting"},
        {"box_delta_e_recolor.svg", {GroupKey::Recolor}, Metric::DeltaE, "Delta E by recolor strategy"},
    };
    for (const auto& p : plots) {
        const auto groups = group_records(records, p.keys, p.metric, &labels);
        emit(p.file, boxplot_svg(groups, p.title, std::string(to_string(p.metric)), hash));
    }

    json tests = json::array();
    const std::vector<std::pair<std::string, std::vector<GroupKey>>> factors = {
        {"method", {GroupKey::Method}},
        {"recolor", {GroupKey::Recolor}},
        {"lighting", {GroupKey::Lighting}},
        {"truth_class", {GroupKey::TruthClass}},
        {"method x lighting (KW over composite cells)", {GroupKey::Method, GroupKey::Lighting}},
    };
    for (Metric metric : {Metric::DeltaE, Metric::ItaError}) {
        for (const auto& [factor, keys] : factors) {
            json entry = {{"metric", std::string(to_string(metric))}, {"factor", factor}};
            const auto groups = group_records(records, keys, metric, &labels);
            std::size_t total = 0;
            for (const auto& g : groups) total += g.values.size();
            if (groups.size() < 2 || total < 3) {
                entry["skipped"] = "needs at least two groups and three observations";
            } else {
                entry["result"] = stats_json(kruskal_wallis_dunn(groups, options.correction));
            }
            tests.push_back(std::move(entry));
        }
    }
    json stats = {{"config_hash", hash},
                  {"records", records.size()},
                  {"correction", std::string(to_string(options.correction))},
                  {"fallback_mask_used", any_fallback},
                  {"unlabeled_images", label_set.unlabeled},
                  {"tests", std::move(tests)}};
    emit("stats.json", stats.dump(2) + "\n");

    std::string html = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Skin tone evaluation report</title>\n"
                       "<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse;margin:1em 0}"
                       "td,th{border:1px solid #aaa;padding:2px 8px;text-align:right}</style></head><body>\n";
    html += "<h1>Skin tone evaluation report</h1>\n";
    html += "<p>Config hash <code>" + xml_escape(hash) + "</code>, " + std::to_string(records.size()) + " records, " +
            std::to_string(labels.size()) + " labelled images. Dunn correction: " +
            std::string(to_string(options.correction)) + ".</p>\n";
    html += any_fallback ? "<p><b>Chroma fallback mask used</b> for " + std::to_string(fallback_images.size()) +
                               " image(s); MMM estimates there rely on a colour gate instead of landmarks.</p>\n"
                         : "<p>No chroma fallback masks were used.</p>\n";
    if (!label_set.unlabeled.empty()) {
        html += "<p>Images without a ground-truth label (not all four methods present):";
        for (const auto& id : label_set.unlabeled) html += " " + xml_escape(id);
        html += "</p>\n";
    }
    if (options.ledger && options.ledger->contains("summary")) {
        const auto& s = (*options.ledger)["summary"];
        html += "<p>Run ledger: " + s.value("cells", json(0)).dump() + " cells, " + s.value("ok", json(0)).dump() +
                " ok, " + s.value("skipped", json(0)).dump() + " skipped, " + s.value("error", json(0)).dump() +
                " errors.</p>\n";
    }
    for (const auto& t : median_tables()) {
        html += "<h2>" + xml_escape(t.title) + " (<a href=\"" + t.file + "\">csv</a>)</h2>\n";
        std::vector<std::vector<std::string>> rows = {{"metric", "group", "n", "median", "q1", "q3"}};
        for (Metric metric : {Metric::DeltaE, Metric::ItaError}) {
            for (const auto& g : summarize_records(records, t.keys, metric, &labels)) {
                rows.push_back({std::string(to_string(metric)), g.group, std::to_string(g.summary.n),
                                fixed(g.summary.median, 3), fixed(g.summary.q1, 3), fixed(g.summary.q3, 3)});
            }
        }
        html += html_table(rows);
    }
    html += "<h2>Confusion matrix (<a href=\"confusion.csv\">csv</a>)</h2>\n<img src=\"confusion.svg\" alt=\"confusion matrix\">\n";
    html += "<h2>Box plots</h2>\n";
    for (const auto& p : plots) html += "<img src=\"" + p.file + "\" alt=\"" + xml_escape(p.title) + "\">\n";
    html += "<h2>Kruskal-Wallis with Dunn post hoc (<a href=\"stats.json\">json</a>)</h2>\n";
    std::vector<std::vector<std::string>> rows = {{"metric", "factor", "H", "df", "p"}};
    for (const auto& t : stats["tests"]) {
        if (!t.contains("result")) continue;
        const auto& r = t["result"];
        rows.push_back({t["metric"].get<std::string>(), t["factor"].get<std::string>(), fixed(r["h"].get<double>(), 3),
                        std::to_string(r["df"].get<int>()), format_double(r["p"].get<double>())});
    }
    html += html_table(rows);
    html += "<p>Files: <a href=\"ground_truth.csv\">ground_truth.csv</a></p>\n</body></html>\n";
    emit("index.html", html);
    return written;
}

}  // namespace skintone
