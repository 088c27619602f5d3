#include "skintone/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "skintone/error.hpp"

namespace skintone {

double ita_error(double reference_degrees, double rendered_degrees) {
    return std::abs(reference_degrees - rendered_degrees);
}

EvalRecord make_record(std::string image_id, RecolorStrategy recolor, LightingKind lighting,
                       const SkinEstimate& reference, const SkinEstimate& rendered, double clip_fraction) {
    EvalRecord r;
    r.image_id = std::move(image_id);
    r.method = reference.method;
    r.recolor = recolor;
    r.lighting = lighting;
    r.reference = reference;
    r.rendered = rendered;
    r.delta_e = delta_e(reference.lab, rendered.lab);
    r.ita_error = ita_error(reference.ita, rendered.ita);
    r.clip_fraction = clip_fraction;
    return r;
}

std::string_view to_string(LabelResolution r) {
    return r == LabelResolution::Majority ? "majority" : "tie-broken-by-T-MMM";
}

GroundTruthLabel ground_truth_class(std::string image_id, std::span<const SkinEstimate> estimates) {
    if (estimates.size() != 4) throw DataError("ground truth needs exactly four estimates");
    std::set<Method> seen;
    const SkinEstimate* tmmm = nullptr;
    std::array<int, kItaClassCount> votes{};
    for (const auto& e : estimates) {
        if (!seen.insert(e.method).second) throw DataError("ground truth needs one estimate per method");
        if (e.method == Method::TMmm) tmmm = &e;
        ++votes[static_cast<std::size_t>(e.ita_class)];
    }
    const int best = *std::max_element(votes.begin(), votes.end());
    const auto modal = std::count(votes.begin(), votes.end(), best);
    GroundTruthLabel label{std::move(image_id), ItaClass::I, LabelResolution::Majority};
    if (modal == 1) {
        label.ita_class = static_cast<ItaClass>(std::find(votes.begin(), votes.end(), best) - votes.begin());
    } else {
        label.ita_class = tmmm->ita_class;
        label.resolution = LabelResolution::TieBrokenByTMmm;
    }
    return label;
}

long long ConfusionMatrix::total() const {
    long long t = 0;
    for (const auto& row : counts) {
        for (auto v : row) t += v;
    }
    return t;
}

long long ConfusionMatrix::row_sum(ItaClass c) const {
    long long t = 0;
    for (auto v : counts[static_cast<std::size_t>(c)]) t += v;
    return t;
}

ConfusionMatrix confusion_matrix(std::span<const EvalRecord> records,
                                 const std::map<std::string, GroundTruthLabel>& labels) {
    std::set<std::string> missing;
    ConfusionMatrix m;
    for (const auto& r : records) {
        auto it = labels.find(r.image_id);
        if (it == labels.end()) {
            missing.insert(r.image_id);
            continue;
        }
        ++m.counts[static_cast<std::size_t>(it->second.ita_class)][static_cast<std::size_t>(r.rendered_class())];
    }
    if (!missing.empty()) {
        std::string ids;
        for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
        throw DataError("no ground-truth label for: " + ids);
    }
    return m;
}

LabelSet label_images(std::span<const EvalRecord> records) {
    std::map<std::string, std::map<Method, SkinEstimate>> refs;
    for (const auto& r : records) refs[r.image_id].emplace(r.method, r.reference);
    LabelSet out;
    for (const auto& [id, by_method] : refs) {
        if (by_method.size() != 4) {
            out.unlabeled.push_back(id);
            continue;
        }
        std::vector<SkinEstimate> four;
        for (const auto& [m, e] : by_method) four.push_back(e);
        out.labels.emplace(id, ground_truth_class(id, four));
    }
    return out;
}

std::string_view to_string(Metric m) { return m == Metric::DeltaE ? "delta_e" : "ita_error"; }

double metric_value(const EvalRecord& r, Metric m) { return m == Metric::DeltaE ? r.delta_e : r.ita_error; }

std::string_view to_string(GroupKey k) {
    switch (k) {
        case GroupKey::Method: return "method";
        case GroupKey::Recolor: return "recolor";
        case GroupKey::Lighting: return "lighting";
        case GroupKey::TruthClass: return "truth_class";
        case GroupKey::ReferenceClass: return "reference_class";
    }
    return "?";
}

std::string group_label(const EvalRecord& r, GroupKey key, const std::map<std::string, GroundTruthLabel>* labels) {
    switch (key) {
        case GroupKey::Method: return std::string(to_string(r.method));
        case GroupKey::Recolor: return std::string(to_string(r.recolor));
        case GroupKey::Lighting: return std::string(to_string(r.lighting));
        case GroupKey::ReferenceClass: return std::string(to_string(r.reference_class()));
        case GroupKey::TruthClass: {
            if (!labels) throw DataError("grouping by truth class needs labels");
            auto it = labels->find(r.image_id);
            if (it == labels->end()) return {};
            return std::string(to_string(it->second.ita_class));
        }
    }
    return {};
}

std::vector<NamedGroup> group_records(std::span<const EvalRecord> records, std::span<const GroupKey> keys, Metric metric,
                                      const std::map<std::string, GroundTruthLabel>* labels) {
    std::map<std::string, std::vector<double>> grouped;
    for (const auto& r : records) {
        std::string name;
        bool skip = false;
        for (auto k : keys) {
            const auto part = group_label(r, k, labels);
            if (part.empty()) skip = true;
            name += (name.empty() ? "" : " x ") + part;
        }
        if (!skip) grouped[name].push_back(metric_value(r, metric));
    }
    std::vector<NamedGroup> out;
    for (auto& [name, values] : grouped) out.push_back({name, std::move(values)});
    return out;
}

std::vector<GroupSummary> summarize_records(std::span<const EvalRecord> records, std::span<const GroupKey> keys,
                                            Metric metric, const std::map<std::string, GroundTruthLabel>* labels) {
    std::vector<GroupSummary> out;
    for (const auto& g : group_records(records, keys, metric, labels)) out.push_back({g.name, metric, summarize(g.values)});
    return out;
}

}  // namespace skintone
