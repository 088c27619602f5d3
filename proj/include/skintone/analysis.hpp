#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "skintone/colorimetry.hpp"
#include "skintone/extraction.hpp"
#include "skintone/recolor.hpp"
#include "skintone/relight.hpp"
#include "skintone/stats.hpp"

namespace skintone {

// One (image x method x recolor x lighting) outcome.
struct EvalRecord {
    std::string image_id;
    Method method = Method::Cheek;
    RecolorStrategy recolor = RecolorStrategy::Normalize;
    LightingKind lighting = LightingKind::Frontal;
    SkinEstimate reference;
    SkinEstimate rendered;
    double delta_e = 0;
    double ita_error = 0;
    double clip_fraction = 0;

    ItaClass reference_class() const { return reference.ita_class; }
    ItaClass rendered_class() const { return rendered.ita_class; }
};

double ita_error(double reference_degrees, double rendered_degrees);

EvalRecord make_record(std::string image_id, RecolorStrategy recolor, LightingKind lighting,
                       const SkinEstimate& reference, const SkinEstimate& rendered, double clip_fraction = 0);

enum class LabelResolution { Majority, TieBrokenByTMmm };
std::string_view to_string(LabelResolution r);

struct GroundTruthLabel {
    std::string image_id;
    ItaClass ita_class = ItaClass::I;
    LabelResolution resolution = LabelResolution::Majority;
};

// Unique modal class of the four per-method estimates, else the T-MMM class.
// Needs exactly one estimate per method, in any order.
GroundTruthLabel ground_truth_class(std::string image_id, std::span<const SkinEstimate> estimates);

// Rows: ground-truth class, columns: rendered class.
struct ConfusionMatrix {
    std::array<std::array<long long, kItaClassCount>, kItaClassCount> counts{};

    long long total() const;
    long long row_sum(ItaClass c) const;
    long long at(ItaClass truth, ItaClass rendered) const {
        return counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(rendered)];
    }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Throws DataError listing the image ids without a label.
ConfusionMatrix confusion_matrix(std::span<const EvalRecord> records,
                                 const std::map<std::string, GroundTruthLabel>& labels);

// Labels for every image whose records cover all four methods. Images missing
// a method are returned in `unlabeled`.
struct LabelSet {
    std::map<std::string, GroundTruthLabel> labels;
    std::vector<std::string> unlabeled;
};
LabelSet label_images(std::span<const EvalRecord> records);

enum class Metric { DeltaE, ItaError };
std::string_view to_string(Metric m);
double metric_value(const EvalRecord& r, Metric m);

enum class GroupKey { Method, Recolor, Lighting, TruthClass, ReferenceClass };
std::string_view to_string(GroupKey k);

// Group label of a record for a key; TruthClass needs the label map.
std::string group_label(const EvalRecord& r, GroupKey key, const std::map<std::string, GroundTruthLabel>* labels);

// Values of `metric` grouped by the joined labels of `keys` (joined with " x "),
// in lexicographic order of the composite label.
std::vector<NamedGroup> group_records(std::span<const EvalRecord> records, std::span<const GroupKey> keys, Metric metric,
                                      const std::map<std::string, GroundTruthLabel>* labels = nullptr);

struct GroupSummary {
    std::string group;
    Metric metric = Metric::DeltaE;
    Summary summary;
};

std::vector<GroupSummary> summarize_records(std::span<const EvalRecord> records, std::span<const GroupKey> keys,
                                            Metric metric, const std::map<std::string, GroundTruthLabel>* labels = nullptr);

}  // namespace skintone
