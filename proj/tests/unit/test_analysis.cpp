#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "skintone/analysis.hpp"
#include "skintone/error.hpp"

using namespace skintone;

namespace {

SkinEstimate est(Method m, ItaClass c) {
    SkinEstimate e;
    e.method = m;
    e.ita_class = c;
    return e;
}

std::vector<SkinEstimate> four(ItaClass a, ItaClass b, ItaClass c, ItaClass d) {
    return {est(Method::Cheek, a), est(Method::Mmm, b), est(Method::TCheek, c), est(Method::TMmm, d)};
}

}  // namespace

TEST(GroundTruth, Majority) {
    const auto l = ground_truth_class("x", four(ItaClass::II, ItaClass::II, ItaClass::III, ItaClass::IV));
    EXPECT_EQ(l.ita_class, ItaClass::II);
    EXPECT_EQ(l.resolution, LabelResolution::Majority);
    EXPECT_EQ(ground_truth_class("x", four(ItaClass::V, ItaClass::V, ItaClass::V, ItaClass::I)).ita_class, ItaClass::V);
}

TEST(GroundTruth, TieFallsBackToTMmm) {
    auto l = ground_truth_class("x", four(ItaClass::II, ItaClass::II, ItaClass::III, ItaClass::III));
    EXPECT_EQ(l.ita_class, ItaClass::III);
    EXPECT_EQ(l.resolution, LabelResolution::TieBrokenByTMmm);
    l = ground_truth_class("x", four(ItaClass::I, ItaClass::II, ItaClass::III, ItaClass::VI));
    EXPECT_EQ(l.ita_class, ItaClass::VI);
    EXPECT_EQ(l.resolution, LabelResolution::TieBrokenByTMmm);
}

TEST(GroundTruth, OrderInvariant) {
    auto e = four(ItaClass::I, ItaClass::IV, ItaClass::IV, ItaClass::II);
    const auto want = ground_truth_class("x", e).ita_class;
    std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.method < b.method; });
    do {
        EXPECT_EQ(ground_truth_class("x", e).ita_class, want);
    } while (std::next_permutation(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.method < b.method; }));
}

TEST(GroundTruth, Errors) {
    auto e = four(ItaClass::I, ItaClass::I, ItaClass::I, ItaClass::I);
    e.pop_back();
    EXPECT_THROW(ground_truth_class("x", e), DataError);
    e.push_back(est(Method::Cheek, ItaClass::I));
    EXPECT_THROW(ground_truth_class("x", e), DataError);
}

TEST(ItaError, Examples) {
    EXPECT_EQ(ita_error(40, 30), 10.0);
    EXPECT_EQ(ita_error(-20, 15), 35.0);
    EXPECT_EQ(ita_error(5, 5), 0.0);
}

TEST(Record, MakeRecordComputesMetrics) {
    const auto ref = make_estimate(Method::Mmm, {0.7, 0.5, 0.4}, 10);
    const auto ren = make_estimate(Method::Mmm, {0.6, 0.45, 0.35}, 10);
    const auto r = make_record("a", RecolorStrategy::Variation, LightingKind::Paramount, ref, ren, 0.25);
    EXPECT_EQ(r.method, Method::Mmm);
    EXPECT_DOUBLE_EQ(r.delta_e, delta_e(ref.lab, ren.lab));
    EXPECT_DOUBLE_EQ(r.ita_error, std::abs(ref.ita - ren.ita));
    EXPECT_EQ(r.clip_fraction, 0.25);
}

TEST(Confusion, MatchesCountingOracle) {
    std::mt19937_64 rng(3);
    std::map<std::string, GroundTruthLabel> labels;
    for (int i = 0; i < 10; ++i) {
        const std::string id = "img" + std::to_string(i);
        labels[id] = {id, static_cast<ItaClass>(rng() % 6), LabelResolution::Majority};
    }
    std::vector<EvalRecord> records;
    for (int i = 0; i < 500; ++i) {
        EvalRecord r;
        r.image_id = "img" + std::to_string(rng() % 10);
        r.rendered.ita_class = static_cast<ItaClass>(rng() % 6);
        records.push_back(r);
    }
    const auto m = confusion_matrix(records, labels);
    EXPECT_EQ(m.total(), 500);
    for (int t = 0; t < 6; ++t) {
        for (int p = 0; p < 6; ++p) {
            const auto want = std::count_if(records.begin(), records.end(), [&](const EvalRecord& r) {
                return labels.at(r.image_id).ita_class == static_cast<ItaClass>(t) &&
                       r.rendered.ita_class == static_cast<ItaClass>(p);
            });
            EXPECT_EQ(m.at(static_cast<ItaClass>(t), static_cast<ItaClass>(p)), want);
        }
    }
}

TEST(Confusion, MissingLabelIsAnError) {
    EvalRecord r;
    r.image_id = "ghost";
    std::vector<EvalRecord> records{r};
    try {
        confusion_matrix(records, {});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
    }
}

TEST(Labels, IncompleteImagesAreUnlabeled) {
    std::vector<EvalRecord> records;
    for (auto m : kAllMethods) {
        EvalRecord r;
        r.image_id = "full";
        r.method = m;
        r.reference = est(m, ItaClass::III);
        records.push_back(r);
    }
    EvalRecord partial;
    partial.image_id = "partial";
    records.push_back(partial);
    const auto set = label_images(records);
    EXPECT_EQ(set.labels.size(), 1u);
    EXPECT_EQ(set.labels.at("full").ita_class, ItaClass::III);
    EXPECT_EQ(set.unlabeled, std::vector<std::string>{"partial"});
}

TEST(Grouping, CompositeKeys) {
    std::vector<EvalRecord> records(3);
    records[0].lighting = LightingKind::Frontal;
    records[0].delta_e = 1;
    records[1].lighting = LightingKind::Frontal;
    records[1].delta_e = 3;
    records[2].method = Method::TMmm;
    records[2].lighting = LightingKind::Paramount;
    records[2].delta_e = 5;
    const GroupKey keys[] = {GroupKey::Method, GroupKey::Lighting};
    const auto g = group_records(records, keys, Metric::DeltaE);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0].values, (std::vector<double>{1, 3}));
    const auto s = summarize_records(records, keys, Metric::DeltaE);
    EXPECT_EQ(s[0].summary.median, 2.0);
    EXPECT_THROW(group_records(records, std::vector<GroupKey>{GroupKey::TruthClass}, Metric::DeltaE), DataError);
}
