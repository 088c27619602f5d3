#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "skintone/cascade.hpp"
#include "skintone/face_detect.hpp"
#include "skintone/integral_image.hpp"
#include "test_support.hpp"

using namespace skintone;
using test_support::random_gray;
using test_support::brute_force_stages;
using test_support::naive_sum;
using test_support::pasted_face_scene;

namespace {

const Cascade& stock() {
    static const Cascade c = load_cascade(test_support::stock_cascade_path());
    return c;
}

}  // namespace

TEST(IntegralImage, MatchesNaiveSumsOnRandomImages) {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 50; ++n) {
        const int w = 1 + static_cast<int>(rng() % 40), h = 1 + static_cast<int>(rng() % 40);
        const GrayImage g = random_gray(w, h, rng);
        const IntegralImage ii(g);
        for (int t = 0; t < 40; ++t) {
            const int x = static_cast<int>(rng() % w), y = static_cast<int>(rng() % h);
            const int rw = 1 + static_cast<int>(rng() % (w - x)), rh = 1 + static_cast<int>(rng() % (h - y));
            ASSERT_EQ(static_cast<double>(ii.rect_sum(x, y, rw, rh)), naive_sum(g, x, y, rw, rh));
            ASSERT_EQ(static_cast<double>(ii.rect_sq_sum(x, y, rw, rh)), naive_sum(g, x, y, rw, rh, true));
        }
        ASSERT_EQ(static_cast<double>(ii.rect_sum(0, 0, w, h)), naive_sum(g, 0, 0, w, h));
    }
}

TEST(IntegralImage, FirstRowAndColumnAreZero) {
    std::mt19937_64 rng(3);
    const IntegralImage ii(random_gray(5, 4, rng));
    for (int x = 0; x <= 5; ++x) EXPECT_EQ(ii.sum_at(x, 0), 0u);
    for (int y = 0; y <= 4; ++y) EXPECT_EQ(ii.sum_at(0, y), 0u);
}

TEST(FaceDetect, StagedEvaluationMatchesBruteForce) {
    const Cascade& c = stock();
    std::mt19937_64 rng(5);
    const GrayImage face = to_gray(pasted_face_scene());
    const GrayImage small = resize_bilinear(face, 80, 60);  // face side ~24 px
    const GrayImage noise = random_gray(64, 64, rng);
    std::size_t deep = 0;
    for (int t = 0; t < 1000; ++t) {
        const GrayImage& g = t % 4 == 3 ? noise : (t % 2 ? face : small);
        const IntegralImage ii(g);
        const int x = static_cast<int>(rng() % (g.width() - 24 + 1));
        const int y = static_cast<int>(rng() % (g.height() - 24 + 1));
        const std::size_t got = evaluate_window(c, ii, x, y);
        ASSERT_EQ(got, brute_force_stages(c, g, x, y, 1e-6)) << "window " << x << "," << y;
        deep += got >= 3;
    }
    EXPECT_GT(deep, 0u);  // the oracle is exercised past the first stages
}

TEST(FaceDetect, FlatWindowIsRejected) {
    const GrayImage flat(40, 40, 128);
    const IntegralImage ii(flat);
    EXPECT_FALSE(window_norm_factor(stock(), ii, 3, 3).has_value());
    EXPECT_EQ(evaluate_window(stock(), ii, 3, 3), 0u);
}

TEST(FaceDetect, PastedFaceYieldsOneBox) {
    const auto boxes = detect_faces(pasted_face_scene(), stock());
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_GE(iou(boxes[0], {130, 80, 95, 95}), 0.5) << boxes[0].x << "," << boxes[0].y << " " << boxes[0].w;
}

TEST(FaceDetect, BlankImageYieldsNothing) {
    EXPECT_TRUE(detect_faces(GrayImage(120, 90, 100), stock()).empty());
}

TEST(FaceDetect, ThreadCountDoesNotChangeRawHits) {
    const GrayImage g = to_gray(pasted_face_scene());
    DetectParams one, four;
    four.threads = 4;
    EXPECT_EQ(detect_raw(g, stock(), one), detect_raw(g, stock(), four));
}

TEST(FaceDetect, Iou) {
    EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
    EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
    EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0);
}

TEST(FaceDetect, GroupingNeedsMoreThanMinNeighbors) {
    const std::vector<FaceBox> four = {{10, 10, 24, 24}, {11, 10, 24, 24}, {10, 11, 24, 24}, {12, 12, 24, 24}};
    EXPECT_EQ(group_boxes(four, 3, 0.3).size(), 1u);
    EXPECT_TRUE(group_boxes(std::span(four).first(3), 3, 0.3).empty());
    EXPECT_EQ(group_boxes(four, 0, 0.3).size(), 1u);
}

TEST(FaceDetect, GroupedBoxIsMemberAverage) {
    const std::vector<FaceBox> hits = {{10, 10, 20, 20}, {12, 10, 20, 20}, {10, 12, 24, 24}, {12, 12, 24, 24}};
    const auto g = group_boxes(hits, 0, 0.3);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0], (FaceBox{11, 11, 22, 22}));
}

TEST(FaceDetect, SeparateClustersSortedByArea) {
    std::vector<FaceBox> hits;
    for (int i = 0; i < 4; ++i) hits.push_back({100 + i, 100, 40, 40});
    for (int i = 0; i < 4; ++i) hits.push_back({10 + i, 10, 24, 24});
    const auto g = group_boxes(hits, 3, 0.3);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_GT(g[0].area(), g[1].area());
}

TEST(FaceDetect, NestedWeakerGroupIsDropped) {
    std::vector<FaceBox> hits;
    for (int i = 0; i < 6; ++i) hits.push_back({50 + i % 2, 50, 80, 80});
    for (int i = 0; i < 4; ++i) hits.push_back({70 + i % 2, 70, 24, 24});
    const auto g = group_boxes(hits, 3, 0.3);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0].w, 80);
}

TEST(FaceDetect, PrimaryFaceIsLargest) {
    const std::vector<FaceBox> boxes = {{0, 0, 10, 10}, {5, 5, 30, 30}, {1, 1, 30, 30}};
    EXPECT_EQ(select_primary_face(boxes), (FaceBox{1, 1, 30, 30}));
    EXPECT_FALSE(select_primary_face({}).has_value());
}

TEST(FaceDetect, ResizeKeepsConstantImage) {
    const GrayImage g(17, 9, 77);
    const GrayImage r = resize_bilinear(g, 8, 5);
    for (auto p : r.pixels()) EXPECT_EQ(p, 77);
    EXPECT_EQ(resize_bilinear(g, 17, 9), g);
}
