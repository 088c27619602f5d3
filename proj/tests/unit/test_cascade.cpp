#include <gtest/gtest.h>

#include <string>

#include "skintone/cascade.hpp"
#include "skintone/error.hpp"
#include "test_support.hpp"

using namespace skintone;

namespace {

// Two stages: a stump, then a stump plus a two-node tree.
const char* kLegacyXml = R"(<?xml version="1.0"?>
<opencv_storage>
<tiny type_id="opencv-haar-classifier">
  <size>20 20</size>
  <stages>
    <_>
      <!-- stage 0 -->
      <trees>
        <_>
          <_>
            <feature>
              <rects>
                <_>2 3 16 6 -1.</_>
                <_>2 6 16 3 2.</_></rects>
              <tilted>0</tilted></feature>
            <threshold>-0.0125</threshold>
            <left_val>-0.75</left_val>
            <right_val>0.875</right_val></_></_></trees>
      <stage_threshold>-0.5</stage_threshold>
      <parent>-1</parent>
      <next>-1</next></_>
    <_>
      <!-- stage 1 -->
      <trees>
        <_>
          <_>
            <feature>
              <rects>
                <_>4 4 6 12 -1.</_>
                <_>7 4 3 12 2.</_></rects>
              <tilted>0</tilted></feature>
            <threshold>0.03</threshold>
            <left_val>0.25</left_val>
            <right_val>-0.5</right_val></_></_>
        <_>
          <_>
            <feature>
              <rects>
                <_>1 1 18 9 -1.</_>
                <_>1 4 18 3 3.</_></rects>
              <tilted>0</tilted></feature>
            <threshold>0.001</threshold>
            <left_node>1</left_node>
            <right_val>0.625</right_val></_>
          <_>
            <feature>
              <rects>
                <_>5 10 10 8 -1.</_>
                <_>5 14 10 4 2.</_></rects>
              <tilted>0</tilted></feature>
            <threshold>-0.02</threshold>
            <left_val>-1.125</left_val>
            <right_val>0.375</right_val></_></_></trees>
      <stage_threshold>-0.25</stage_threshold>
      <parent>0</parent>
      <next>-1</next></_></stages></tiny>
</opencv_storage>
)";

// Same classifier in the flat layout.
const char* kFlatXml = R"(<?xml version="1.0"?>
<opencv_storage>
<cascade type_id="opencv-cascade-classifier"><stageType>BOOST</stageType>
  <featureType>HAAR</featureType>
  <height>20</height>
  <width>20</width>
  <stageParams><maxWeakCount>2</maxWeakCount></stageParams>
  <featureParams><maxCatCount>0</maxCatCount></featureParams>
  <stageNum>2</stageNum>
  <stages>
    <_>
      <maxWeakCount>1</maxWeakCount>
      <stageThreshold>-0.5</stageThreshold>
      <weakClassifiers>
        <_>
          <internalNodes>0 -1 0 -0.0125</internalNodes>
          <leafValues>-0.75 0.875</leafValues></_></weakClassifiers></_>
    <_>
      <maxWeakCount>2</maxWeakCount>
      <stageThreshold>-0.25</stageThreshold>
      <weakClassifiers>
        <_>
          <internalNodes>0 -1 1 0.03</internalNodes>
          <leafValues>0.25 -0.5</leafValues></_>
        <_>
          <internalNodes>1 0 2 0.001 -1 -2 3 -0.02</internalNodes>
          <leafValues>0.625 -1.125 0.375</leafValues></_></weakClassifiers></_></stages>
  <features>
    <_><rects><_>2 3 16 6 -1.</_><_>2 6 16 3 2.</_></rects></_>
    <_><rects><_>4 4 6 12 -1.</_><_>7 4 3 12 2.</_></rects></_>
    <_><rects><_>1 1 18 9 -1.</_><_>1 4 18 3 3.</_></rects></_>
    <_><rects><_>5 10 10 8 -1.</_><_>5 14 10 4 2.</_></rects></_></features></cascade>
</opencv_storage>
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    if (pos != std::string::npos) s.replace(pos, from.size(), to);
    return s;
}

}  // namespace

TEST(Cascade, StockFileCountsMatchIndependentXmlCount) {
    // Counts from a separate XML walk (Python xml.etree) of the same file.
    const Cascade c = load_cascade(test_support::stock_cascade_path());
    EXPECT_EQ(c.window_width, 24);
    EXPECT_EQ(c.window_height, 24);
    EXPECT_EQ(c.stages.size(), 25u);
    EXPECT_EQ(c.classifier_count(), 2913u);
    EXPECT_EQ(c.features.size(), 2913u);
    EXPECT_EQ(c.stages.front().classifiers.size(), 9u);
    EXPECT_NEAR(c.stages.front().threshold, -5.0425500869750977, 1e-12);
}

TEST(Cascade, DumpRoundTripsStockFile) {
    const Cascade c = load_cascade(test_support::stock_cascade_path());
    EXPECT_EQ(parse_cascade(dump_cascade(c)), c);
}

TEST(Cascade, LegacyAndFlatLayoutsAgree) {
    const Cascade legacy = parse_cascade(kLegacyXml);
    const Cascade flat = parse_cascade(kFlatXml);
    EXPECT_EQ(legacy, flat);
    ASSERT_EQ(flat.stages.size(), 2u);
    const auto& tree = flat.stages[1].classifiers[1];
    ASSERT_EQ(tree.nodes.size(), 2u);
    EXPECT_EQ(tree.nodes[0].left, 1);
    EXPECT_EQ(tree.nodes[0].right, 0);
    EXPECT_EQ(tree.nodes[1].left, -1);
    EXPECT_EQ(tree.nodes[1].right, -2);
    EXPECT_EQ(tree.leaves, (std::vector<double>{0.625, -1.125, 0.375}));
}

TEST(Cascade, MinimalDumpRoundTrip) {
    Cascade c;
    c.window_width = 8;
    c.window_height = 6;
    c.features.push_back({{{0, 0, 8, 3, -1.0}, {0, 3, 8, 3, 1.0}}, false});
    WeakClassifier wc;
    wc.nodes.push_back({0, 0.1, 0, -1});
    wc.leaves = {-1.0 / 3.0, 0.7};
    c.stages.push_back({0.2, {wc}});
    EXPECT_EQ(parse_cascade(dump_cascade(c)), c);
}

TEST(Cascade, EmptyInput) {
    EXPECT_THROW(parse_cascade(""), ParseError);
    EXPECT_THROW(parse_cascade("  \n"), ParseError);
}

TEST(Cascade, MalformedXmlReportsLine) {
    const std::string broken = std::string(kFlatXml).substr(0, 400);
    try {
        parse_cascade(broken);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
    }
}

TEST(Cascade, TiltedFeatureIsUnsupported) {
    const auto xml = replace(kLegacyXml, "<tilted>0</tilted></feature>\n            <threshold>-0.0125",
                             "<tilted>1</tilted></feature>\n            <threshold>-0.0125");
    EXPECT_THROW(parse_cascade(xml), UnsupportedError);
}

TEST(Cascade, StageCountMismatch) {
    EXPECT_THROW(parse_cascade(replace(kFlatXml, "<stageNum>2</stageNum>", "<stageNum>3</stageNum>")), ParseError);
}

TEST(Cascade, WeakCountMismatch) {
    EXPECT_THROW(parse_cascade(replace(kFlatXml, "<maxWeakCount>1</maxWeakCount>", "<maxWeakCount>4</maxWeakCount>")),
                 ParseError);
}

TEST(Cascade, FeatureIndexOutOfRange) {
    EXPECT_THROW(parse_cascade(replace(kFlatXml, "0 -1 1 0.03", "0 -1 9 0.03")), ParseError);
}

TEST(Cascade, RectOutsideWindow) {
    EXPECT_THROW(parse_cascade(replace(kFlatXml, "<_>2 3 16 6 -1.</_><_>2 6 16 3 2.</_>",
                                       "<_>2 3 19 6 -1.</_><_>2 6 16 3 2.</_>")),
                 ParseError);
}

TEST(Cascade, NonHaarFeatureTypeIsUnsupported) {
    EXPECT_THROW(parse_cascade(replace(kFlatXml, "<featureType>HAAR</featureType>", "<featureType>LBP</featureType>")),
                 UnsupportedError);
}

TEST(Cascade, StageGraphIsUnsupported) {
    EXPECT_THROW(parse_cascade(replace(kLegacyXml, "<parent>0</parent>", "<parent>-1</parent>")), UnsupportedError);
}

TEST(Cascade, MissingFileNamesPath) {
    try {
        load_cascade("/nonexistent/cascade.xml");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/cascade.xml"), std::string::npos);
    }
}
