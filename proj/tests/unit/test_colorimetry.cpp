#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "skintone/colorimetry.hpp"

using namespace skintone;

namespace {

// Independent sRGB -> Lab: matrix rebuilt from the primaries' chromaticities and
// the white point, and the CIE epsilon/kappa form of f.
using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 inverse(const Mat3& m) {
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    Mat3 r;
    r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return r;
}

Mat3 rgb_to_xyz_from_primaries() {
    const double xs[3] = {0.64, 0.30, 0.15}, ys[3] = {0.33, 0.60, 0.06};
    Mat3 p;
    for (int c = 0; c < 3; ++c) {
        p[0][c] = xs[c] / ys[c];
        p[1][c] = 1.0;
        p[2][c] = (1 - xs[c] - ys[c]) / ys[c];
    }
    const Mat3 pi = inverse(p);
    const double w[3] = {kD65White.x, kD65White.y, kD65White.z};
    Mat3 m;
    for (int c = 0; c < 3; ++c) {
        const double s = pi[c][0] * w[0] + pi[c][1] * w[1] + pi[c][2] * w[2];
        for (int r = 0; r < 3; ++r) m[r][c] = p[r][c] * s;
    }
    return m;
}

LabColor oracle_lab(double r8, double g8, double b8) {
    const auto lin = [](double v) { return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4); };
    const double rgb[3] = {lin(r8), lin(g8), lin(b8)};
    static const Mat3 m = rgb_to_xyz_from_primaries();
    double xyz[3];
    for (int i = 0; i < 3; ++i) xyz[i] = m[i][0] * rgb[0] + m[i][1] * rgb[1] + m[i][2] * rgb[2];
    const double eps = 216.0 / 24389.0, kappa = 24389.0 / 27.0;
    const auto f = [&](double t) { return t > eps ? std::cbrt(t) : (kappa * t + 16) / 116; };
    const double fx = f(xyz[0] / kD65White.x), fy = f(xyz[1] / kD65White.y), fz = f(xyz[2] / kD65White.z);
    return {116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)};
}

}  // namespace

TEST(Colorimetry, DecodeEncodeEndpoints) {
    EXPECT_EQ(srgb_decode(0.0), 0.0);
    EXPECT_DOUBLE_EQ(srgb_decode(1.0), 1.0);
    EXPECT_DOUBLE_EQ(srgb_decode(0.04045), 0.04045 / 12.92);
    EXPECT_NEAR(srgb_decode(0.5), 0.21404114048223255, 1e-15);
    EXPECT_NEAR(srgb_encode(srgb_decode(0.3)), 0.3, 1e-12);
    EXPECT_EQ(srgb_encode(2.0), 1.0);
    EXPECT_EQ(srgb_encode(-1.0), 0.0);
}

TEST(Colorimetry, WhiteAndBlack) {
    const auto white = srgb_to_lab({1, 1, 1});
    EXPECT_NEAR(white.L, 100, 1e-4);
    EXPECT_NEAR(white.a, 0, 1e-3);
    EXPECT_NEAR(white.b, 0, 1e-3);
    const auto black = srgb_to_lab({0, 0, 0});
    EXPECT_NEAR(black.L, 0, 1e-12);
}

TEST(Colorimetry, PublishedPrimaryRed) {
    const auto red = srgb_to_lab({1, 0, 0});
    EXPECT_NEAR(red.L, 53.24, 0.01);
    EXPECT_NEAR(red.a, 80.09, 0.01);
    EXPECT_NEAR(red.b, 67.20, 0.01);
}

TEST(Colorimetry, MatchesPrimariesOracleOnRandomColors) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 2000; ++i) {
        const double r = byte(rng) / 255.0, g = byte(rng) / 255.0, b = byte(rng) / 255.0;
        const auto got = srgb_to_lab({r, g, b});
        const auto want = oracle_lab(r, g, b);
        ASSERT_NEAR(got.L, want.L, 1e-4);
        ASSERT_NEAR(got.a, want.a, 1e-4);
        ASSERT_NEAR(got.b, want.b, 1e-4);
    }
}

TEST(Colorimetry, FrozenSkinSample) {
    // (118, 86, 66); scikit-image (different matrix rounding) agrees to 2e-3.
    const auto lab = srgb_to_lab({118 / 255.0, 86 / 255.0, 66 / 255.0});
    EXPECT_NEAR(lab.L, 39.4136, 1e-3);
    EXPECT_NEAR(lab.a, 10.4587, 1e-3);
    EXPECT_NEAR(lab.b, 16.8310, 1e-3);
}

TEST(Colorimetry, RoundTripGrid) {
    double worst = 0;
    for (int r = 0; r < 32; ++r) {
        for (int g = 0; g < 32; ++g) {
            for (int b = 0; b < 32; ++b) {
                const SrgbColor c{r / 31.0, g / 31.0, b / 31.0};
                const auto back = lab_to_srgb(srgb_to_lab(c));
                EXPECT_FALSE(back.gamut_clipped);
                worst = std::max({worst, std::abs(back.color.r - c.r), std::abs(back.color.g - c.g),
                                  std::abs(back.color.b - c.b)});
            }
        }
    }
    EXPECT_LT(worst, 0.5 / 255);
}

TEST(Colorimetry, OutOfGamutLabIsFlagged) {
    const auto c = lab_to_srgb({50, 120, -120});
    EXPECT_TRUE(c.gamut_clipped);
    for (double v : {c.color.r, c.color.g, c.color.b}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Colorimetry, DeltaE) {
    EXPECT_DOUBLE_EQ(delta_e({50, 0, 0}, {50, 3, 4}), 5.0);
    EXPECT_DOUBLE_EQ(delta_e({10, 20, 30}, {10, 20, 30}), 0.0);
    const LabColor x{12, -3, 40}, y{80, 7, -5};
    EXPECT_DOUBLE_EQ(delta_e(x, y), delta_e(y, x));
}

TEST(Colorimetry, DeltaEBandEdgesBelongBelow) {
    EXPECT_EQ(delta_e_band(0.0), PerceptibilityBand::NotPerceptible);
    EXPECT_EQ(delta_e_band(1.0), PerceptibilityBand::NotPerceptible);
    EXPECT_EQ(delta_e_band(std::nextafter(1.0, 2.0)), PerceptibilityBand::CloseObservation);
    EXPECT_EQ(delta_e_band(2.0), PerceptibilityBand::CloseObservation);
    EXPECT_EQ(delta_e_band(10.0), PerceptibilityBand::AtAGlance);
    EXPECT_EQ(delta_e_band(std::nextafter(10.0, 11.0)), PerceptibilityBand::NoticeablyDifferent);
    EXPECT_EQ(delta_e_band(50.0), PerceptibilityBand::NoticeablyDifferent);
    EXPECT_EQ(delta_e_band(99.0), PerceptibilityBand::StrongDifference);
    EXPECT_EQ(delta_e_band(99.5), PerceptibilityBand::CompletelyDifferent);
}

TEST(Colorimetry, ItaDegrees) {
    EXPECT_DOUBLE_EQ(ita_degrees({50, 0, 10}), 0.0);
    EXPECT_NEAR(ita_degrees({60, 0, 10}), 45.0, 1e-12);
    EXPECT_NEAR(ita_degrees({40, 0, 10}), -45.0, 1e-12);
    EXPECT_DOUBLE_EQ(ita_degrees({70, 0, 0}), 90.0);
    EXPECT_DOUBLE_EQ(ita_degrees({30, 0, 0}), -90.0);
}

TEST(Colorimetry, ItaClassThresholdsGoToDarkerClass) {
    EXPECT_EQ(ita_class(55.0001), ItaClass::I);
    EXPECT_EQ(ita_class(55.0), ItaClass::II);
    EXPECT_EQ(ita_class(41.0001), ItaClass::II);
    EXPECT_EQ(ita_class(41.0), ItaClass::III);
    EXPECT_EQ(ita_class(28.0001), ItaClass::III);
    EXPECT_EQ(ita_class(28.0), ItaClass::IV);
    EXPECT_EQ(ita_class(10.0001), ItaClass::IV);
    EXPECT_EQ(ita_class(10.0), ItaClass::V);
    EXPECT_EQ(ita_class(-29.9999), ItaClass::V);
    EXPECT_EQ(ita_class(-30.0), ItaClass::VI);
    EXPECT_EQ(ita_class(-90.0), ItaClass::VI);
    EXPECT_EQ(ita_class(90.0), ItaClass::I);
}

TEST(Colorimetry, ItaClassIsMonotone) {
    int prev = 0;
    for (double deg = 90; deg >= -90; deg -= 0.25) {
        const int c = static_cast<int>(ita_class(deg));
        EXPECT_GE(c, prev);
        prev = c;
    }
}

TEST(Colorimetry, ClassNamesRoundTrip) {
    for (int i = 0; i < kItaClassCount; ++i) {
        const auto c = static_cast<ItaClass>(i);
        EXPECT_EQ(parse_ita_class(to_string(c)), c);
    }
    EXPECT_FALSE(parse_ita_class("VII").has_value());
}
