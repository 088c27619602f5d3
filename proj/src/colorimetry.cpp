#include "skintone/colorimetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace skintone {

namespace {

// sRGB / BT.709 primaries, D65 white.
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

using Mat3 = std::array<std::array<double, 3>, 3>;

// Exact inverse of the forward matrix, so gamut-edge colours survive a round trip.
constexpr Mat3 invert(const double (&m)[3][3]) {
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    Mat3 r{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int a0 = (j + 1) % 3, a1 = (j + 2) % 3, b0 = (i + 1) % 3, b1 = (i + 2) % 3;
            r[i][j] = (m[a0][b0] * m[a1][b1] - m[a0][b1] * m[a1][b0]) / det;
        }
    }
    return r;
}

constexpr Mat3 kXyzToRgb = invert(kRgbToXyz);

constexpr double kDelta = 6.0 / 29.0;

double lab_f(double t) {
    if (t > kDelta * kDelta * kDelta) return std::cbrt(t);
    return t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double t) {
    if (t > kDelta) return t * t * t;
    return 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

}  // namespace

double srgb_decode(double v) {
    if (v <= 0.04045) return v / 12.92;
    return std::pow((v + 0.055) / 1.055, 2.4);
}

double srgb_encode(double v) {
    if (v >= 1.0) return 1.0;
    if (v <= 0.0031308) return 12.92 * std::max(v, 0.0);
    return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

LinearRgb to_linear(const SrgbColor& c) {
    return {srgb_decode(c.r), srgb_decode(c.g), srgb_decode(c.b)};
}

SrgbColor to_srgb(const LinearRgb& c) {
    return {srgb_encode(c.r), srgb_encode(c.g), srgb_encode(c.b)};
}

XyzColor linear_to_xyz(const LinearRgb& c) {
    const double v[3] = {c.r, c.g, c.b};
    double out[3];
    for (int i = 0; i < 3; ++i) out[i] = kRgbToXyz[i][0] * v[0] + kRgbToXyz[i][1] * v[1] + kRgbToXyz[i][2] * v[2];
    return {out[0], out[1], out[2]};
}

LinearRgb xyz_to_linear(const XyzColor& c) {
    const double v[3] = {c.x, c.y, c.z};
    double out[3];
    for (int i = 0; i < 3; ++i) out[i] = kXyzToRgb[i][0] * v[0] + kXyzToRgb[i][1] * v[1] + kXyzToRgb[i][2] * v[2];
    return {out[0], out[1], out[2]};
}

LabColor xyz_to_lab(const XyzColor& c) {
    const double fx = lab_f(c.x / kD65White.x);
    const double fy = lab_f(c.y / kD65White.y);
    const double fz = lab_f(c.z / kD65White.z);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

XyzColor lab_to_xyz(const LabColor& c) {
    const double fy = (c.L + 16.0) / 116.0;
    const double fx = fy + c.a / 500.0;
    const double fz = fy - c.b / 200.0;
    return {kD65White.x * lab_f_inv(fx), kD65White.y * lab_f_inv(fy), kD65White.z * lab_f_inv(fz)};
}

LabColor srgb_to_lab(const SrgbColor& c) {
    return xyz_to_lab(linear_to_xyz(to_linear(c)));
}

SrgbConversion lab_to_srgb(const LabColor& c) {
    const LinearRgb lin = xyz_to_linear(lab_to_xyz(c));
    // Tolerate round-off at the gamut surface (white maps to 1 + ~1e-9).
    constexpr double kSlack = 1e-9;
    const auto outside = [](double v) { return v < -kSlack || v > 1.0 + kSlack; };
    SrgbConversion out;
    out.gamut_clipped = outside(lin.r) || outside(lin.g) || outside(lin.b);
    out.color = to_srgb(lin);
    return out;
}

double delta_e(const LabColor& x, const LabColor& y) {
    const double dl = y.L - x.L;
    const double da = y.a - x.a;
    const double db = y.b - x.b;
    return std::sqrt(dl * dl + da * da + db * db);
}

PerceptibilityBand delta_e_band(double de) {
    if (de <= 1.0) return PerceptibilityBand::NotPerceptible;
    if (de <= 2.0) return PerceptibilityBand::CloseObservation;
    if (de <= 10.0) return PerceptibilityBand::AtAGlance;
    if (de <= 50.0) return PerceptibilityBand::NoticeablyDifferent;
    if (de <= 99.0) return PerceptibilityBand::StrongDifference;
    return PerceptibilityBand::CompletelyDifferent;
}

double ita_degrees(const LabColor& c) {
    return std::atan2(c.L - 50.0, c.b) * 180.0 / std::numbers::pi;
}

ItaClass ita_class(double deg, const ItaThresholds& t) {
    if (deg > t.i_ii) return ItaClass::I;
    if (deg > t.ii_iii) return ItaClass::II;
    if (deg > t.iii_iv) return ItaClass::III;
    if (deg > t.iv_v) return ItaClass::IV;
    if (deg > t.v_vi) return ItaClass::V;
    return ItaClass::VI;
}

std::string_view to_string(ItaClass c) {
    switch (c) {
        case ItaClass::I: return "I";
        case ItaClass::II: return "II";
        case ItaClass::III: return "III";
        case ItaClass::IV: return "IV";
        case ItaClass::V: return "V";
        case ItaClass::VI: return "VI";
    }
    return "?";
}

std::string_view to_string(PerceptibilityBand band) {
    switch (band) {
        case PerceptibilityBand::NotPerceptible: return "not perceptible";
        case PerceptibilityBand::CloseObservation: return "perceptible through close observation";
        case PerceptibilityBand::AtAGlance: return "perceptible at a glance";
        case PerceptibilityBand::NoticeablyDifferent: return "noticeably different";
        case PerceptibilityBand::StrongDifference: return "strong difference";
        case PerceptibilityBand::CompletelyDifferent: return "completely different";
    }
    return "?";
}

std::optional<ItaClass> parse_ita_class(std::string_view s) {
    for (int i = 0; i < kItaClassCount; ++i) {
        const auto c = static_cast<ItaClass>(i);
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

}  // namespace skintone
