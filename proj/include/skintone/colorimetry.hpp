#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace skintone {

// Display-referred sRGB, unit interval per channel.
struct SrgbColor {
    double r = 0, g = 0, b = 0;
    friend bool operator==(const SrgbColor&, const SrgbColor&) = default;
};

// Linear-light RGB (sRGB primaries). Values above 1 are allowed before clamping.
struct LinearRgb {
    double r = 0, g = 0, b = 0;
    friend bool operator==(const LinearRgb&, const LinearRgb&) = default;
};

// CIELAB relative to the D65 2-degree white.
struct LabColor {
    double L = 0, a = 0, b = 0;
    friend bool operator==(const LabColor&, const LabColor&) = default;
};

struct XyzColor {
    double x = 0, y = 0, z = 0;
};

// Reference white used for every Lab conversion.
inline constexpr XyzColor kD65White{0.95047, 1.00000, 1.08883};

enum class ItaClass : std::uint8_t { I = 0, II, III, IV, V, VI };
inline constexpr int kItaClassCount = 6;

enum class PerceptibilityBand : std::uint8_t {
    NotPerceptible = 0,   // de <= 1
    CloseObservation,     // 1 < de <= 2
    AtAGlance,            // 2 < de <= 10
    NoticeablyDifferent,  // 10 < de <= 50
    StrongDifference,     // 50 < de <= 99
    CompletelyDifferent,  // de > 99
};

// ITA class edges in degrees, brightest first. A value equal to an edge belongs
// to the darker class (e.g. exactly 55 is class II).
struct ItaThresholds {
    double i_ii = 55.0;
    double ii_iii = 41.0;
    double iii_iv = 28.0;
    double iv_v = 10.0;
    double v_vi = -30.0;
};

double srgb_decode(double v);  // EOTF: encoded -> linear
double srgb_encode(double v);  // inverse EOTF, input clamped to [0, 1]

LinearRgb to_linear(const SrgbColor& c);
SrgbColor to_srgb(const LinearRgb& c);  // clamps to [0, 1]

XyzColor linear_to_xyz(const LinearRgb& c);
LinearRgb xyz_to_linear(const XyzColor& c);
LabColor xyz_to_lab(const XyzColor& c);
XyzColor lab_to_xyz(const LabColor& c);

LabColor srgb_to_lab(const SrgbColor& c);

struct SrgbConversion {
    SrgbColor color;
    bool gamut_clipped = false;
};

// Inverse of srgb_to_lab. Channels outside [0, 1] are clamped and flagged.
SrgbConversion lab_to_srgb(const LabColor& c);

// CIE76 colour difference.
double delta_e(const LabColor& x, const LabColor& y);

PerceptibilityBand delta_e_band(double de);

// Individual typology angle, atan2(L - 50, b) in degrees; b = 0 gives +/-90.
double ita_degrees(const LabColor& c);

ItaClass ita_class(double degrees, const ItaThresholds& thresholds = {});

std::string_view to_string(ItaClass c);
std::string_view to_string(PerceptibilityBand band);
std::optional<ItaClass> parse_ita_class(std::string_view s);

}  // namespace skintone
