#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "skintone/colorimetry.hpp"
#include "skintone/face_detect.hpp"
#include "skintone/image.hpp"
#include "skintone/recolor.hpp"

namespace skintone {

struct Vec3 {
    double x = 0, y = 0, z = 0;
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

Vec3 normalize(const Vec3& v);
double dot(const Vec3& a, const Vec3& b);

// Real spherical-harmonic basis, bands 0-2, in the order
// (0,0) (1,-1) (1,0) (1,1) (2,-2) (2,-1) (2,0) (2,1) (2,2), i.e.
// 1, y, z, x, xy, yz, 3z^2-1, xz, x^2-y^2 with orthonormal constants.
// Directions use +x right, +y up, +z towards the camera.
std::array<double, 9> sh_basis(const Vec3& n);

// Radiance SH coefficients, 9 per channel, channel-major (R, G, B).
struct ShLighting {
    static constexpr std::string_view kConvention = "real-sh-l2;order=(0,0),(1,-1),(1,0),(1,1),(2,-2),(2,-1),(2,0),(2,1),(2,2);"
                                                    "channels=rgb;layout=channel-major;quantity=radiance";
    std::array<std::array<double, 9>, 3> channels{};

    ShLighting scaled(double s) const;
    friend ShLighting operator+(const ShLighting& a, const ShLighting& b);
    friend bool operator==(const ShLighting&, const ShLighting&) = default;
};

// True when a band-0 coefficient is negative (legal, but not a physical environment).
bool has_negative_ambient(const ShLighting& light);

// Band-0 coefficient that gives irradiance 1 for every normal.
inline constexpr double kIdentityAmbientCoefficient = 1.0 / (std::numbers::pi * 0.28209479177387814);

// Uniform environment whose irradiance equals `irradiance` for every normal.
ShLighting ambient_light(const LinearRgb& irradiance);

// E(n) = sum_l A_l sum_m L_lm Y_lm(n), A = (pi, 2pi/3, pi/4), floored at 0.
LinearRgb sh_irradiance(const Vec3& n, const ShLighting& light);

// Delta light of the given intensity along `direction` (pointing towards the light).
ShLighting project_directional_to_sh(const Vec3& direction, const LinearRgb& intensity);

enum class LightingKind : std::uint8_t { CfdSh = 0, Frontal, Paramount };
inline constexpr LightingKind kAllLightingKinds[] = {LightingKind::CfdSh, LightingKind::Frontal, LightingKind::Paramount};

std::string_view to_string(LightingKind k);
std::optional<LightingKind> parse_lighting_kind(std::string_view s);

// Frontal: key of intensity 1 along +z. Paramount: key of intensity 0.8 from
// 45 degrees elevation straight ahead plus a +z fill at 25 % of the key.
ShLighting lighting_preset(LightingKind kind);

struct LightingConfig {
    LightingKind kind = LightingKind::Frontal;
    std::optional<ShLighting> sh;  // required for CfdSh

    ShLighting expand() const;
};

// Per-pixel unit normals plus a coverage mask.
class RenderProxy {
public:
    RenderProxy(int width, int height);

    // Camera-facing hemisphere inscribed in the frame.
    static RenderProxy sphere(int width, int height);
    // Every pixel covered, normal +z.
    static RenderProxy flat(int width, int height);

    int width() const { return normals_.width(); }
    int height() const { return normals_.height(); }
    bool covered(int x, int y) const { return coverage_.at(x, y) != 0; }
    const Vec3& normal(int x, int y) const { return normals_.at(x, y); }
    void set(int x, int y, const Vec3& n);

    // Bounding box of the covered pixels.
    FaceBox bounds() const;

private:
    Image<Vec3> normals_;
    Image<std::uint8_t> coverage_;
};

struct RenderOptions {
    double exposure = std::numbers::pi;  // identity ambient reproduces the texture
    SrgbColor background{0, 0, 0};
};

// Pre-encode linear radiance: decode(texel) * E(n) / pi * exposure on covered
// pixels, decode(background) elsewhere. No clamping.
Image<LinearRgb> render_linear(const Texture& texture, const ShLighting& light, const RenderProxy& proxy,
                               const RenderOptions& options = {});

RgbImage render_proxy(const Texture& texture, const ShLighting& light, const RenderProxy& proxy,
                      const RenderOptions& options = {});
RgbImage render_proxy(const RecoloredTexture& texture, const LightingConfig& light, const RenderProxy& proxy,
                      const RenderOptions& options = {});

// {"convention": ..., "channels": [[9 reals] x 3]}
ShLighting parse_sh_json(std::string_view text);
ShLighting read_sh_json(const std::string& path);
std::string sh_to_json(const ShLighting& light);

}  // namespace skintone
