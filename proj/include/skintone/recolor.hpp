#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "skintone/colorimetry.hpp"
#include "skintone/image.hpp"

namespace skintone {

// sRGB texel grid with its cached per-channel mean.
class Texture {
public:
    Texture() = default;
    explicit Texture(RgbImage texels);

    const RgbImage& texels() const { return texels_; }
    const SrgbColor& mean() const { return mean_; }
    int width() const { return texels_.width(); }
    int height() const { return texels_.height(); }

private:
    RgbImage texels_;
    SrgbColor mean_;
};

enum class RecolorStrategy : std::uint8_t { Normalize = 0, Variation };
inline constexpr RecolorStrategy kAllRecolorStrategies[] = {RecolorStrategy::Normalize, RecolorStrategy::Variation};

// Arithmetic domain. Srgb works on encoded values directly; Linear decodes the
// base and target first and re-encodes the result.
enum class RecolorSpace : std::uint8_t { Srgb = 0, Linear };

std::string_view to_string(RecolorStrategy s);
std::optional<RecolorStrategy> parse_recolor_strategy(std::string_view s);
std::string_view to_string(RecolorSpace s);
std::optional<RecolorSpace> parse_recolor_space(std::string_view s);

struct RecoloredTexture {
    Texture texture;
    RecolorStrategy strategy = RecolorStrategy::Normalize;
    RecolorSpace space = RecolorSpace::Srgb;
    SrgbColor target;
    double clip_fraction = 0;  // share of texels with at least one clamped channel
};

// out = clamp(base / mean(base) * target). Throws DataError when a channel mean
// is below 1e-4.
RecoloredTexture recolor_normalize(const Texture& base, const SrgbColor& target,
                                   RecolorSpace space = RecolorSpace::Srgb);

// out = clamp(base - mean(base) + target).
RecoloredTexture recolor_variation(const Texture& base, const SrgbColor& target,
                                   RecolorSpace space = RecolorSpace::Srgb);

RecoloredTexture recolor(const Texture& base, const SrgbColor& target, RecolorStrategy strategy,
                         RecolorSpace space = RecolorSpace::Srgb);

// Near-neutral procedural skin texture: grey level `mean` plus seeded value
// noise of peak amplitude `amplitude`, recentred so the texel mean is exact.
struct BaseTextureParams {
    int width = 128;
    int height = 128;
    double mean = 0.5;
    double amplitude = 0.08;
    int cell = 8;  // lattice spacing of the value noise, in texels
    std::uint64_t seed = 0;
};

Texture synthetic_base_texture(const BaseTextureParams& params);
Texture uniform_texture(int width, int height, const SrgbColor& color);

}  // namespace skintone
