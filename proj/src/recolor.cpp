#include "skintone/recolor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "skintone/error.hpp"

namespace skintone {

namespace {

SrgbColor channel_mean(const RgbImage& image) {
    double r = 0, g = 0, b = 0;
    for (const auto& p : image.pixels()) {
        r += p.r;
        g += p.g;
        b += p.b;
    }
    const double n = image.empty() ? 1.0 : static_cast<double>(image.size());
    return {r / n, g / n, b / n};
}

Rgb decode(const Rgb& p) { return {srgb_decode(p.r), srgb_decode(p.g), srgb_decode(p.b)}; }

template <typename Op>
RecoloredTexture apply(const Texture& base, const SrgbColor& target, RecolorStrategy strategy, RecolorSpace space,
                       Op op) {
    const bool linear = space == RecolorSpace::Linear;
    RgbImage domain = base.texels();
    if (linear) {
        for (auto& p : domain.pixels()) p = decode(p);
    }
    const SrgbColor mu = linear ? channel_mean(domain) : base.mean();
    const SrgbColor tgt = linear ? SrgbColor{srgb_decode(target.r), srgb_decode(target.g), srgb_decode(target.b)} : target;

    std::size_t clipped = 0;
    for (auto& p : domain.pixels()) {
        Rgb out{op(p.r, mu.r, tgt.r), op(p.g, mu.g, tgt.g), op(p.b, mu.b, tgt.b)};
        const bool clip = std::min({out.r, out.g, out.b}) < 0.0 || std::max({out.r, out.g, out.b}) > 1.0;
        if (clip) ++clipped;
        out = {std::clamp(out.r, 0.0, 1.0), std::clamp(out.g, 0.0, 1.0), std::clamp(out.b, 0.0, 1.0)};
        if (linear) out = {srgb_encode(out.r), srgb_encode(out.g), srgb_encode(out.b)};
        p = out;
    }
    RecoloredTexture result;
    result.texture = Texture(std::move(domain));
    result.strategy = strategy;
    result.space = space;
    result.target = target;
    result.clip_fraction = base.texels().empty() ? 0.0 : static_cast<double>(clipped) / base.texels().size();
    return result;
}

// Smoothstep-interpolated lattice noise in [-1, 1].
std::vector<double> value_noise(int width, int height, int cell, std::mt19937_64& rng) {
    cell = std::max(1, cell);
    const int gw = width / cell + 2;
    const int gh = height / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
    for (auto& v : lattice) v = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
    const auto smooth = [](double t) { return t * t * (3 - 2 * t); };
    std::vector<double> out(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        const int gy = y / cell;
        const double ty = smooth(static_cast<double>(y % cell) / cell);
        for (int x = 0; x < width; ++x) {
            const int gx = x / cell;
            const double tx = smooth(static_cast<double>(x % cell) / cell);
            const auto at = [&](int i, int j) { return lattice[static_cast<std::size_t>(j) * gw + i]; };
            const double top = at(gx, gy) * (1 - tx) + at(gx + 1, gy) * tx;
            const double bottom = at(gx, gy + 1) * (1 - tx) + at(gx + 1, gy + 1) * tx;
            out[static_cast<std::size_t>(y) * width + x] = top * (1 - ty) + bottom * ty;
        }
    }
    return out;
}

}  // namespace

Texture::Texture(RgbImage texels) : texels_(std::move(texels)), mean_(channel_mean(texels_)) {}

std::string_view to_string(RecolorStrategy s) {
    return s == RecolorStrategy::Normalize ? "normalize" : "variation";
}

std::optional<RecolorStrategy> parse_recolor_strategy(std::string_view s) {
    if (s == "normalize" || s == "normalization") return RecolorStrategy::Normalize;
    if (s == "variation" || s == "variation-map") return RecolorStrategy::Variation;
    return std::nullopt;
}

std::string_view to_string(RecolorSpace s) { return s == RecolorSpace::Srgb ? "srgb" : "linear"; }

std::optional<RecolorSpace> parse_recolor_space(std::string_view s) {
    if (s == "srgb") return RecolorSpace::Srgb;
    if (s == "linear") return RecolorSpace::Linear;
    return std::nullopt;
}

RecoloredTexture recolor_normalize(const Texture& base, const SrgbColor& target, RecolorSpace space) {
    const SrgbColor mu = space == RecolorSpace::Linear ? channel_mean([&] {
        RgbImage lin = base.texels();
        for (auto& p : lin.pixels()) p = decode(p);
        return lin;
    }())
                                                       : base.mean();
    if (std::min({mu.r, mu.g, mu.b}) <= 1e-4) throw DataError("base texture not color-neutral enough: channel mean ~ 0");
    return apply(base, target, RecolorStrategy::Normalize, space,
                 [](double v, double m, double t) { return v / m * t; });
}

RecoloredTexture recolor_variation(const Texture& base, const SrgbColor& target, RecolorSpace space) {
    return apply(base, target, RecolorStrategy::Variation, space,
                 [](double v, double m, double t) { return (v - m) + t; });
}

RecoloredTexture recolor(const Texture& base, const SrgbColor& target, RecolorStrategy strategy, RecolorSpace space) {
    return strategy == RecolorStrategy::Normalize ? recolor_normalize(base, target, space)
                                                  : recolor_variation(base, target, space);
}

Texture synthetic_base_texture(const BaseTextureParams& params) {
    if (params.width <= 0 || params.height <= 0) throw DataError("base texture size must be positive");
    std::mt19937_64 rng(params.seed);
    auto noise = value_noise(params.width, params.height, params.cell, rng);
    double mean = 0;
    for (double v : noise) mean += v;
    mean /= static_cast<double>(noise.size());
    RgbImage img(params.width, params.height);
    auto& px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const double v = std::clamp(params.mean + params.amplitude * (noise[i] - mean), 0.0, 1.0);
        px[i] = {v, v, v};
    }
    return Texture(std::move(img));
}

Texture uniform_texture(int width, int height, const SrgbColor& color) {
    return Texture(RgbImage(width, height, Rgb{color.r, color.g, color.b}));
}

}  // namespace skintone
