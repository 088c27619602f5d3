#include "skintone/fixtures.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "skintone/config.hpp"
#include "skintone/util.hpp"

namespace skintone {

namespace fs = std::filesystem;

FaceEllipse fixture_ellipse(int width, int height) {
    return {0.5 * width, 0.525 * height, 0.325 * width, 0.4 * height};
}

FaceBox fixture_face_box(int width, int height) {
    const auto e = fixture_ellipse(width, height);
    const int x0 = static_cast<int>(std::lround(e.cx - e.ax));
    const int y0 = static_cast<int>(std::lround(e.cy - e.ay));
    return {x0, y0, static_cast<int>(std::lround(e.cx + e.ax)) - x0, static_cast<int>(std::lround(e.cy + e.ay)) - y0};
}

RenderProxy fixture_proxy(int width, int height) {
    const auto e = fixture_ellipse(width, height);
    RenderProxy proxy(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = (x + 0.5 - e.cx) / e.ax;
            const double v = -(y + 0.5 - e.cy) / e.ay;
            const double rr = u * u + v * v;
            if (rr < 1.0) proxy.set(x, y, normalize({u, v, std::sqrt(1.0 - rr)}));
        }
    }
    return proxy;
}

Landmarks fixture_landmarks(int width, int height) {
    const auto e = fixture_ellipse(width, height);
    Landmarks points;
    for (int i = 0; i < 24; ++i) {
        const double t = 2 * std::numbers::pi * i / 24.0;
        points.push_back({e.cx + 0.9 * e.ax * std::cos(t), e.cy + 0.9 * e.ay * std::sin(t)});
    }
    return points;
}

LabColor ramp_lab(int index, int count) {
    const double t = count > 1 ? static_cast<double>(index) / (count - 1) : 0.0;
    return {78.0 - 50.0 * t, 10.0, 16.0};
}

RgbImage fixture_albedo(const SrgbColor& skin, int width, int height, double noise, std::uint64_t seed) {
    const RenderProxy proxy = fixture_proxy(width, height);
    std::mt19937_64 rng(seed);
    const auto jitter = [&] { return noise * (static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0); };
    RgbImage image(width, height, Rgb{kFixtureBackground.r, kFixtureBackground.g, kFixtureBackground.b});
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!proxy.covered(x, y)) continue;
            const double r = std::clamp(skin.r + jitter(), 0.0, 1.0);
            const double g = std::clamp(skin.g + jitter(), 0.0, 1.0);
            const double b = std::clamp(skin.b + jitter(), 0.0, 1.0);
            image.at(x, y) = {r, g, b};
        }
    }
    return image;
}

ShLighting studio_environment(double strength) {
    const ShLighting env = ambient_light({0.45, 0.45, 0.45}) +
                           project_directional_to_sh(normalize({-0.4, 0.4, 1.0}), {0.7, 0.7, 0.7});
    return env.scaled(strength);
}

RgbImage shade_fixture(const RgbImage& albedo, const ShLighting& light, double exposure) {
    const RenderProxy proxy = fixture_proxy(albedo.width(), albedo.height());
    RgbImage out = albedo;
    for (int y = 0; y < albedo.height(); ++y) {
        for (int x = 0; x < albedo.width(); ++x) {
            if (!proxy.covered(x, y)) continue;
            const LinearRgb e = sh_irradiance(proxy.normal(x, y), light);
            const auto& a = albedo.at(x, y);
            const double k = exposure / std::numbers::pi;
            out.at(x, y) = {srgb_encode(srgb_decode(a.r) * e.r * k), srgb_encode(srgb_decode(a.g) * e.g * k),
                            srgb_encode(srgb_decode(a.b) * e.b * k)};
        }
    }
    return out;
}

Manifest generate_fixtures(const fs::path& dir, const FixtureParams& params) {
    fs::create_directories(dir / "images");
    const int n = params.size;
    const ShLighting light = params.closed_loop ? ambient_light({1, 1, 1}) : studio_environment();
    const std::string sh_text = sh_to_json(light);
    const auto landmarks = fixture_landmarks(n, n);
    std::string landmark_text = "# x y\n";
    for (const auto& p : landmarks) landmark_text += format_double(p.x) + " " + format_double(p.y) + "\n";
    write_atomic(dir / "images" / "landmarks.txt", landmark_text);
    write_atomic(dir / "images" / "lighting_sh.json", sh_text);

    Manifest manifest;
    for (int i = 0; i < params.count; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "face%02d", i + 1);
        const SrgbColor skin = lab_to_srgb(ramp_lab(i, params.count)).color;
        const RgbImage albedo = fixture_albedo(skin, n, n, params.noise, params.seed * 1000003ULL + static_cast<std::uint64_t>(i));
        const RgbImage photo = params.closed_loop ? albedo : shade_fixture(albedo, light);
        const fs::path photo_path = dir / "images" / (std::string(id) + "_photo.png");
        const fs::path albedo_path = dir / "images" / (std::string(id) + "_albedo.png");
        write_image(photo_path.string(), photo);
        write_image(albedo_path.string(), albedo);
        ManifestRow row;
        row.id = id;
        row.photo = photo_path;
        row.albedo = albedo_path;
        row.landmarks = dir / "images" / "landmarks.txt";
        row.face = fixture_face_box(n, n);
        row.sh = dir / "images" / "lighting_sh.json";
        row.line = i + 2;
        manifest.rows.push_back(std::move(row));
    }
    write_manifest_csv(dir / "manifest.csv", manifest);

    if (params.closed_loop) {
        // Uniform base texture under the identity environment only.
        RunConfig config;
        config.lightings = {LightingKind::CfdSh};
        config.base.amplitude = 0;
        config.seed = params.seed;
        auto j = config_to_json(config);
        j.erase("out");
        j.erase("jobs");
        j.erase("cache");
        write_atomic(dir / "config.json", j.dump(2) + "\n");
    }
    return manifest;
}

}  // namespace skintone
