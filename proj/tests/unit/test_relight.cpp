#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "skintone/error.hpp"
#include "skintone/relight.hpp"

using namespace skintone;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0, 1);
    return normalize({n(rng), n(rng), n(rng)});
}

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 random_rotation(std::mt19937_64& rng) {
    const Vec3 a = random_unit(rng);
    Vec3 b = random_unit(rng);
    const double d = dot(a, b);
    b = normalize({b.x - d * a.x, b.y - d * a.y, b.z - d * a.z});
    const Vec3 c{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
    return {{{a.x, b.x, c.x}, {a.y, b.y, c.y}, {a.z, b.z, c.z}}};
}

Vec3 apply(const Mat3& m, const Vec3& v) {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z, m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

// Midpoint quadrature of  integral L(w) max(0, n.w) dw  with L the SH radiance
// expansion itself (the band-limited light the projection represents).
double quadrature_irradiance(const ShLighting& light, const Vec3& n, int channel) {
    const int nt = 240, np = 480;
    double sum = 0;
    for (int i = 0; i < nt; ++i) {
        const double t = (i + 0.5) * kPi / nt;
        for (int j = 0; j < np; ++j) {
            const double p = (j + 0.5) * 2 * kPi / np;
            const Vec3 w{std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
            const double cosine = dot(n, w);
            if (cosine <= 0) continue;
            const auto y = sh_basis(w);
            double radiance = 0;
            for (int k = 0; k < 9; ++k) radiance += light.channels[channel][k] * y[k];
            sum += radiance * cosine * std::sin(t);
        }
    }
    return sum * (kPi / nt) * (2 * kPi / np);
}

}  // namespace

TEST(Sh, BasisConstants) {
    const auto y = sh_basis({0, 0, 1});
    EXPECT_NEAR(y[0], 0.28209479177387814, 1e-15);
    EXPECT_NEAR(y[2], 0.4886025119029199, 1e-15);
    EXPECT_NEAR(y[6], 0.31539156525252005 * 2, 1e-15);
    EXPECT_EQ(y[1], 0.0);
    EXPECT_EQ(y[3], 0.0);
    EXPECT_EQ(y[8], 0.0);
}

TEST(Sh, BasisIsOrthonormal) {
    // Quadrature of Y_i Y_j over the sphere.
    const int nt = 200, np = 400;
    std::array<std::array<double, 9>, 9> g{};
    for (int i = 0; i < nt; ++i) {
        const double t = (i + 0.5) * kPi / nt;
        for (int j = 0; j < np; ++j) {
            const double p = (j + 0.5) * 2 * kPi / np;
            const auto y = sh_basis({std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)});
            const double dw = std::sin(t) * (kPi / nt) * (2 * kPi / np);
            for (int a = 0; a < 9; ++a) {
                for (int b = 0; b < 9; ++b) g[a][b] += y[a] * y[b] * dw;
            }
        }
    }
    for (int a = 0; a < 9; ++a) {
        for (int b = 0; b < 9; ++b) EXPECT_NEAR(g[a][b], a == b ? 1.0 : 0.0, 1e-4) << a << "," << b;
    }
}

TEST(Sh, IdentityAmbient) {
    std::mt19937_64 rng(1);
    const ShLighting light = ambient_light({1, 1, 1});
    for (int i = 0; i < 50; ++i) {
        const auto e = sh_irradiance(random_unit(rng), light);
        EXPECT_NEAR(e.r, 1.0, 1e-12);
        EXPECT_NEAR(e.b, 1.0, 1e-12);
    }
    EXPECT_NEAR(light.channels[0][0], kIdentityAmbientCoefficient, 0);
}

TEST(Sh, ZeroLight) {
    const auto e = sh_irradiance({0, 0, 1}, ShLighting{});
    EXPECT_EQ(e, (LinearRgb{0, 0, 0}));
}

TEST(Sh, DirectionalMatchesQuadratureOracle) {
    std::mt19937_64 rng(2);
    const Vec3 d = normalize({0.3, 0.5, 0.8});
    const ShLighting light = project_directional_to_sh(d, {1, 1, 1});
    double peak = 0;
    for (int i = 0; i < 64; ++i) {
        const Vec3 n = random_unit(rng);
        const double got = sh_irradiance(n, light).r;
        const double want = std::max(0.0, quadrature_irradiance(light, n, 0));
        peak = std::max(peak, want);
        EXPECT_NEAR(got, want, 0.05 * std::max(want, 0.1)) << i;
        // Against the unfiltered delta light, the order-2 error stays under 0.1 I.
        EXPECT_NEAR(got, std::max(0.0, dot(n, d)), 0.1) << i;
    }
    EXPECT_GT(peak, 0.5);
}

TEST(Sh, AlignedDirectionalPeak) {
    // The order-2 clamped cosine overshoots to 1.0625 at the light direction.
    const auto e = sh_irradiance({0, 0, 1}, project_directional_to_sh({0, 0, 1}, {1, 1, 1}));
    EXPECT_NEAR(e.r, 1.0625, 1e-12);
}

TEST(Sh, AxialSymmetryOfPlusZ) {
    const auto l = project_directional_to_sh({0, 0, 1}, {1, 1, 1});
    for (int i : {1, 3, 4, 5, 7, 8}) EXPECT_NEAR(l.channels[0][i], 0.0, 1e-15) << i;
    EXPECT_GT(l.channels[0][2], 0.0);
}

TEST(Sh, OppositeDirectionsParity) {
    std::mt19937_64 rng(3);
    const Vec3 d = random_unit(rng);
    const auto a = project_directional_to_sh(d, {1, 1, 1});
    const auto b = project_directional_to_sh({-d.x, -d.y, -d.z}, {1, 1, 1});
    EXPECT_NEAR(a.channels[0][0], b.channels[0][0], 1e-15);
    for (int i : {1, 2, 3}) EXPECT_NEAR(a.channels[0][i], -b.channels[0][i], 1e-15);
    for (int i : {4, 5, 6, 7, 8}) EXPECT_NEAR(a.channels[0][i], b.channels[0][i], 1e-15);
}

TEST(Sh, RotationInvariance) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const Mat3 r = random_rotation(rng);
        const Vec3 d = random_unit(rng), n = random_unit(rng);
        const double e0 = sh_irradiance(n, project_directional_to_sh(d, {1, 1, 1})).g;
        const double e1 = sh_irradiance(apply(r, n), project_directional_to_sh(apply(r, d), {1, 1, 1})).g;
        EXPECT_NEAR(e0, e1, 1e-6);
    }
}

TEST(Sh, NegativeAmbientFlag) {
    EXPECT_FALSE(has_negative_ambient(ambient_light({1, 1, 1})));
    EXPECT_TRUE(has_negative_ambient(ambient_light({1, -1, 1})));
}

TEST(Presets, FrontalCosineLobe) {
    const auto l = lighting_preset(LightingKind::Frontal);
    const double on = sh_irradiance({0, 0, 1}, l).r;
    const double off = sh_irradiance({std::sin(kPi / 3), 0, std::cos(kPi / 3)}, l).r;
    EXPECT_LT(off, on);
}

TEST(Presets, ParamountDiffersAndIsPure) {
    const auto p = lighting_preset(LightingKind::Paramount);
    EXPECT_EQ(p, lighting_preset(LightingKind::Paramount));
    EXPECT_NE(sh_irradiance({0, 0, 1}, p).r, sh_irradiance({0, 0, 1}, lighting_preset(LightingKind::Frontal)).r);
    // Key from above: the upper hemisphere is brighter.
    EXPECT_GT(sh_irradiance(normalize({0, 0.5, 1}), p).r, sh_irradiance(normalize({0, -0.5, 1}), p).r);
    EXPECT_THROW(lighting_preset(LightingKind::CfdSh), DataError);
}

TEST(Proxy, SphereNormalsAreUnit) {
    const auto proxy = RenderProxy::sphere(64, 48);
    std::size_t covered = 0;
    for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 64; ++x) {
            if (!proxy.covered(x, y)) continue;
            ++covered;
            const auto& n = proxy.normal(x, y);
            EXPECT_NEAR(std::sqrt(dot(n, n)), 1.0, 1e-6);
            EXPECT_GT(n.z, 0.0);
        }
    }
    EXPECT_NEAR(static_cast<double>(covered), kPi * 24 * 24, 60);
    const auto b = proxy.bounds();
    EXPECT_EQ(b.w, 48);
    EXPECT_EQ(b.x, 8);
}

TEST(Render, IdentityAmbientOnFlatProxyReproducesTexture) {
    std::mt19937_64 rng(5);
    RgbImage img(16, 16);
    for (auto& p : img.pixels()) p = {(rng() % 256) / 255.0, (rng() % 256) / 255.0, (rng() % 256) / 255.0};
    const auto out = render_proxy(Texture(img), ambient_light({1, 1, 1}), RenderProxy::flat(16, 16));
    for (std::size_t i = 0; i < img.size(); ++i) {
        ASSERT_NEAR(out.pixels()[i].r, img.pixels()[i].r, 1e-12);
        ASSERT_NEAR(out.pixels()[i].b, img.pixels()[i].b, 1e-12);
    }
}

TEST(Render, HalfAmbientHalvesLinear) {
    const Texture t = uniform_texture(8, 8, {0.6, 0.5, 0.4});
    const auto proxy = RenderProxy::flat(8, 8);
    const auto full = render_linear(t, ambient_light({1, 1, 1}), proxy);
    const auto half = render_linear(t, ambient_light({0.5, 0.5, 0.5}), proxy);
    for (std::size_t i = 0; i < full.size(); ++i) EXPECT_NEAR(half.pixels()[i].g, 0.5 * full.pixels()[i].g, 1e-15);
}

TEST(Render, EnergyScalesLinearly) {
    const Texture t = uniform_texture(32, 32, {0.6, 0.5, 0.4});
    const auto proxy = RenderProxy::sphere(32, 32);
    const auto light = lighting_preset(LightingKind::Paramount);
    const auto a = render_linear(t, light, proxy);
    const auto b = render_linear(t, light.scaled(2.5), proxy);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(b.pixels()[i].r, 2.5 * a.pixels()[i].r, 1e-12);
}

TEST(Render, SphereUnderFrontalMatchesPerPixelOracle) {
    const SrgbColor c{0.7, 0.55, 0.45};
    const Texture t = uniform_texture(48, 48, c);
    const auto proxy = RenderProxy::sphere(48, 48);
    const auto light = lighting_preset(LightingKind::Frontal);
    const auto out = render_proxy(t, light, proxy);
    for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 48; ++x) {
            if (!proxy.covered(x, y)) {
                EXPECT_EQ(out.at(x, y), (Rgb{0, 0, 0}));
                continue;
            }
            const double e = sh_irradiance(proxy.normal(x, y), light).r;
            ASSERT_NEAR(out.at(x, y).r, srgb_encode(srgb_decode(c.r) * e), 1e-12);
        }
    }
    // Brightness falls off from the centre along the horizontal diameter.
    for (int x = 25; x < 47; ++x) EXPECT_LE(out.at(x + 1, 24).g, out.at(x, 24).g);
}

TEST(ShJson, RoundTrip) {
    const auto light = lighting_preset(LightingKind::Paramount) + ambient_light({0.2, 0.3, 0.1});
    const auto text = sh_to_json(light);
    EXPECT_NE(text.find("convention"), std::string::npos);
    EXPECT_EQ(parse_sh_json(text), light);
}

TEST(ShJson, Errors) {
    EXPECT_THROW(parse_sh_json("{"), ParseError);
    EXPECT_THROW(parse_sh_json(R"({"channels": [[1,2,3]]})"), ParseError);
    EXPECT_THROW(parse_sh_json(R"({"channels": [[0,0,0,0,0,0,0,0,0],[0,0,0,0,0,0,0,0,0],[0,0,0,0,0,0,0,0]]})"),
                 ParseError);
}

TEST(Lighting, Names) {
    for (auto k : kAllLightingKinds) EXPECT_EQ(parse_lighting_kind(to_string(k)), k);
    EXPECT_FALSE(parse_lighting_kind("rembrandt").has_value());
}
