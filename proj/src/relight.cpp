#include "skintone/relight.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "skintone/error.hpp"

namespace skintone {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBandWeight[3] = {kPi, 2.0 * kPi / 3.0, kPi / 4.0};
constexpr int kBandOf[9] = {0, 1, 1, 1, 2, 2, 2, 2, 2};

}  // namespace

Vec3 normalize(const Vec3& v) {
    const double n = std::sqrt(dot(v, v));
    if (n == 0) throw DataError("cannot normalise a zero vector");
    return {v.x / n, v.y / n, v.z / n};
}

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

std::array<double, 9> sh_basis(const Vec3& n) {
    const double x = n.x, y = n.y, z = n.z;
    return {
        0.28209479177387814,
        0.48860251190291992 * y,
        0.48860251190291992 * z,
        0.48860251190291992 * x,
        1.0925484305920792 * x * y,
        1.0925484305920792 * y * z,
        0.31539156525252005 * (3.0 * z * z - 1.0),
        1.0925484305920792 * x * z,
        0.54627421529603959 * (x * x - y * y),
    };
}

ShLighting ShLighting::scaled(double s) const {
    ShLighting out = *this;
    for (auto& ch : out.channels) {
        for (auto& c : ch) c *= s;
    }
    return out;
}

ShLighting operator+(const ShLighting& a, const ShLighting& b) {
    ShLighting out = a;
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 9; ++i) out.channels[c][i] += b.channels[c][i];
    }
    return out;
}

bool has_negative_ambient(const ShLighting& light) {
    return light.channels[0][0] < 0 || light.channels[1][0] < 0 || light.channels[2][0] < 0;
}

ShLighting ambient_light(const LinearRgb& irradiance) {
    ShLighting l;
    l.channels[0][0] = irradiance.r * kIdentityAmbientCoefficient;
    l.channels[1][0] = irradiance.g * kIdentityAmbientCoefficient;
    l.channels[2][0] = irradiance.b * kIdentityAmbientCoefficient;
    return l;
}

LinearRgb sh_irradiance(const Vec3& n, const ShLighting& light) {
    const auto y = sh_basis(n);
    double e[3];
    for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (int i = 0; i < 9; ++i) acc += kBandWeight[kBandOf[i]] * light.channels[c][i] * y[i];
        e[c] = std::max(0.0, acc);
    }
    return {e[0], e[1], e[2]};
}

ShLighting project_directional_to_sh(const Vec3& direction, const LinearRgb& intensity) {
    const auto y = sh_basis(normalize(direction));
    ShLighting l;
    const double scale[3] = {intensity.r, intensity.g, intensity.b};
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 9; ++i) l.channels[c][i] = scale[c] * y[i];
    }
    return l;
}

std::string_view to_string(LightingKind k) {
    switch (k) {
        case LightingKind::CfdSh: return "cfd-sh";
        case LightingKind::Frontal: return "frontal";
        case LightingKind::Paramount: return "paramount";
    }
    return "?";
}

std::optional<LightingKind> parse_lighting_kind(std::string_view s) {
    for (auto k : kAllLightingKinds) {
        if (to_string(k) == s) return k;
    }
    if (s == "cfd" || s == "sh") return LightingKind::CfdSh;
    return std::nullopt;
}

ShLighting lighting_preset(LightingKind kind) {
    constexpr double kKey = 0.8;
    switch (kind) {
        case LightingKind::Frontal:
            return project_directional_to_sh({0, 0, 1}, {1, 1, 1});
        case LightingKind::Paramount: {
            const double e = kPi / 4.0;
            return project_directional_to_sh({0, std::sin(e), std::cos(e)}, {kKey, kKey, kKey}) +
                   project_directional_to_sh({0, 0, 1}, {0.25 * kKey, 0.25 * kKey, 0.25 * kKey});
        }
        case LightingKind::CfdSh:
            break;
    }
    throw DataError("the cfd-sh lighting has no preset; it is read from the per-image SH file");
}

ShLighting LightingConfig::expand() const {
    if (kind != LightingKind::CfdSh) return lighting_preset(kind);
    if (!sh) throw DataError("cfd-sh lighting needs SH coefficients");
    return *sh;
}

RenderProxy::RenderProxy(int width, int height) : normals_(width, height), coverage_(width, height, 0) {}

void RenderProxy::set(int x, int y, const Vec3& n) {
    normals_.at(x, y) = n;
    coverage_.at(x, y) = 1;
}

RenderProxy RenderProxy::sphere(int width, int height) {
    RenderProxy proxy(width, height);
    const double cx = width / 2.0, cy = height / 2.0;
    const double r = std::min(width, height) / 2.0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = (x + 0.5 - cx) / r;
            const double v = -(y + 0.5 - cy) / r;
            const double rr = u * u + v * v;
            if (rr < 1.0) proxy.set(x, y, normalize({u, v, std::sqrt(1.0 - rr)}));
        }
    }
    return proxy;
}

RenderProxy RenderProxy::flat(int width, int height) {
    RenderProxy proxy(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) proxy.set(x, y, {0, 0, 1});
    }
    return proxy;
}

FaceBox RenderProxy::bounds() const {
    int x0 = width(), y0 = height(), x1 = -1, y1 = -1;
    for (int y = 0; y < height(); ++y) {
        for (int x = 0; x < width(); ++x) {
            if (!covered(x, y)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) throw DataError("render proxy covers no pixels");
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

Image<LinearRgb> render_linear(const Texture& texture, const ShLighting& light, const RenderProxy& proxy,
                               const RenderOptions& options) {
    if (!texture.texels().same_shape(proxy.width(), proxy.height())) {
        throw DataError("texture and render proxy dimensions differ");
    }
    const LinearRgb bg = to_linear(options.background);
    Image<LinearRgb> out(proxy.width(), proxy.height(), bg);
    const double k = options.exposure / kPi;
    for (int y = 0; y < proxy.height(); ++y) {
        for (int x = 0; x < proxy.width(); ++x) {
            if (!proxy.covered(x, y)) continue;
            const auto& t = texture.texels().at(x, y);
            const LinearRgb e = sh_irradiance(proxy.normal(x, y), light);
            out.at(x, y) = {srgb_decode(t.r) * e.r * k, srgb_decode(t.g) * e.g * k, srgb_decode(t.b) * e.b * k};
        }
    }
    return out;
}

RgbImage render_proxy(const Texture& texture, const ShLighting& light, const RenderProxy& proxy,
                      const RenderOptions& options) {
    const auto linear = render_linear(texture, light, proxy, options);
    RgbImage out(linear.width(), linear.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto s = to_srgb(linear.pixels()[i]);
        out.pixels()[i] = {s.r, s.g, s.b};
    }
    // Uncovered pixels get the declared background exactly.
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            if (!proxy.covered(x, y)) out.at(x, y) = {options.background.r, options.background.g, options.background.b};
        }
    }
    return out;
}

RgbImage render_proxy(const RecoloredTexture& texture, const LightingConfig& light, const RenderProxy& proxy,
                      const RenderOptions& options) {
    return render_proxy(texture.texture, light.expand(), proxy, options);
}

ShLighting parse_sh_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("SH json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("channels")) throw ParseError("SH json: missing 'channels'");
    if (j.contains("convention") && j["convention"].is_string()) {
        const auto conv = j["convention"].get<std::string>();
        if (conv != ShLighting::kConvention) throw UnsupportedError("SH json: unknown convention '" + conv + "'");
    }
    const auto& ch = j["channels"];
    if (!ch.is_array() || ch.size() != 3) throw ParseError("SH json: 'channels' must hold 3 arrays");
    ShLighting l;
    for (std::size_t c = 0; c < 3; ++c) {
        if (!ch[c].is_array() || ch[c].size() != 9) throw ParseError("SH json: each channel needs 9 coefficients");
        for (std::size_t i = 0; i < 9; ++i) {
            if (!ch[c][i].is_number()) throw ParseError("SH json: non-numeric coefficient");
            const double v = ch[c][i].get<double>();
            if (!std::isfinite(v)) throw ParseError("SH json: non-finite coefficient");
            l.channels[c][i] = v;
        }
    }
    return l;
}

ShLighting read_sh_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open SH file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_sh_json(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string sh_to_json(const ShLighting& light) {
    nlohmann::json j;
    j["convention"] = ShLighting::kConvention;
    j["channels"] = light.channels;
    return j.dump(2) + "\n";
}

}  // namespace skintone
