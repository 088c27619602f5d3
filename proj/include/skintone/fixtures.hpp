#pragma once

#include <cstdint>
#include <filesystem>

#include "skintone/extraction.hpp"
#include "skintone/manifest.hpp"
#include "skintone/relight.hpp"

namespace skintone {

// Synthetic faces: an elliptical skin region with ellipsoid normals on a flat
// background, centred at (0.5 W, 0.525 H) with semi-axes (0.325 W, 0.4 H).
struct FaceEllipse {
    double cx = 0, cy = 0, ax = 0, ay = 0;
};
FaceEllipse fixture_ellipse(int width, int height);
FaceBox fixture_face_box(int width, int height);
RenderProxy fixture_proxy(int width, int height);
// 24 points on the ellipse shrunk by 10 %.
Landmarks fixture_landmarks(int width, int height);

inline constexpr SrgbColor kFixtureBackground{0.20, 0.24, 0.30};

// Lab ramp with constant chroma (a = 10, b = 16) and L falling linearly from
// 78 to 28, which crosses every ITA class.
LabColor ramp_lab(int index, int count);

// Skin colour inside the ellipse plus seeded uniform per-channel noise of the
// given amplitude; background elsewhere.
RgbImage fixture_albedo(const SrgbColor& skin, int width, int height, double noise, std::uint64_t seed);

// Key light from the upper left over a soft ambient, scaled by `strength`.
ShLighting studio_environment(double strength = 1.0);

// Albedo shaded on the fixture proxy; background pixels are left untouched.
RgbImage shade_fixture(const RgbImage& albedo, const ShLighting& light, double exposure = std::numbers::pi);

struct FixtureParams {
    int count = 12;
    int size = 160;
    double noise = 0.015;
    std::uint64_t seed = 0;
    // albedo = photo and the SH file is the identity ambient environment
    bool closed_loop = false;
};

// Writes images/, landmarks, SH files and manifest.csv under `dir` (plus a
// matching config.json in closed-loop mode) and returns the manifest.
Manifest generate_fixtures(const std::filesystem::path& dir, const FixtureParams& params = {});

}  // namespace skintone
