#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skintone/colorimetry.hpp"
#include "skintone/face_detect.hpp"
#include "skintone/image.hpp"
#include "skintone/kmeans.hpp"

namespace skintone {

enum class Method : std::uint8_t { Cheek = 0, Mmm, TCheek, TMmm };
inline constexpr Method kAllMethods[] = {Method::Cheek, Method::Mmm, Method::TCheek, Method::TMmm};

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);
inline bool uses_albedo(Method m) { return m == Method::TCheek || m == Method::TMmm; }
inline bool uses_clustering(Method m) { return m == Method::Mmm || m == Method::TMmm; }

enum class Side : std::uint8_t { Left, Right };

struct RegionSpec {
    int x = 0, y = 0, w = 0, h = 0;
    Side side = Side::Left;
    friend bool operator==(const RegionSpec&, const RegionSpec&) = default;
};

// Edges: the left square's left edge and the right square's right edge sit
// x_offset from the face's left/right edges; the top edge sits y_offset below
// the face top. Centers: the same offsets locate the square centres instead.
enum class RoiAnchor : std::uint8_t { Edges, Centers };

struct RoiParams {
    double width_fraction = 0.15;
    double x_offset_fraction = 0.18;
    double y_offset_fraction = 0.50;
    RoiAnchor anchor = RoiAnchor::Edges;
    int min_area = 4;  // px^2 per region
};

// Left and right cheek squares of a face box, shifted inside the image when
// they overhang. Throws DataError("face too small") when a square falls below
// min_area.
std::pair<RegionSpec, RegionSpec> cheek_rois(const FaceBox& face, int image_width, int image_height,
                                             const RoiParams& params = {});

// W x H boolean grid.
class SkinMask {
public:
    SkinMask() = default;
    SkinMask(int width, int height) : bits_(width, height, 0) {}

    int width() const { return bits_.width(); }
    int height() const { return bits_.height(); }
    bool at(int x, int y) const { return bits_.at(x, y) != 0; }
    void set(int x, int y, bool v);
    std::size_t count() const { return count_; }

    friend bool operator==(const SkinMask&, const SkinMask&) = default;

private:
    Image<std::uint8_t> bits_;
    std::size_t count_ = 0;
};

struct Point2 {
    double x = 0, y = 0;
    friend bool operator==(const Point2&, const Point2&) = default;
};
using Landmarks = std::vector<Point2>;

// One "x y" pair per line; blank lines and '#' comments are ignored.
Landmarks parse_landmarks(std::string_view text);
Landmarks read_landmarks(const std::string& path);

// Pixels whose centre (x + 0.5, y + 0.5) lies inside or on the convex hull.
SkinMask mask_from_landmarks(std::span<const Point2> landmarks, int width, int height);

// Lab box used when no landmark file is available.
struct ChromaGate {
    double l_min = 20, l_max = 95;
    double a_min = 2, a_max = 45;
    double b_min = 2, b_max = 50;
};

SkinMask mask_chroma_fallback(const RgbImage& image, const ChromaGate& gate = {});

struct SkinEstimate {
    Method method = Method::Cheek;
    SrgbColor mean;
    LabColor lab;  // srgb_to_lab(mean)
    double ita = 0;
    ItaClass ita_class = ItaClass::I;
    std::size_t samples = 0;
    bool fallback_mask = false;  // MMM ran on the chroma gate instead of landmarks
};

SkinEstimate make_estimate(Method method, const SrgbColor& mean, std::size_t samples,
                           const ItaThresholds& thresholds = {});

// Mean sRGB over the union of the regions, each pixel counted once.
SkinEstimate mean_color(const RgbImage& image, std::span<const RegionSpec> regions, Method tag = Method::Cheek,
                        int min_area = 4, const ItaThresholds& thresholds = {});

struct MmmParams {
    int k = 5;
    int top_m = 3;
    std::uint64_t seed = 0;
    int max_iterations = 100;
    double tolerance = 1e-6;
};

// Masked k-means in Lab; the member-weighted mean of the top_m centroids by
// lightness (ties: larger cluster first) is the estimate. Distinct colours are
// clustered with multiplicity in sorted order, so pixel order does not matter.
SkinEstimate mmm_estimate(const RgbImage& image, const SkinMask& mask, const MmmParams& params = {},
                          Method tag = Method::Mmm, const ItaThresholds& thresholds = {});

struct ExtractionInput {
    RgbImage photo;
    std::optional<RgbImage> albedo;
    std::optional<Landmarks> landmarks;
    std::optional<FaceBox> face;
    std::optional<SkinMask> mask;  // overrides landmarks / chroma gate for MMM
};

struct ExtractParams {
    RoiParams roi;
    MmmParams mmm;
    ChromaGate gate;
    ItaThresholds ita;
    const Cascade* cascade = nullptr;  // used only when the input has no face box
    DetectParams detect;
};

// Cheek and MMM sample the photo; the T-variants use the photo's geometry
// (face box, landmarks or mask) but sample the albedo map.
SkinEstimate extract(const ExtractionInput& input, Method method, const ExtractParams& params = {});

// Face box used by the cheek methods: the given box, else the primary detection.
FaceBox resolve_face(const ExtractionInput& input, const ExtractParams& params);

}  // namespace skintone
