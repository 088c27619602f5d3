#include "skintone/extraction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "skintone/error.hpp"

namespace skintone {

namespace {

int round_half_away(double v) {
    return static_cast<int>(std::lround(v));
}

RegionSpec fit_inside(RegionSpec r, int width, int height) {
    r.w = std::min({r.w, width, height});
    r.h = r.w;
    r.x = std::clamp(r.x, 0, width - r.w);
    r.y = std::clamp(r.y, 0, height - r.h);
    return r;
}

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain; counter-clockwise, no repeated end point.
std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

const RgbImage& sampling_source(const ExtractionInput& input, Method method) {
    if (!uses_albedo(method)) return input.photo;
    if (!input.albedo) throw DataError(std::string(to_string(method)) + " needs an albedo map");
    if (!input.albedo->same_shape(input.photo)) throw DataError("albedo and photo dimensions differ");
    return *input.albedo;
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Cheek: return "Cheek";
        case Method::Mmm: return "MMM";
        case Method::TCheek: return "T-Cheek";
        case Method::TMmm: return "T-MMM";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view s) {
    for (auto m : kAllMethods) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

std::pair<RegionSpec, RegionSpec> cheek_rois(const FaceBox& face, int image_width, int image_height,
                                             const RoiParams& params) {
    const int side = round_half_away(params.width_fraction * face.w);
    const int dx = round_half_away(params.x_offset_fraction * face.w);
    const int dy = round_half_away(params.y_offset_fraction * face.h);
    if (side <= 0 || side * side < params.min_area) {
        throw DataError("face too small: cheek square of " + std::to_string(side) + " px");
    }
    RegionSpec left{face.x + dx, face.y + dy, side, side, Side::Left};
    RegionSpec right{face.x + face.w - dx - side, face.y + dy, side, side, Side::Right};
    if (params.anchor == RoiAnchor::Centers) {
        const int half = side / 2;
        left.x = face.x + dx - half;
        right.x = face.x + face.w - dx - (side - half);  // mirror of the left square
        left.y = right.y = face.y + dy - half;
    }
    left = fit_inside(left, image_width, image_height);
    right = fit_inside(right, image_width, image_height);
    if (left.w * left.h < params.min_area) throw DataError("face too small: cheek square clipped by the image");
    return {left, right};
}

void SkinMask::set(int x, int y, bool v) {
    auto& cell = bits_.at(x, y);
    if (static_cast<bool>(cell) != v) {
        count_ += v ? 1 : static_cast<std::size_t>(-1);
        cell = v ? 1 : 0;
    }
}

Landmarks parse_landmarks(std::string_view text) {
    Landmarks out;
    std::istringstream in{std::string(text)};
    in.imbue(std::locale::classic());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        row.imbue(std::locale::classic());
        Point2 p;
        std::string extra;
        if (!(row >> p.x >> p.y) || (row >> extra)) {
            throw ParseError("landmarks line " + std::to_string(lineno) + ": expected 'x y'");
        }
        out.push_back(p);
    }
    return out;
}

Landmarks read_landmarks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open landmarks '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_landmarks(buf.str());
}

SkinMask mask_from_landmarks(std::span<const Point2> landmarks, int width, int height) {
    if (landmarks.size() < 3) throw DataError("landmark hull needs at least 3 points");
    const auto hull = convex_hull({landmarks.begin(), landmarks.end()});
    double area2 = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        area2 += a.x * b.y - b.x * a.y;
    }
    if (hull.size() < 3 || std::abs(area2) < 1e-12) throw DataError("landmarks are collinear");

    double min_x = hull[0].x, max_x = hull[0].x, min_y = hull[0].y, max_y = hull[0].y;
    for (const auto& p : hull) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    SkinMask mask(width, height);
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(max_x)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(max_y)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const Point2 c{x + 0.5, y + 0.5};
            bool inside = true;
            for (std::size_t i = 0; i < hull.size() && inside; ++i) {
                inside = cross(hull[i], hull[(i + 1) % hull.size()], c) >= -1e-9;
            }
            if (inside) mask.set(x, y, true);
        }
    }
    return mask;
}

SkinMask mask_chroma_fallback(const RgbImage& image, const ChromaGate& gate) {
    SkinMask mask(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const auto& p = image.at(x, y);
            const LabColor lab = srgb_to_lab({p.r, p.g, p.b});
            const bool skin = lab.L >= gate.l_min && lab.L <= gate.l_max && lab.a >= gate.a_min && lab.a <= gate.a_max &&
                              lab.b >= gate.b_min && lab.b <= gate.b_max;
            if (skin) mask.set(x, y, true);
        }
    }
    if (mask.count() == 0) throw DataError("no skin pixels passed the chroma gate");
    return mask;
}

SkinEstimate make_estimate(Method method, const SrgbColor& mean, std::size_t samples,
                           const ItaThresholds& thresholds) {
    SkinEstimate e;
    e.method = method;
    e.mean = mean;
    e.lab = srgb_to_lab(mean);
    e.ita = ita_degrees(e.lab);
    e.ita_class = ita_class(e.ita, thresholds);
    e.samples = samples;
    return e;
}

SkinEstimate mean_color(const RgbImage& image, std::span<const RegionSpec> regions, Method tag, int min_area,
                        const ItaThresholds& thresholds) {
    if (regions.empty()) throw DataError("mean_color needs at least one region");
    SkinMask taken(image.width(), image.height());
    for (const auto& r : regions) {
        if (r.w * r.h < min_area) throw DataError("region smaller than " + std::to_string(min_area) + " px^2");
        for (int y = std::max(0, r.y); y < std::min(image.height(), r.y + r.h); ++y) {
            for (int x = std::max(0, r.x); x < std::min(image.width(), r.x + r.w); ++x) taken.set(x, y, true);
        }
    }
    if (taken.count() == 0) throw DataError("regions do not cover any pixel");
    double sr = 0, sg = 0, sb = 0;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            if (!taken.at(x, y)) continue;
            const auto& p = image.at(x, y);
            sr += p.r;
            sg += p.g;
            sb += p.b;
        }
    }
    const double n = static_cast<double>(taken.count());
    return make_estimate(tag, {sr / n, sg / n, sb / n}, taken.count(), thresholds);
}

SkinEstimate mmm_estimate(const RgbImage& image, const SkinMask& mask, const MmmParams& params, Method tag,
                          const ItaThresholds& thresholds) {
    if (!mask.width() || !image.same_shape(mask.width(), mask.height())) throw DataError("mask and image dimensions differ");
    if (params.top_m < 1 || params.top_m > params.k) throw DataError("top_m must lie in [1, k]");
    if (mask.count() < static_cast<std::size_t>(params.k)) {
        throw DataError("MMM needs at least k=" + std::to_string(params.k) + " masked pixels, got " +
                        std::to_string(mask.count()));
    }

    std::vector<std::array<double, 3>> colours;
    colours.reserve(mask.count());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            if (mask.at(x, y)) {
                const auto& p = image.at(x, y);
                colours.push_back({p.r, p.g, p.b});
            }
        }
    }
    std::sort(colours.begin(), colours.end());
    std::vector<WeightedLab> points;
    for (std::size_t i = 0; i < colours.size();) {
        std::size_t j = i;
        while (j < colours.size() && colours[j] == colours[i]) ++j;
        points.push_back({srgb_to_lab({colours[i][0], colours[i][1], colours[i][2]}), static_cast<double>(j - i)});
        i = j;
    }

    auto clusters = kmeans_lab(points, {params.k, params.seed, params.max_iterations, params.tolerance}).clusters;
    // Fewer distinct colours than k leaves clusters empty; they carry no colour.
    std::erase_if(clusters, [](const ClusterSummary& c) { return c.count == 0; });
    std::stable_sort(clusters.begin(), clusters.end(), [](const ClusterSummary& a, const ClusterSummary& b) {
        if (a.centroid.L != b.centroid.L) return a.centroid.L > b.centroid.L;
        return a.count > b.count;
    });
    double wsum = 0;
    LabColor acc{};
    const auto top = std::min(clusters.size(), static_cast<std::size_t>(params.top_m));
    for (std::size_t i = 0; i < top; ++i) {
        const auto& c = clusters[i];
        const double w = static_cast<double>(c.count);
        wsum += w;
        acc.L += w * c.centroid.L;
        acc.a += w * c.centroid.a;
        acc.b += w * c.centroid.b;
    }
    if (wsum <= 0) throw DataError("MMM: selected clusters are empty");
    const LabColor mean{acc.L / wsum, acc.a / wsum, acc.b / wsum};
    return make_estimate(tag, lab_to_srgb(mean).color, mask.count(), thresholds);
}

FaceBox resolve_face(const ExtractionInput& input, const ExtractParams& params) {
    if (input.face) return *input.face;
    if (!params.cascade) throw DataError("no face box supplied and no cascade configured");
    const auto boxes = detect_faces(input.photo, *params.cascade, params.detect);
    const auto face = select_primary_face(boxes);
    if (!face) throw DataError("no face found");
    return *face;
}

SkinEstimate extract(const ExtractionInput& input, Method method, const ExtractParams& params) {
    const RgbImage& source = sampling_source(input, method);
    if (!uses_clustering(method)) {
        const auto [left, right] = cheek_rois(resolve_face(input, params), input.photo.width(), input.photo.height(), params.roi);
        const std::array regions{left, right};
        return mean_color(source, regions, method, params.roi.min_area, params.ita);
    }
    if (input.mask) return mmm_estimate(source, *input.mask, params.mmm, method, params.ita);
    if (input.landmarks) {
        const auto mask = mask_from_landmarks(*input.landmarks, input.photo.width(), input.photo.height());
        return mmm_estimate(source, mask, params.mmm, method, params.ita);
    }
    // The gate is evaluated on the photo so both variants share one mask.
    auto estimate = mmm_estimate(source, mask_chroma_fallback(input.photo, params.gate), params.mmm, method, params.ita);
    estimate.fallback_mask = true;
    return estimate;
}

}  // namespace skintone
