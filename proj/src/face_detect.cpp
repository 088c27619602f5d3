#include "skintone/face_detect.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "skintone/error.hpp"

namespace skintone {

namespace {

struct Group {
    FaceBox box;
    int hits = 0;
};

bool box_order(const FaceBox& a, const FaceBox& b) {
    if (a.area() != b.area()) return a.area() > b.area();
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

long long overlap_area(const FaceBox& a, const FaceBox& b) {
    const long long ix = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const long long iy = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    return ix * iy;
}

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

std::vector<FaceBox> scan_level(const GrayImage& gray, const Cascade& cascade, const DetectParams& params,
                                double factor) {
    const int sw = static_cast<int>(std::lround(gray.width() / factor));
    const int sh = static_cast<int>(std::lround(gray.height() / factor));
    std::vector<FaceBox> hits;
    if (sw < cascade.window_width || sh < cascade.window_height) return hits;
    const GrayImage scaled = (sw == gray.width() && sh == gray.height()) ? gray : resize_bilinear(gray, sw, sh);
    const IntegralImage ii(scaled);
    const int win_w = static_cast<int>(std::lround(cascade.window_width * factor));
    const int win_h = static_cast<int>(std::lround(cascade.window_height * factor));
    for (int y = 0; y + cascade.window_height <= sh; y += params.step) {
        for (int x = 0; x + cascade.window_width <= sw; x += params.step) {
            if (evaluate_window(cascade, ii, x, y, params.min_variance) == cascade.stages.size()) {
                FaceBox b{static_cast<int>(std::lround(x * factor)), static_cast<int>(std::lround(y * factor)), win_w,
                          win_h};
                b.w = std::min(b.w, gray.width() - b.x);
                b.h = std::min(b.h, gray.height() - b.y);
                hits.push_back(b);
            }
        }
    }
    return hits;
}

}  // namespace

double iou(const FaceBox& a, const FaceBox& b) {
    const double inter = static_cast<double>(overlap_area(a, b));
    const double uni = static_cast<double>(a.area() + b.area()) - inter;
    return uni > 0 ? inter / uni : 0.0;
}

std::optional<double> window_norm_factor(const Cascade& cascade, const IntegralImage& ii, int x, int y,
                                         double min_variance) {
    const int w = cascade.window_width - 2;
    const int h = cascade.window_height - 2;
    const double area = static_cast<double>(w) * h;
    const double s = static_cast<double>(ii.rect_sum(x + 1, y + 1, w, h));
    const double q = static_cast<double>(ii.rect_sq_sum(x + 1, y + 1, w, h));
    const double nf = area * q - s * s;
    // nf / area^2 is the window variance in 8-bit units.
    if (nf <= 0 || nf / (area * area) < min_variance * 255.0 * 255.0) return std::nullopt;
    return 1.0 / std::sqrt(nf);
}

double feature_value(const HaarFeature& feature, const IntegralImage& ii, int x, int y) {
    double v = 0;
    for (const auto& r : feature.rects) {
        v += r.weight * static_cast<double>(ii.rect_sum(x + r.x, y + r.y, r.w, r.h));
    }
    return v;
}

std::size_t evaluate_window(const Cascade& cascade, const IntegralImage& ii, int x, int y, double min_variance) {
    const auto norm = window_norm_factor(cascade, ii, x, y, min_variance);
    if (!norm) return 0;
    for (std::size_t s = 0; s < cascade.stages.size(); ++s) {
        const auto& stage = cascade.stages[s];
        double sum = 0;
        for (const auto& wc : stage.classifiers) {
            int idx = 0;
            do {
                const auto& node = wc.nodes[static_cast<std::size_t>(idx)];
                const double v = feature_value(cascade.features[static_cast<std::size_t>(node.feature)], ii, x, y) * *norm;
                idx = v < node.threshold ? node.left : node.right;
            } while (idx > 0);
            sum += wc.leaves[static_cast<std::size_t>(-idx)];
        }
        if (sum < stage.threshold) return s;
    }
    return cascade.stages.size();
}

GrayImage resize_bilinear(const GrayImage& src, int width, int height) {
    if (width <= 0 || height <= 0) throw DataError("resize target must be positive");
    GrayImage dst(width, height);
    const double sx = static_cast<double>(src.width()) / width;
    const double sy = static_cast<double>(src.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.height() - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, src.height() - 1);
        const double ty = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.width() - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, src.width() - 1);
            const double tx = fx - x0;
            const double top = src.at(x0, y0) * (1 - tx) + src.at(x1, y0) * tx;
            const double bottom = src.at(x0, y1) * (1 - tx) + src.at(x1, y1) * tx;
            dst.at(x, y) = static_cast<std::uint8_t>(std::lround(top * (1 - ty) + bottom * ty));
        }
    }
    return dst;
}

std::vector<FaceBox> detect_raw(const GrayImage& gray, const Cascade& cascade, const DetectParams& params) {
    if (!(params.scale_factor > 1.0)) throw DataError("scale factor must be > 1");
    if (params.step < 1) throw DataError("scan step must be >= 1");
    std::vector<double> factors;
    for (double f = 1.0;; f *= params.scale_factor) {
        const int win = static_cast<int>(std::lround(cascade.window_width * f));
        const int winh = static_cast<int>(std::lround(cascade.window_height * f));
        if (win > gray.width() || winh > gray.height()) break;
        if (params.max_size > 0 && std::max(win, winh) > params.max_size) break;
        if (std::min(win, winh) >= params.min_size) factors.push_back(f);
    }

    std::vector<std::vector<FaceBox>> per_level(factors.size());
    const int threads = std::max(1, params.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < factors.size(); ++i) per_level[i] = scan_level(gray, cascade, params, factors[i]);
    } else {
        // Levels are handed out round-robin; results land in their own slot.
        std::vector<std::future<void>> jobs;
        for (int t = 0; t < threads; ++t) {
            jobs.push_back(std::async(std::launch::async, [&, t] {
                for (std::size_t i = static_cast<std::size_t>(t); i < factors.size(); i += static_cast<std::size_t>(threads)) {
                    per_level[i] = scan_level(gray, cascade, params, factors[i]);
                }
            }));
        }
        for (auto& j : jobs) j.get();
    }
    std::vector<FaceBox> hits;
    for (auto& level : per_level) hits.insert(hits.end(), level.begin(), level.end());
    return hits;
}

std::vector<FaceBox> group_boxes(std::span<const FaceBox> hits, int min_neighbors, double iou_threshold) {
    const int n = static_cast<int>(hits.size());
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (iou(hits[static_cast<std::size_t>(i)], hits[static_cast<std::size_t>(j)]) >= iou_threshold) {
                parent[static_cast<std::size_t>(find_root(parent, i))] = find_root(parent, j);
            }
        }
    }
    std::vector<long long> sx(static_cast<std::size_t>(n)), sy(sx.size()), sw(sx.size()), sh(sx.size());
    std::vector<int> count(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(find_root(parent, i));
        const auto& b = hits[static_cast<std::size_t>(i)];
        sx[r] += b.x;
        sy[r] += b.y;
        sw[r] += b.w;
        sh[r] += b.h;
        ++count[r];
    }
    std::vector<Group> groups;
    for (std::size_t r = 0; r < count.size(); ++r) {
        if (count[r] <= min_neighbors || count[r] == 0) continue;
        const double c = count[r];
        groups.push_back({{static_cast<int>(std::lround(sx[r] / c)), static_cast<int>(std::lround(sy[r] / c)),
                           static_cast<int>(std::lround(sw[r] / c)), static_cast<int>(std::lround(sh[r] / c))},
                          count[r]});
    }
    std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return box_order(a.box, b.box); });

    std::vector<FaceBox> out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        bool nested = false;
        for (std::size_t j = 0; j < groups.size() && !nested; ++j) {
            if (i == j || groups[j].box.area() <= groups[i].box.area()) continue;
            const double inside = static_cast<double>(overlap_area(groups[i].box, groups[j].box)) / groups[i].box.area();
            nested = inside >= 0.8 && groups[j].hits >= groups[i].hits;
        }
        if (!nested) out.push_back(groups[i].box);
    }
    return out;
}

std::vector<FaceBox> detect_faces(const GrayImage& gray, const Cascade& cascade, const DetectParams& params) {
    const auto hits = detect_raw(gray, cascade, params);
    return group_boxes(hits, params.min_neighbors, params.group_iou);
}

std::vector<FaceBox> detect_faces(const RgbImage& image, const Cascade& cascade, const DetectParams& params) {
    return detect_faces(to_gray(image), cascade, params);
}

std::optional<FaceBox> select_primary_face(std::span<const FaceBox> boxes) {
    if (boxes.empty()) return std::nullopt;
    return *std::min_element(boxes.begin(), boxes.end(), [](const FaceBox& a, const FaceBox& b) {
        if (a.area() != b.area()) return a.area() > b.area();
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
}

}  // namespace skintone
