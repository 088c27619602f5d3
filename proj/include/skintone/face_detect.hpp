#pragma once

#include <optional>
#include <span>
#include <vector>

#include "skintone/cascade.hpp"
#include "skintone/image.hpp"
#include "skintone/integral_image.hpp"

namespace skintone {

struct FaceBox {
    int x = 0, y = 0, w = 0, h = 0;
    long long area() const { return static_cast<long long>(w) * h; }
    friend bool operator==(const FaceBox&, const FaceBox&) = default;
};

double iou(const FaceBox& a, const FaceBox& b);

struct DetectParams {
    double scale_factor = 1.1;
    int min_size = 24;          // smallest window side in source pixels
    int max_size = 0;           // 0 = unbounded
    int step = 1;               // scan stride at every pyramid level
    int min_neighbors = 3;      // a group needs more than this many raw hits
    double group_iou = 0.3;
    // Windows whose luma variance is below this fraction of 255^2 are rejected.
    double min_variance = 1e-6;
    int threads = 1;
};

// Variance normalisation for the window at (x, y): 1 / sqrt(A * sum(p^2) - sum(p)^2)
// over the window shrunk by one pixel on every side. Empty when the window is
// too flat to normalise.
std::optional<double> window_norm_factor(const Cascade& cascade, const IntegralImage& ii, int x, int y,
                                         double min_variance = 1e-6);

// Sum of weighted feature rectangles for a window at (x, y).
double feature_value(const HaarFeature& feature, const IntegralImage& ii, int x, int y);

// Runs every stage on the window at (x, y) of an unscaled integral image.
// Returns the number of stages passed; the window is accepted when this equals
// cascade.stages.size().
std::size_t evaluate_window(const Cascade& cascade, const IntegralImage& ii, int x, int y,
                            double min_variance = 1e-6);

GrayImage resize_bilinear(const GrayImage& src, int width, int height);

// Every accepted window of the multi-scale scan, mapped back to source pixels,
// ordered by pyramid level then row then column.
std::vector<FaceBox> detect_raw(const GrayImage& gray, const Cascade& cascade, const DetectParams& params = {});

// Merges raw hits into connected components of pairwise IoU >= iou_threshold,
// keeps components with more than min_neighbors members and drops components
// mostly contained in a larger, better supported one. Sorted by area desc, x, y.
std::vector<FaceBox> group_boxes(std::span<const FaceBox> hits, int min_neighbors, double iou_threshold);

std::vector<FaceBox> detect_faces(const GrayImage& gray, const Cascade& cascade, const DetectParams& params = {});
std::vector<FaceBox> detect_faces(const RgbImage& image, const Cascade& cascade, const DetectParams& params = {});

// Largest box; ties go to the smallest (x, y).
std::optional<FaceBox> select_primary_face(std::span<const FaceBox> boxes);

}  // namespace skintone
