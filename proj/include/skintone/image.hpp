#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skintone/error.hpp"

namespace skintone {

// Row-major W x H grid of pixels.
template <typename Pixel>
class Image {
public:
    Image() = default;
    Image(int width, int height, Pixel fill = Pixel{})
        : width_(width), height_(height) {
        if (width < 0 || height < 0) throw DataError("negative image dimensions");
        pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }
    std::size_t size() const { return pixels_.size(); }

    Pixel& at(int x, int y) { return pixels_[index(x, y)]; }
    const Pixel& at(int x, int y) const { return pixels_[index(x, y)]; }

    std::vector<Pixel>& pixels() { return pixels_; }
    const std::vector<Pixel>& pixels() const { return pixels_; }

    bool same_shape(int w, int h) const { return w == width_ && h == height_; }
    template <typename Other>
    bool same_shape(const Image<Other>& o) const { return same_shape(o.width(), o.height()); }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<Pixel> pixels_;
};

struct Rgb {
    double r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Display-referred sRGB in [0, 1] per channel.
using RgbImage = Image<Rgb>;
using GrayImage = Image<std::uint8_t>;

// Gamma-encoded luma with (0.299, 0.587, 0.114) weights, rounded to 8 bits.
GrayImage to_gray(const RgbImage& image);

// PNG (8-bit RGB/RGBA/gray) and binary PPM (P6, maxval 255). Values are scaled by 1/255.
RgbImage read_image(const std::string& path);

// Writes PNG or PPM depending on the extension; values are clamped and rounded to 8 bits.
void write_image(const std::string& path, const RgbImage& image);

}  // namespace skintone
