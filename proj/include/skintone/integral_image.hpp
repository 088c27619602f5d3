#pragma once

#include <cstdint>
#include <vector>

#include "skintone/image.hpp"

namespace skintone {

// Summed-area tables of an 8-bit image and of its squares. Entry (x, y) holds the
// sum of every pixel strictly above and to the left, so the tables are
// (W + 1) x (H + 1) with a zero first row and column.
class IntegralImage {
public:
    explicit IntegralImage(const GrayImage& gray);

    int width() const { return width_; }
    int height() const { return height_; }

    std::uint64_t sum_at(int x, int y) const { return sum_[index(x, y)]; }
    std::uint64_t sq_sum_at(int x, int y) const { return sq_sum_[index(x, y)]; }

    // Sum over the w x h rectangle with top-left (x, y).
    std::uint64_t rect_sum(int x, int y, int w, int h) const {
        return sum_at(x + w, y + h) + sum_at(x, y) - sum_at(x + w, y) - sum_at(x, y + h);
    }
    std::uint64_t rect_sq_sum(int x, int y, int w, int h) const {
        return sq_sum_at(x + w, y + h) + sq_sum_at(x, y) - sq_sum_at(x + w, y) - sq_sum_at(x, y + h);
    }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_ + 1) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint64_t> sum_;
    std::vector<std::uint64_t> sq_sum_;
};

}  // namespace skintone
