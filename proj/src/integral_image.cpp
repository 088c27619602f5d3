#include "skintone/integral_image.hpp"

namespace skintone {

IntegralImage::IntegralImage(const GrayImage& gray) : width_(gray.width()), height_(gray.height()) {
    const std::size_t n = static_cast<std::size_t>(width_ + 1) * static_cast<std::size_t>(height_ + 1);
    sum_.assign(n, 0);
    sq_sum_.assign(n, 0);
    for (int y = 0; y < height_; ++y) {
        std::uint64_t row = 0;
        std::uint64_t row_sq = 0;
        for (int x = 0; x < width_; ++x) {
            const std::uint64_t v = gray.at(x, y);
            row += v;
            row_sq += v * v;
            sum_[index(x + 1, y + 1)] = sum_[index(x + 1, y)] + row;
            sq_sum_[index(x + 1, y + 1)] = sq_sum_[index(x + 1, y)] + row_sq;
        }
    }
}

}  // namespace skintone
