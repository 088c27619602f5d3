#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "skintone/image.hpp"

namespace skintone {

namespace {

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

bool has_suffix(const std::string& s, std::string_view suffix) {
    if (s.size() < suffix.size()) return false;
    return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                      [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

RgbImage read_png(const std::string& path) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str())) {
        throw ParseError("cannot read PNG '" + path + "': " + png.message);
    }
    png.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
        std::string msg = png.message;
        png_image_free(&png);
        throw ParseError("cannot decode PNG '" + path + "': " + msg);
    }
    RgbImage image(static_cast<int>(png.width), static_cast<int>(png.height));
    auto& px = image.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = {buffer[3 * i] / 255.0, buffer[3 * i + 1] / 255.0, buffer[3 * i + 2] / 255.0};
    }
    return image;
}

void write_png(const std::string& path, const RgbImage& image) {
    std::vector<std::uint8_t> buffer(image.size() * 3);
    const auto& px = image.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        buffer[3 * i] = quantize(px[i].r);
        buffer[3 * i + 1] = quantize(px[i].g);
        buffer[3 * i + 2] = quantize(px[i].b);
    }
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
        throw Error("cannot write PNG '" + path + "': " + png.message);
    }
}

// Skips whitespace and '#' comments between PPM header tokens.
int read_ppm_token(std::istream& in, const std::string& path) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw ParseError("malformed PPM header in '" + path + "'");
    return value;
}

RgbImage read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    if (magic != "P6") throw ParseError("'" + path + "' is not a binary P6 PPM");
    const int w = read_ppm_token(in, path);
    const int h = read_ppm_token(in, path);
    const int maxval = read_ppm_token(in, path);
    if (w <= 0 || h <= 0 || maxval != 255) throw UnsupportedError("PPM '" + path + "' must be 8-bit with positive size");
    in.get();  // single whitespace before raster
    std::vector<std::uint8_t> buffer(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    if (in.gcount() != static_cast<std::streamsize>(buffer.size())) throw ParseError("truncated PPM '" + path + "'");
    RgbImage image(w, h);
    auto& px = image.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = {buffer[3 * i] / 255.0, buffer[3 * i + 1] / 255.0, buffer[3 * i + 2] / 255.0};
    }
    return image;
}

void write_ppm(const std::string& path, const RgbImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
    for (const auto& p : image.pixels()) {
        const char bytes[3] = {static_cast<char>(quantize(p.r)), static_cast<char>(quantize(p.g)),
                               static_cast<char>(quantize(p.b))};
        out.write(bytes, 3);
    }
}

}  // namespace

GrayImage to_gray(const RgbImage& image) {
    GrayImage gray(image.width(), image.height());
    const auto& src = image.pixels();
    auto& dst = gray.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double r = std::lround(std::clamp(src[i].r, 0.0, 1.0) * 255.0);
        const double g = std::lround(std::clamp(src[i].g, 0.0, 1.0) * 255.0);
        const double b = std::lround(std::clamp(src[i].b, 0.0, 1.0) * 255.0);
        dst[i] = static_cast<std::uint8_t>(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
    }
    return gray;
}

RgbImage read_image(const std::string& path) {
    if (has_suffix(path, ".png")) return read_png(path);
    if (has_suffix(path, ".ppm")) return read_ppm(path);
    throw UnsupportedError("unsupported image format: '" + path + "' (expected .png or .ppm)");
}

void write_image(const std::string& path, const RgbImage& image) {
    if (has_suffix(path, ".png")) return write_png(path, image);
    if (has_suffix(path, ".ppm")) return write_ppm(path, image);
    throw UnsupportedError("unsupported image format: '" + path + "' (expected .png or .ppm)");
}

}  // namespace skintone
