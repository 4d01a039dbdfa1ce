#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace selflearn {

// Interleaved 8-bit image, 1 (gray) or 3 (RGB) channels.
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    ImageU8() = default;
    ImageU8(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          data(std::size_t(w) * h * c, fill) {}

    bool empty() const { return width == 0 || height == 0; }
    std::uint8_t* row(int y) { return data.data() + std::size_t(y) * width * channels; }
    const std::uint8_t* row(int y) const { return data.data() + std::size_t(y) * width * channels; }
    std::uint8_t& at(int x, int y, int c) { return data[(std::size_t(y) * width + x) * channels + c]; }
    std::uint8_t at(int x, int y, int c) const { return data[(std::size_t(y) * width + x) * channels + c]; }

    bool contains(const BBox& b) const {
        return b.valid() && b.x >= 0 && b.y >= 0 && b.x2() <= width && b.y2() <= height;
    }
};

ImageU8 load_png(const std::string& path);
void save_png(const ImageU8& img, const std::string& path);

// Bilinear resize. Output dimensions must be >= 1.
ImageU8 resize_bilinear(const ImageU8& src, int out_w, int out_h);

ImageU8 crop(const ImageU8& src, const BBox& box);

// RGB in [0,255] -> h in [0,360), s and v in [0,1].
void rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                double& h, double& s, double& v);

} // namespace selflearn
