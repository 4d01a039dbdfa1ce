#include "core/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <png.h>

#include "core/error.hpp"

namespace selflearn {

namespace {

struct FileCloser {
    std::FILE* f;
    ~FileCloser() { if (f) std::fclose(f); }
};

} // namespace

ImageU8 load_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw SlfError("cannot open PNG for reading: " + path);
    FileCloser closer{fp};

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw SlfError("libpng read struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw SlfError("libpng info struct allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw SlfError("failed to decode PNG: " + path);
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw SlfError("unsupported PNG channel count in " + path);
    }

    ImageU8 img(int(w), int(h), channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = img.row(int(y));
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png(const ImageU8& img, const std::string& path) {
    if (img.empty() || (img.channels != 1 && img.channels != 3))
        throw SlfError("cannot save empty or non-gray/RGB image: " + path);

    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw SlfError("cannot open PNG for writing: " + path);
    FileCloser closer{fp};

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw SlfError("libpng write struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw SlfError("libpng info struct allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw SlfError("failed to encode PNG: " + path);
    }

    png_init_io(png, fp);
    const int color = img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
    png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(img.row(y)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

ImageU8 resize_bilinear(const ImageU8& src, int out_w, int out_h) {
    if (src.empty()) throw SlfError("resize of empty image");
    if (out_w < 1 || out_h < 1) throw SlfError("resize target must be >= 1x1");
    if (out_w == src.width && out_h == src.height) return src;

    ImageU8 dst(out_w, out_h, src.channels);
    const double sx = double(src.width) / out_w;
    const double sy = double(src.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        int y0 = int(std::floor(fy));
        const double wy = fy - y0;
        y0 = std::clamp(y0, 0, src.height - 1);
        const int y1 = std::min(y0 + 1, src.height - 1);
        for (int x = 0; x < out_w; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            int x0 = int(std::floor(fx));
            const double wx = fx - x0;
            x0 = std::clamp(x0, 0, src.width - 1);
            const int x1 = std::min(x0 + 1, src.width - 1);
            for (int c = 0; c < src.channels; ++c) {
                const double v00 = src.at(x0, y0, c);
                const double v10 = src.at(x1, y0, c);
                const double v01 = src.at(x0, y1, c);
                const double v11 = src.at(x1, y1, c);
                const double top = v00 + (v10 - v00) * wx;
                const double bot = v01 + (v11 - v01) * wx;
                const double v = top + (bot - top) * wy;
                dst.at(x, y, c) = std::uint8_t(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return dst;
}

ImageU8 crop(const ImageU8& src, const BBox& box) {
    if (!src.contains(box)) throw SlfError("crop window outside image bounds");
    ImageU8 dst(box.w, box.h, src.channels);
    for (int y = 0; y < box.h; ++y) {
        const std::uint8_t* s = src.row(box.y + y) + std::size_t(box.x) * src.channels;
        std::copy(s, s + std::size_t(box.w) * src.channels, dst.row(y));
    }
    return dst;
}

void rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8,
                double& h, double& s, double& v) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    v = mx;
    s = mx > 0.0 ? d / mx : 0.0;
    if (d <= 0.0) {
        h = 0.0;
        return;
    }
    if (mx == r)      h = 60.0 * ((g - b) / d);
    else if (mx == g) h = 60.0 * ((b - r) / d + 2.0);
    else              h = 60.0 * ((r - g) / d + 4.0);
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h = 0.0;
}

} // namespace selflearn
