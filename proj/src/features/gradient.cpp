#include "features/gradient.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace selflearn {

namespace {

std::vector<float> to_gray(const ImageU8& image) {
    std::vector<float> gray(std::size_t(image.width) * image.height);
    if (image.channels == 1) {
        for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = float(image.data[i]);
    } else {
        for (std::size_t i = 0; i < gray.size(); ++i) {
            const std::uint8_t* px = image.data.data() + i * 3;
            gray[i] = 0.299f * px[0] + 0.587f * px[1] + 0.114f * px[2];
        }
    }
    return gray;
}

} // namespace

GradientGrid compute_gradient_grid(const ImageU8& image, int cell_size, int orientations) {
    if (image.empty()) throw SlfError("gradient grid of empty image");
    if (cell_size < 1) throw SlfError("cell size must be >= 1");

    GradientGrid grid;
    grid.cell_size = cell_size;
    grid.orientations = orientations;
    grid.cells_x = image.width / cell_size;
    grid.cells_y = image.height / cell_size;
    if (grid.cells_x < 1 || grid.cells_y < 1)
        throw SlfError("image smaller than one cell");
    grid.data.assign(std::size_t(grid.cells_x) * grid.cells_y * orientations, 0.0f);

    const std::vector<float> gray = to_gray(image);
    const int w = image.width, h = image.height;
    const float bin_width = 180.0f / float(orientations);

    const int max_y = grid.cells_y * cell_size;
    const int max_x = grid.cells_x * cell_size;
    for (int y = 0; y < max_y; ++y) {
        const int y0 = std::max(y - 1, 0), y1 = std::min(y + 1, h - 1);
        const int cy = y / cell_size;
        for (int x = 0; x < max_x; ++x) {
            const int x0 = std::max(x - 1, 0), x1 = std::min(x + 1, w - 1);
            const float dx = gray[std::size_t(y) * w + x1] - gray[std::size_t(y) * w + x0];
            const float dy = gray[std::size_t(y1) * w + x] - gray[std::size_t(y0) * w + x];
            const float mag = std::sqrt(dx * dx + dy * dy);
            if (mag <= 0.0f) continue;
            float angle = std::atan2(dy, dx) * 57.29577951308232f; // degrees
            if (angle < 0.0f) angle += 180.0f;
            if (angle >= 180.0f) angle -= 180.0f;
            const float pos = angle / bin_width - 0.5f;
            int b0 = int(std::floor(pos));
            const float frac = pos - float(b0);
            int b1 = b0 + 1;
            if (b0 < 0) b0 += orientations;
            if (b1 >= orientations) b1 -= orientations;
            float* cell = grid.cell(x / cell_size, cy);
            cell[b0] += mag * (1.0f - frac);
            cell[b1] += mag * frac;
        }
    }
    return grid;
}

GradientFeature gradient_feature(const ImageU8& image, const BBox& window, int cell_size,
                                 int orientations) {
    if (!image.contains(window)) throw SlfError("gradient_feature window outside image bounds");
    if (window.w < cell_size || window.h < cell_size)
        throw SlfError("gradient_feature window smaller than one cell");
    if (window.w % cell_size || window.h % cell_size)
        throw SlfError("gradient_feature window must be a multiple of the cell size");

    const GradientGrid grid = compute_gradient_grid(crop(image, window), cell_size, orientations);
    GradientFeature f;
    f.cells_x = grid.cells_x;
    f.cells_y = grid.cells_y;
    f.cell_size = cell_size;
    f.orientations = orientations;
    f.data = grid.data;
    return f;
}

BlockGrid compute_block_grid(const GradientGrid& grid, float clip) {
    BlockGrid blocks;
    blocks.blocks_x = std::max(grid.cells_x - 1, 0);
    blocks.blocks_y = std::max(grid.cells_y - 1, 0);
    blocks.block_dim = 4 * grid.orientations;
    blocks.data.assign(std::size_t(blocks.blocks_x) * blocks.blocks_y * blocks.block_dim, 0.0f);

    const int ori = grid.orientations;
    for (int by = 0; by < blocks.blocks_y; ++by) {
        for (int bx = 0; bx < blocks.blocks_x; ++bx) {
            float* out = blocks.data.data() +
                         (std::size_t(by) * blocks.blocks_x + bx) * blocks.block_dim;
            const float* c00 = grid.cell(bx, by);
            const float* c10 = grid.cell(bx + 1, by);
            const float* c01 = grid.cell(bx, by + 1);
            const float* c11 = grid.cell(bx + 1, by + 1);
            std::copy(c00, c00 + ori, out);
            std::copy(c10, c10 + ori, out + ori);
            std::copy(c01, c01 + ori, out + 2 * ori);
            std::copy(c11, c11 + ori, out + 3 * ori);

            double norm2 = 0.0;
            for (int i = 0; i < blocks.block_dim; ++i) norm2 += double(out[i]) * out[i];
            const float inv = float(1.0 / std::sqrt(norm2 + 1e-6));
            double renorm2 = 0.0;
            for (int i = 0; i < blocks.block_dim; ++i) {
                out[i] = std::min(out[i] * inv, clip);
                renorm2 += double(out[i]) * out[i];
            }
            const float inv2 = float(1.0 / std::sqrt(renorm2 + 1e-6));
            for (int i = 0; i < blocks.block_dim; ++i) out[i] *= inv2;
        }
    }
    return blocks;
}

std::vector<float> window_descriptor(const BlockGrid& blocks, int cell_x, int cell_y,
                                     int cells_w, int cells_h) {
    const int bw = cells_w - 1, bh = cells_h - 1;
    if (bw < 1 || bh < 1) throw SlfError("window descriptor needs at least 2x2 cells");
    if (cell_x < 0 || cell_y < 0 || cell_x + bw > blocks.blocks_x || cell_y + bh > blocks.blocks_y)
        throw SlfError("window descriptor outside block grid");

    std::vector<float> out(std::size_t(bw) * bh * blocks.block_dim);
    float* dst = out.data();
    for (int by = 0; by < bh; ++by) {
        const float* src = blocks.block(cell_x, cell_y + by);
        std::copy(src, src + std::size_t(bw) * blocks.block_dim, dst);
        dst += std::size_t(bw) * blocks.block_dim;
    }
    return out;
}

} // namespace selflearn
