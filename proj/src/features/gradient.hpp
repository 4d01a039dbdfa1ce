#pragma once

#include <vector>

#include "core/image.hpp"

namespace selflearn {

// Unsigned gradient-orientation histograms on a fixed cell grid. Gradients
// come from central differences on the gray image; each pixel votes into its
// cell with magnitude, split linearly between the two nearest orientation
// bins over [0, 180).
struct GradientGrid {
    int cells_x = 0;
    int cells_y = 0;
    int cell_size = 8;
    int orientations = 9;
    std::vector<float> data; // cells_y * cells_x * orientations

    const float* cell(int cx, int cy) const {
        return data.data() + (std::size_t(cy) * cells_x + cx) * orientations;
    }
    float* cell(int cx, int cy) {
        return data.data() + (std::size_t(cy) * cells_x + cx) * orientations;
    }
};

GradientGrid compute_gradient_grid(const ImageU8& image, int cell_size, int orientations = 9);

// Raw per-cell orientation histograms for the cell grid covering `window`.
// The window must be cell-aligned in size (w and h multiples of cell_size)
// and at least one cell large; its top-left may be anywhere in bounds.
struct GradientFeature {
    int cells_x = 0;
    int cells_y = 0;
    int cell_size = 8;
    int orientations = 9;
    std::vector<float> data;
};

GradientFeature gradient_feature(const ImageU8& image, const BBox& window, int cell_size,
                                 int orientations = 9);

// Per-block descriptors: overlapping 2x2-cell blocks, L2 normalized, clipped
// at 0.2, renormalized. Block (bx,by) covers cells (bx..bx+1, by..by+1); a
// grid with C cells per side has C-1 blocks per side. Window descriptors are
// concatenations of the blocks inside the window, so overlapping windows
// share work through this precomputed grid.
struct BlockGrid {
    int blocks_x = 0;
    int blocks_y = 0;
    int block_dim = 36; // 2*2*orientations
    std::vector<float> data;

    const float* block(int bx, int by) const {
        return data.data() + (std::size_t(by) * blocks_x + bx) * block_dim;
    }
};

BlockGrid compute_block_grid(const GradientGrid& grid, float clip = 0.2f);

// Descriptor of a window spanning cells [cell_x, cell_x+cells_w) x
// [cell_y, cell_y+cells_h): concatenation of its (cells_w-1)*(cells_h-1)
// blocks in row-major order.
std::vector<float> window_descriptor(const BlockGrid& blocks, int cell_x, int cell_y,
                                     int cells_w, int cells_h);

inline int window_descriptor_dim(int cells_w, int cells_h, int orientations = 9) {
    return (cells_w - 1) * (cells_h - 1) * 4 * orientations;
}

} // namespace selflearn
