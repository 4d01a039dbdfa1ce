#pragma once

#include <vector>

#include "core/config.hpp"
#include "core/image.hpp"

namespace selflearn {

// HSV colour histogram of a window: an N_h x N_s joint hue-saturation block
// followed by an N_v value-only block, N = N_h*N_s + N_v bins total.
// Locally contrast normalized: bins divided by the max count, so the largest
// bin of any non-empty window is exactly 1.0. Not a probability distribution.
struct HsvHistogram {
    std::vector<float> bins;

    std::size_t size() const { return bins.size(); }
};

struct HistogramSizes {
    int hue_bins = 10;
    int sat_bins = 10;
    int val_bins = 10;

    int total() const { return hue_bins * sat_bins + val_bins; }
};

// Pixels with saturation < 0.1 or value < 0.1 are treated as achromatic and
// counted in the value-only block; all others go to the joint H x S block.
constexpr double kAchromaticSaturation = 0.1;
constexpr double kAchromaticValue = 0.1;

// Bin index for one pixel. Returns a value in [0, sizes.total()).
int hsv_bin_index(double h, double s, double v, const HistogramSizes& sizes);

HsvHistogram hsv_histogram(const ImageU8& image, const BBox& window, const HistogramSizes& sizes);

} // namespace selflearn
