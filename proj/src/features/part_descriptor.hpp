#pragma once

#include <vector>

#include "features/gradient.hpp"
#include "features/hsv_histogram.hpp"

namespace selflearn {

enum class DescriptorMode { Colour, Gradient };

// Feature vector assembled from image regions at the given placements,
// one block per placement, concatenated in order. Colour mode yields
// placements.size() * N histogram values; gradient mode concatenates the raw
// per-cell orientation histograms of each placement.
std::vector<float> part_descriptor(const ImageU8& image, const std::vector<BBox>& placements,
                                   DescriptorMode mode, const HistogramSizes& sizes,
                                   int cell_size = 8);

} // namespace selflearn
