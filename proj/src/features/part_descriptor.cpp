#include "features/part_descriptor.hpp"

namespace selflearn {

std::vector<float> part_descriptor(const ImageU8& image, const std::vector<BBox>& placements,
                                   DescriptorMode mode, const HistogramSizes& sizes,
                                   int cell_size) {
    std::vector<float> out;
    for (const auto& box : placements) {
        if (mode == DescriptorMode::Colour) {
            const HsvHistogram h = hsv_histogram(image, box, sizes);
            out.insert(out.end(), h.bins.begin(), h.bins.end());
        } else {
            const GradientFeature g = gradient_feature(image, box, cell_size);
            out.insert(out.end(), g.data.begin(), g.data.end());
        }
    }
    return out;
}

} // namespace selflearn
