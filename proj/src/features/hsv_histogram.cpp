#include "features/hsv_histogram.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace selflearn {

int hsv_bin_index(double h, double s, double v, const HistogramSizes& sizes) {
    const int joint = sizes.hue_bins * sizes.sat_bins;
    if (s < kAchromaticSaturation || v < kAchromaticValue) {
        int vb = int(v * sizes.val_bins);
        vb = std::clamp(vb, 0, sizes.val_bins - 1);
        return joint + vb;
    }
    int hb = int(h / 360.0 * sizes.hue_bins);
    hb = std::clamp(hb, 0, sizes.hue_bins - 1);
    int sb = int(s * sizes.sat_bins);
    sb = std::clamp(sb, 0, sizes.sat_bins - 1);
    return hb * sizes.sat_bins + sb;
}

HsvHistogram hsv_histogram(const ImageU8& image, const BBox& window, const HistogramSizes& sizes) {
    if (image.channels != 3) throw SlfError("hsv_histogram requires an RGB image");
    if (!image.contains(window)) throw SlfError("hsv_histogram window outside image bounds");
    if (sizes.hue_bins < 1 || sizes.sat_bins < 1 || sizes.val_bins < 1)
        throw SlfError("hsv_histogram bin sizes must be >= 1");

    std::vector<std::uint32_t> counts(std::size_t(sizes.total()), 0);
    for (int y = window.y; y < window.y2(); ++y) {
        const std::uint8_t* row = image.row(y);
        for (int x = window.x; x < window.x2(); ++x) {
            const std::uint8_t* px = row + std::size_t(x) * 3;
            double h, s, v;
            rgb_to_hsv(px[0], px[1], px[2], h, s, v);
            counts[std::size_t(hsv_bin_index(h, s, v, sizes))]++;
        }
    }

    const std::uint32_t max_count = *std::max_element(counts.begin(), counts.end());
    HsvHistogram hist;
    hist.bins.resize(counts.size());
    const float inv = max_count > 0 ? 1.0f / float(max_count) : 0.0f;
    for (std::size_t i = 0; i < counts.size(); ++i) hist.bins[i] = float(counts[i]) * inv;
    return hist;
}

} // namespace selflearn
