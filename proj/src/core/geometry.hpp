#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace selflearn {

// Axis-aligned box, top-left origin, integer pixels. w and h must be > 0.
struct BBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool valid() const { return w > 0 && h > 0; }
    std::int64_t area() const { return std::int64_t(w) * std::int64_t(h); }
    int x2() const { return x + w; } // exclusive
    int y2() const { return y + h; } // exclusive
    double cx() const { return x + 0.5 * w; }
    double cy() const { return y + 0.5 * h; }

    bool operator==(const BBox& o) const = default;
};

inline std::int64_t intersection_area(const BBox& a, const BBox& b) {
    const int ix = std::max(0, std::min(a.x2(), b.x2()) - std::max(a.x, b.x));
    const int iy = std::max(0, std::min(a.y2(), b.y2()) - std::max(a.y, b.y));
    return std::int64_t(ix) * std::int64_t(iy);
}

inline double iou(const BBox& a, const BBox& b) {
    const std::int64_t inter = intersection_area(a, b);
    if (inter == 0) return 0.0;
    const std::int64_t uni = a.area() + b.area() - inter;
    return double(inter) / double(uni);
}

// Real-valued box used inside the tracker; rounded to BBox at annotation time.
struct BBoxF {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    BBox rounded() const {
        BBox b;
        b.x = int(std::lround(x));
        b.y = int(std::lround(y));
        b.w = std::max(1, int(std::lround(w)));
        b.h = std::max(1, int(std::lround(h)));
        return b;
    }
};

} // namespace selflearn
