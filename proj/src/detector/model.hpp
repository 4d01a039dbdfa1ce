#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/geometry.hpp"
#include "detector/platt.hpp"

namespace selflearn {

// Mean/stddev of labelled player window heights; the detector only searches
// scales whose window heights lie inside [mean - stddev, mean + stddev].
struct ScalePrior {
    double mean = 0.0;
    double stddev = 0.0;

    double lower() const { return mean - stddev; }
    double upper() const { return mean + stddev; }
};

ScalePrior fit_scale_prior(const std::vector<double>& heights);

// One latent part filter. Geometry is measured in part cells (half the root
// cell size); the anchor is relative to the root's top-left in part cells.
struct PartModel {
    int cells_w = 0;
    int cells_h = 0;
    int anchor_x = 0;
    int anchor_y = 0;
    std::vector<float> filter; // (cells_w-1)*(cells_h-1)*36
};

struct ComponentModel {
    std::vector<float> root_filter; // (root_cells_w-1)*(root_cells_h-1)*36
    std::vector<PartModel> parts;
    float bias = 0.0f;
};

// Latent values of one scored window: the chosen component, the root window
// and the part windows, all in original-image pixels.
struct Placement {
    int component = 0;
    BBox root;
    std::vector<BBox> parts;

    // All placement windows in order (root first), as consumed by the
    // part-based colour descriptor.
    std::vector<BBox> all_windows() const {
        std::vector<BBox> out;
        out.reserve(parts.size() + 1);
        out.push_back(root);
        out.insert(out.end(), parts.begin(), parts.end());
        return out;
    }
};

struct DetectorModel {
    int cell_size = 8; // root cell in pixels; parts live on cell_size/2
    int root_cells_w = 3;
    int root_cells_h = 6;
    int displacement = 4; // part displacement radius in part cells
    float deformation_quadratic = 0.05f;
    float deformation_linear = 0.0f;
    std::vector<ComponentModel> components;
    ScalePrior prior;

    int root_w_px() const { return root_cells_w * cell_size; }
    int root_h_px() const { return root_cells_h * cell_size; }
    double aspect() const { return double(root_w_px()) / double(root_h_px()); }
    int part_count() const { return components.empty() ? 0 : int(components[0].parts.size()); }

    double deformation_cost(int dx, int dy) const {
        const double d2 = double(dx) * dx + double(dy) * dy;
        const double d1 = std::abs(dx) + std::abs(dy);
        return deformation_quadratic * d2 + deformation_linear * d1;
    }

    // Empty filters with the standard part layout (2-column tiling of the
    // root at doubled resolution).
    static DetectorModel make_empty(const DetectorConfig& cfg);

    void save(std::ostream& os) const;
    static DetectorModel load(std::istream& is);
};

struct Detection {
    BBox box;
    double score = 0.0;
    double prob = 0.0;
    Placement placement;
    std::string team;           // filled by team classification
    double team_posterior = 0.0;
};

} // namespace selflearn
