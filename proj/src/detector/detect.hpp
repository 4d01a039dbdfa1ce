#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "core/image.hpp"
#include "detector/model.hpp"
#include "features/gradient.hpp"

namespace selflearn {

// Gradient features of one search scale: root-resolution and doubled
// (part-resolution) block grids over the same rescaled image.
struct LevelFeatures {
    double scale = 1.0; // scaled px = original px * scale
    int offset_x = 0;   // crop offset in original pixels, 0 for full frames
    int offset_y = 0;
    BlockGrid root_blocks;
    BlockGrid part_blocks;
    int root_cells_x = 0;
    int root_cells_y = 0;
};

LevelFeatures compute_level_features(const ImageU8& image, const DetectorModel& model,
                                     double scale, int offset_x = 0, int offset_y = 0);

// Latent maximization at one root position: best component and per-part
// displacements within the model's displacement radius.
struct WindowScore {
    double score = 0.0;
    int component = 0;
    std::vector<std::pair<int, int>> part_disp;
};

WindowScore score_root_at(const DetectorModel& model, const LevelFeatures& level, int rcx, int rcy);

Placement placement_at(const DetectorModel& model, const LevelFeatures& level, int rcx, int rcy,
                       const WindowScore& ws);

// Eq-style latent window score: rescales so the root window matches the
// model resolution, maximizes over components and part displacements and
// returns the argmax placement in original image coordinates.
std::pair<double, Placement> score_window(const DetectorModel& model, const ImageU8& image,
                                          const BBox& root);

// Scale factors covering window heights in [prior.lower(), prior.upper()]
// in geometric steps.
std::vector<double> search_scales(const DetectorModel& model, const ScalePrior& prior,
                                  double scale_step);

// Visits every valid root position of a level with its latent-maximized
// score. Used by dense detection and by hard-negative mining.
void scan_level(const DetectorModel& model, const LevelFeatures& level,
                const std::function<void(int rcx, int rcy, const WindowScore&)>& visit);

BBox root_box_at(const DetectorModel& model, const LevelFeatures& level, int rcx, int rcy);

std::vector<Detection> nms(std::vector<Detection> detections, double nms_iou);

// Dense multi-scale scan: windows with calibrated probability >= threshold,
// greedy NMS across scales. Detections are sorted by descending score.
std::vector<Detection> detect_frame(const DetectorModel& model, const Calibration& calibration,
                                    const ImageU8& image, const ScalePrior& prior,
                                    double scale_step, double nms_iou, double threshold);

} // namespace selflearn
