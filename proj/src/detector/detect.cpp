#include "detector/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace selflearn {

namespace {

// Filter response over every valid window position of a block grid.
// resp is indexed [py * positions_x + px].
void convolve_filter(const BlockGrid& blocks, const std::vector<float>& filter, int cells_w,
                     int cells_h, std::vector<double>& resp, int& positions_x, int& positions_y) {
    const int bw = cells_w - 1, bh = cells_h - 1;
    positions_x = blocks.blocks_x - bw + 1;
    positions_y = blocks.blocks_y - bh + 1;
    if (positions_x < 1 || positions_y < 1) {
        positions_x = positions_y = 0;
        resp.clear();
        return;
    }
    resp.assign(std::size_t(positions_x) * positions_y, 0.0);
    const std::size_t row_len = std::size_t(bw) * blocks.block_dim;
    for (int py = 0; py < positions_y; ++py) {
        for (int px = 0; px < positions_x; ++px) {
            double acc = 0.0;
            const float* f = filter.data();
            for (int by = 0; by < bh; ++by) {
                const float* src = blocks.block(px, py + by);
                for (std::size_t i = 0; i < row_len; ++i) acc += double(f[i]) * double(src[i]);
                f += row_len;
            }
            resp[std::size_t(py) * positions_x + px] = acc;
        }
    }
}

double dot_window(const BlockGrid& blocks, const std::vector<float>& filter, int cx, int cy,
                  int cells_w, int cells_h) {
    const int bw = cells_w - 1, bh = cells_h - 1;
    double acc = 0.0;
    const float* f = filter.data();
    const std::size_t row_len = std::size_t(bw) * blocks.block_dim;
    for (int by = 0; by < bh; ++by) {
        const float* src = blocks.block(cx, cy + by);
        for (std::size_t i = 0; i < row_len; ++i) acc += double(f[i]) * double(src[i]);
        f += row_len;
    }
    return acc;
}

BBox scaled_cells_to_original(int cell_px, int cx, int cy, int cells_w, int cells_h, double scale,
                              int offset_x, int offset_y) {
    BBox b;
    b.x = offset_x + int(std::lround(cx * cell_px / scale));
    b.y = offset_y + int(std::lround(cy * cell_px / scale));
    b.w = std::max(1, int(std::lround(cells_w * cell_px / scale)));
    b.h = std::max(1, int(std::lround(cells_h * cell_px / scale)));
    return b;
}

} // namespace

LevelFeatures compute_level_features(const ImageU8& image, const DetectorModel& model,
                                     double scale, int offset_x, int offset_y) {
    LevelFeatures level;
    level.scale = scale;
    level.offset_x = offset_x;
    level.offset_y = offset_y;

    const int sw = std::max(model.root_w_px(), int(std::lround(image.width * scale)));
    const int sh = std::max(model.root_h_px(), int(std::lround(image.height * scale)));
    const ImageU8 scaled = resize_bilinear(image, sw, sh);

    const GradientGrid root_grid = compute_gradient_grid(scaled, model.cell_size);
    const GradientGrid part_grid = compute_gradient_grid(scaled, model.cell_size / 2);
    level.root_blocks = compute_block_grid(root_grid);
    level.part_blocks = compute_block_grid(part_grid);
    level.root_cells_x = root_grid.cells_x;
    level.root_cells_y = root_grid.cells_y;
    return level;
}

WindowScore score_root_at(const DetectorModel& model, const LevelFeatures& level, int rcx,
                          int rcy) {
    if (model.components.empty()) throw SlfError("detector model has no components");
    const int rcw = model.root_cells_w, rch = model.root_cells_h;
    if (rcx < 0 || rcy < 0 || rcx > level.root_cells_x - rcw || rcy > level.root_cells_y - rch)
        throw SlfError("root position outside feature grid");

    WindowScore best;
    best.score = -std::numeric_limits<double>::infinity();
    const int D = model.displacement;

    for (std::size_t c = 0; c < model.components.size(); ++c) {
        const auto& comp = model.components[c];
        double score = dot_window(level.root_blocks, comp.root_filter, rcx, rcy, rcw, rch) +
                       comp.bias;
        std::vector<std::pair<int, int>> disps(comp.parts.size(), {0, 0});
        bool feasible = true;
        for (std::size_t p = 0; p < comp.parts.size(); ++p) {
            const auto& part = comp.parts[p];
            const int ax = 2 * rcx + part.anchor_x;
            const int ay = 2 * rcy + part.anchor_y;
            double part_best = -std::numeric_limits<double>::infinity();
            std::pair<int, int> part_disp{0, 0};
            for (int dy = -D; dy <= D; ++dy) {
                const int py = ay + dy;
                if (py < 0 || py + part.cells_h - 1 > level.part_blocks.blocks_y) continue;
                for (int dx = -D; dx <= D; ++dx) {
                    const int px = ax + dx;
                    if (px < 0 || px + part.cells_w - 1 > level.part_blocks.blocks_x) continue;
                    const double s =
                        dot_window(level.part_blocks, part.filter, px, py, part.cells_w,
                                   part.cells_h) -
                        model.deformation_cost(dx, dy);
                    if (s > part_best) {
                        part_best = s;
                        part_disp = {dx, dy};
                    }
                }
            }
            if (!std::isfinite(part_best)) {
                feasible = false;
                break;
            }
            score += part_best;
            disps[p] = part_disp;
        }
        if (!feasible) continue;
        if (score > best.score) {
            best.score = score;
            best.component = int(c);
            best.part_disp = std::move(disps);
        }
    }
    if (!std::isfinite(best.score)) throw SlfError("no feasible placement at root position");
    return best;
}

Placement placement_at(const DetectorModel& model, const LevelFeatures& level, int rcx, int rcy,
                       const WindowScore& ws) {
    Placement pl;
    pl.component = ws.component;
    pl.root = scaled_cells_to_original(model.cell_size, rcx, rcy, model.root_cells_w,
                                       model.root_cells_h, level.scale, level.offset_x,
                                       level.offset_y);
    const auto& comp = model.components[std::size_t(ws.component)];
    const int part_cell = model.cell_size / 2;
    for (std::size_t p = 0; p < comp.parts.size(); ++p) {
        const auto& part = comp.parts[p];
        const int px = 2 * rcx + part.anchor_x + ws.part_disp[p].first;
        const int py = 2 * rcy + part.anchor_y + ws.part_disp[p].second;
        pl.parts.push_back(scaled_cells_to_original(part_cell, px, py, part.cells_w, part.cells_h,
                                                    level.scale, level.offset_x, level.offset_y));
    }
    return pl;
}

std::pair<double, Placement> score_window(const DetectorModel& model, const ImageU8& image,
                                          const BBox& root) {
    if (!image.contains(root)) throw SlfError("score_window root outside image bounds");

    const double scale = double(model.root_h_px()) / double(root.h);
    // Crop enough context for displaced parts and block structure.
    const int margin = int(std::ceil((model.displacement * (model.cell_size / 2) +
                                      2 * model.cell_size) /
                                     scale)) +
                       1;
    BBox region;
    region.x = std::max(0, root.x - margin);
    region.y = std::max(0, root.y - margin);
    region.w = std::min(image.width, root.x2() + margin) - region.x;
    region.h = std::min(image.height, root.y2() + margin) - region.y;

    const ImageU8 cropped = crop(image, region);
    const LevelFeatures level = compute_level_features(cropped, model, scale, region.x, region.y);

    int rcx = int(std::lround((root.x - region.x) * scale / model.cell_size));
    int rcy = int(std::lround((root.y - region.y) * scale / model.cell_size));
    rcx = std::clamp(rcx, 0, level.root_cells_x - model.root_cells_w);
    rcy = std::clamp(rcy, 0, level.root_cells_y - model.root_cells_h);

    const WindowScore ws = score_root_at(model, level, rcx, rcy);
    return {ws.score, placement_at(model, level, rcx, rcy, ws)};
}

std::vector<double> search_scales(const DetectorModel& model, const ScalePrior& prior,
                                  double scale_step) {
    if (prior.mean <= 0.0) throw SlfError("scale prior mean must be positive");
    const double lo = std::max(prior.lower(), double(model.cell_size));
    const double hi = std::max(prior.upper(), lo);

    std::vector<double> heights;
    for (double h = prior.mean; h >= lo - 1e-9; h /= scale_step) heights.push_back(h);
    for (double h = prior.mean * scale_step; h <= hi + 1e-9; h *= scale_step) heights.push_back(h);
    std::sort(heights.begin(), heights.end());

    std::vector<double> scales;
    scales.reserve(heights.size());
    for (const double h : heights) scales.push_back(double(model.root_h_px()) / h);
    return scales;
}

std::vector<Detection> nms(std::vector<Detection> detections, double nms_iou) {
    std::stable_sort(detections.begin(), detections.end(),
                     [](const Detection& a, const Detection& b) {
                         if (a.score != b.score) return a.score > b.score;
                         if (a.box.x != b.box.x) return a.box.x < b.box.x;
                         if (a.box.y != b.box.y) return a.box.y < b.box.y;
                         return a.box.h < b.box.h;
                     });
    std::vector<Detection> kept;
    for (auto& d : detections) {
        bool suppressed = false;
        for (const auto& k : kept) {
            if (iou(d.box, k.box) >= nms_iou) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(std::move(d));
    }
    return kept;
}

BBox root_box_at(const DetectorModel& model, const LevelFeatures& level, int rcx, int rcy) {
    return scaled_cells_to_original(model.cell_size, rcx, rcy, model.root_cells_w,
                                    model.root_cells_h, level.scale, level.offset_x,
                                    level.offset_y);
}

void scan_level(const DetectorModel& model, const LevelFeatures& level,
                const std::function<void(int rcx, int rcy, const WindowScore&)>& visit) {
    const int rcw = model.root_cells_w, rch = model.root_cells_h;
    const int D = model.displacement;
    const std::size_t n_comp = model.components.size();
    const int max_x = level.root_cells_x - rcw;
    const int max_y = level.root_cells_y - rch;
    if (max_x < 0 || max_y < 0) return;

    // Response maps for every filter, shared by all root positions.
    std::vector<std::vector<double>> root_resp(n_comp);
    std::vector<int> root_px(n_comp), root_py(n_comp);
    std::vector<std::vector<std::vector<double>>> part_resp(n_comp);
    std::vector<std::vector<int>> part_px(n_comp), part_py(n_comp);
    for (std::size_t c = 0; c < n_comp; ++c) {
        const auto& comp = model.components[c];
        convolve_filter(level.root_blocks, comp.root_filter, rcw, rch, root_resp[c], root_px[c],
                        root_py[c]);
        part_resp[c].resize(comp.parts.size());
        part_px[c].resize(comp.parts.size());
        part_py[c].resize(comp.parts.size());
        for (std::size_t p = 0; p < comp.parts.size(); ++p)
            convolve_filter(level.part_blocks, comp.parts[p].filter, comp.parts[p].cells_w,
                            comp.parts[p].cells_h, part_resp[c][p], part_px[c][p], part_py[c][p]);
    }

    std::size_t max_parts = 0;
    for (const auto& c : model.components) max_parts = std::max(max_parts, c.parts.size());
    WindowScore best;
    std::vector<std::pair<int, int>> cur(max_parts, {0, 0});
    best.part_disp.resize(max_parts);

    for (int rcy = 0; rcy <= max_y; ++rcy) {
        for (int rcx = 0; rcx <= max_x; ++rcx) {
            best.score = -std::numeric_limits<double>::infinity();
            std::size_t best_parts = 0;
            for (std::size_t c = 0; c < n_comp; ++c) {
                const auto& comp = model.components[c];
                double score = root_resp[c][std::size_t(rcy) * root_px[c] + rcx] + comp.bias;
                bool feasible = true;
                for (std::size_t p = 0; p < comp.parts.size(); ++p) {
                    const auto& part = comp.parts[p];
                    const int ax = 2 * rcx + part.anchor_x;
                    const int ay = 2 * rcy + part.anchor_y;
                    double pbest = -std::numeric_limits<double>::infinity();
                    std::pair<int, int> bd{0, 0};
                    const int y_lo = std::max(ay - D, 0);
                    const int y_hi = std::min(ay + D, part_py[c][p] - 1);
                    const int x_lo = std::max(ax - D, 0);
                    const int x_hi = std::min(ax + D, part_px[c][p] - 1);
                    for (int py = y_lo; py <= y_hi; ++py) {
                        const double* row = part_resp[c][p].data() + std::size_t(py) * part_px[c][p];
                        for (int px = x_lo; px <= x_hi; ++px) {
                            const double s = row[px] - model.deformation_cost(px - ax, py - ay);
                            if (s > pbest) {
                                pbest = s;
                                bd = {px - ax, py - ay};
                            }
                        }
                    }
                    if (!std::isfinite(pbest)) {
                        feasible = false;
                        break;
                    }
                    score += pbest;
                    cur[p] = bd;
                }
                if (!feasible) continue;
                if (score > best.score) {
                    best.score = score;
                    best.component = int(c);
                    best_parts = comp.parts.size();
                    std::copy(cur.begin(), cur.begin() + long(best_parts), best.part_disp.begin());
                }
            }
            if (!std::isfinite(best.score)) continue;
            best.part_disp.resize(best_parts);
            visit(rcx, rcy, best);
            best.part_disp.resize(max_parts);
        }
    }
}

std::vector<Detection> detect_frame(const DetectorModel& model, const Calibration& calibration,
                                    const ImageU8& image, const ScalePrior& prior,
                                    double scale_step, double nms_iou, double threshold) {
    if (image.empty()) throw SlfError("detect_frame on empty image");

    std::vector<Detection> candidates;
    for (const double scale : search_scales(model, prior, scale_step)) {
        const LevelFeatures level = compute_level_features(image, model, scale);
        scan_level(model, level, [&](int rcx, int rcy, const WindowScore& ws) {
            const double prob = calibration.probability(ws.score);
            if (prob < threshold) return;
            Detection det;
            det.score = ws.score;
            det.prob = prob;
            det.placement = placement_at(model, level, rcx, rcy, ws);
            det.box = det.placement.root;
            candidates.push_back(std::move(det));
        });
    }

    return nms(std::move(candidates), nms_iou);
}

} // namespace selflearn
