#include "detector/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "detector/linear_svm.hpp"

namespace selflearn {

namespace {

// Bias enters the weight vector as a constant feature with this value, which
// softens its share of the L2 regularizer.
constexpr float kBiasFeature = 10.0f;

struct WeightLayout {
    std::size_t total = 0;
    std::vector<std::size_t> component_offset;
};

WeightLayout make_layout(const DetectorModel& model) {
    WeightLayout lay;
    std::size_t comp_dim = model.components[0].root_filter.size() + 1;
    for (const auto& p : model.components[0].parts) comp_dim += p.filter.size();
    for (std::size_t c = 0; c < model.components.size(); ++c)
        lay.component_offset.push_back(c * comp_dim);
    lay.total = model.components.size() * comp_dim;
    return lay;
}

void model_from_weights(DetectorModel& model, const WeightLayout& lay,
                        const std::vector<double>& w) {
    for (std::size_t c = 0; c < model.components.size(); ++c) {
        auto& comp = model.components[c];
        std::size_t off = lay.component_offset[c];
        for (auto& v : comp.root_filter) v = float(w[off++]);
        for (auto& part : comp.parts)
            for (auto& v : part.filter) v = float(w[off++]);
        comp.bias = float(w[off] * kBiasFeature);
    }
}

std::vector<double> weights_from_model(const DetectorModel& model, const WeightLayout& lay) {
    std::vector<double> w(lay.total, 0.0);
    for (std::size_t c = 0; c < model.components.size(); ++c) {
        const auto& comp = model.components[c];
        std::size_t off = lay.component_offset[c];
        for (const auto v : comp.root_filter) w[off++] = v;
        for (const auto& part : comp.parts)
            for (const auto v : part.filter) w[off++] = v;
        w[off] = comp.bias / kBiasFeature;
    }
    return w;
}

bool geometry_compatible(const DetectorModel& a, const DetectorModel& b) {
    if (a.components.size() != b.components.size()) return false;
    if (a.cell_size != b.cell_size || a.root_cells_w != b.root_cells_w ||
        a.root_cells_h != b.root_cells_h)
        return false;
    for (std::size_t c = 0; c < a.components.size(); ++c) {
        if (a.components[c].parts.size() != b.components[c].parts.size()) return false;
        for (std::size_t p = 0; p < a.components[c].parts.size(); ++p) {
            const auto& pa = a.components[c].parts[p];
            const auto& pb = b.components[c].parts[p];
            if (pa.cells_w != pb.cells_w || pa.cells_h != pb.cells_h) return false;
        }
    }
    return true;
}

// Feature vector at a fixed placement; zero outside the chosen component's
// span. score(x,z) == w . phi - deformation, which the solver absorbs into
// the per-example target margin.
std::vector<float> assemble_phi(const DetectorModel& model, const WeightLayout& lay,
                                const LevelFeatures& level, int rcx, int rcy,
                                const WindowScore& ws) {
    std::vector<float> phi(lay.total, 0.0f);
    const auto& comp = model.components[std::size_t(ws.component)];
    std::size_t off = lay.component_offset[std::size_t(ws.component)];

    const auto root =
        window_descriptor(level.root_blocks, rcx, rcy, model.root_cells_w, model.root_cells_h);
    std::copy(root.begin(), root.end(), phi.begin() + long(off));
    off += root.size();

    for (std::size_t p = 0; p < comp.parts.size(); ++p) {
        const auto& part = comp.parts[p];
        const int px = 2 * rcx + part.anchor_x + ws.part_disp[p].first;
        const int py = 2 * rcy + part.anchor_y + ws.part_disp[p].second;
        const auto desc = window_descriptor(level.part_blocks, px, py, part.cells_w, part.cells_h);
        std::copy(desc.begin(), desc.end(), phi.begin() + long(off));
        off += desc.size();
    }
    phi[off] = kBiasFeature;
    return phi;
}

double deformation_total(const DetectorModel& model, const WindowScore& ws) {
    double d = 0.0;
    for (const auto& [dx, dy] : ws.part_disp) d += model.deformation_cost(dx, dy);
    return d;
}

// Deformation penalty folded into an example's target margin: t = 1 + y*D.
double margin_target(int y, double deformation) { return 1.0 + y * deformation; }

double deformation_of(const SvmExample& e) {
    return e.y > 0 ? e.target - 1.0 : 1.0 - e.target;
}

// Crop-and-rescale context, geometry-identical to score_window.
struct WindowContext {
    LevelFeatures level;
    int rcx = 0;
    int rcy = 0;
};

WindowContext window_context(const DetectorModel& model, const ImageU8& image, const BBox& root) {
    const double scale = double(model.root_h_px()) / double(root.h);
    const int margin = int(std::ceil((model.displacement * (model.cell_size / 2) +
                                      2 * model.cell_size) /
                                     scale)) +
                       1;
    BBox region;
    region.x = std::max(0, root.x - margin);
    region.y = std::max(0, root.y - margin);
    region.w = std::min(image.width, root.x2() + margin) - region.x;
    region.h = std::min(image.height, root.y2() + margin) - region.y;

    WindowContext ctx;
    ctx.level = compute_level_features(crop(image, region), model, scale, region.x, region.y);
    ctx.rcx = int(std::lround((root.x - region.x) * scale / model.cell_size));
    ctx.rcy = int(std::lround((root.y - region.y) * scale / model.cell_size));
    ctx.rcx = std::clamp(ctx.rcx, 0, ctx.level.root_cells_x - model.root_cells_w);
    ctx.rcy = std::clamp(ctx.rcy, 0, ctx.level.root_cells_y - model.root_cells_h);
    return ctx;
}

struct NegativeKey {
    int frame_idx;
    int scale_idx;
    int rcx;
    int rcy;

    auto operator<=>(const NegativeKey&) const = default;
};

struct Violator {
    NegativeKey key;
    SvmExample example;
    double score = 0.0;
};

struct FrameScan {
    std::vector<Violator> violators;
    double hinge_sum = 0.0; // hinge over all negative windows of the frame
};

// Per-frame, per-pass bound on freshly mined negatives.
constexpr std::size_t kMiningFrameCap = 400;

} // namespace

TrainedDetector train_latent_svm(const DatasetIndex& dataset,
                                 const std::vector<Annotation>& all_positives,
                                 const std::vector<FrameId>& negative_frames,
                                 const ScalePrior& prior, const DetectorConfig& cfg,
                                 std::uint64_t seed, int workers,
                                 const DetectorModel* warm_start) {
    std::vector<Annotation> positives;
    for (const auto& a : all_positives)
        if (a.class_label == ClassLabel::Player && a.box.h >= cfg.cell_size) positives.push_back(a);
    if (positives.empty()) throw SlfError("latent SVM training needs at least one positive");

    TrainedDetector out;
    out.model = DetectorModel::make_empty(cfg);
    out.model.prior = prior;
    DetectorModel& model = out.model;
    const WeightLayout lay = make_layout(model);
    const double C = cfg.svm_c;
    const std::size_t n_pos = positives.size();

    // Ground truth per frame, for the negative overlap exclusion rule.
    std::map<FrameId, std::vector<BBox>> gt;
    for (const auto& a : all_positives)
        if (a.class_label == ClassLabel::Player) gt[a.frame_id].push_back(a.box);

    // Mining frames: a deterministic seed-driven subset when there are many.
    std::vector<FrameId> mining_frames = negative_frames;
    if (int(mining_frames.size()) > cfg.max_mining_frames) {
        Rng rng(Rng::derive(seed, Rng::hash_label("mining-frames")));
        for (std::size_t i = mining_frames.size() - 1; i > 0; --i)
            std::swap(mining_frames[i], mining_frames[std::size_t(rng.randint(0, int(i)))]);
        mining_frames.resize(std::size_t(cfg.max_mining_frames));
        std::sort(mining_frames.begin(), mining_frames.end());
    }
    if (mining_frames.empty())
        throw SlfError("latent SVM training needs exhaustively labelled frames for negatives");

    const std::vector<double> scales = search_scales(model, prior, cfg.scale_step);

    // Group positives by frame so each image decodes once per round.
    std::map<FrameId, std::vector<std::size_t>> by_frame;
    for (std::size_t i = 0; i < n_pos; ++i) by_frame[positives[i].frame_id].push_back(i);
    const std::vector<std::pair<FrameId, std::vector<std::size_t>>> positive_groups(
        by_frame.begin(), by_frame.end());

    // examples[0..n_pos) are positives (rewritten on relabel); the rest is
    // the persistent negative cache. alphas align for warm starts.
    std::vector<SvmExample> examples(n_pos);
    std::vector<double> alphas;
    std::map<NegativeKey, std::size_t> neg_index;

    std::vector<double> w(lay.total, 0.0);
    bool cold = true;
    if (warm_start && geometry_compatible(*warm_start, model)) {
        w = weights_from_model(*warm_start, lay);
        model_from_weights(model, lay, w);
        cold = false;
    }

    auto dot_w = [&](const SvmExample& e) {
        double dot = 0.0;
        for (std::size_t j = 0; j < e.x.size(); ++j) dot += w[j] * e.x[j];
        return dot;
    };
    auto raw_score = [&](const SvmExample& e) { return dot_w(e) - deformation_of(e); };

    auto relabel_positives = [&](bool round_robin_components) {
        parallel_for(positive_groups.size(), workers, [&](std::size_t g) {
            const auto& [frame, idxs] = positive_groups[g];
            const ImageU8 image = dataset.load_frame(frame);
            for (const std::size_t i : idxs) {
                const WindowContext ctx = window_context(model, image, positives[i].box);
                WindowScore ws = score_root_at(model, ctx.level, ctx.rcx, ctx.rcy);
                if (round_robin_components && model.components.size() > 1) {
                    // cold model: scores are degenerate, spread positives
                    // across components deterministically
                    ws.component = int(i % model.components.size());
                    ws.part_disp.assign(
                        model.components[std::size_t(ws.component)].parts.size(), {0, 0});
                }
                SvmExample e;
                e.x = assemble_phi(model, lay, ctx.level, ctx.rcx, ctx.rcy, ws);
                e.y = 1;
                e.target = margin_target(1, deformation_total(model, ws));
                examples[i] = std::move(e);
            }
        });
    };

    // Seed the cache with random grid-aligned windows before the first
    // solve; hard negatives join after each round.
    auto seed_negatives = [&]() {
        const int per_scale =
            std::max(1, cfg.negatives_per_frame / std::max(1, int(scales.size())));
        std::vector<std::vector<Violator>> collected(mining_frames.size());
        const Rng root(Rng::derive(seed, Rng::hash_label("negative-seed")));
        parallel_for(mining_frames.size(), workers, [&](std::size_t f) {
            const FrameId& frame = mining_frames[f];
            Rng rng = root.stream(frame.seq + "/" + std::to_string(frame.frame));
            const ImageU8 image = dataset.load_frame(frame);
            const auto git = gt.find(frame);
            const std::vector<BBox>* boxes = git == gt.end() ? nullptr : &git->second;
            for (std::size_t s = 0; s < scales.size(); ++s) {
                const LevelFeatures level = compute_level_features(image, model, scales[s]);
                const int max_x = level.root_cells_x - model.root_cells_w;
                const int max_y = level.root_cells_y - model.root_cells_h;
                if (max_x < 0 || max_y < 0) continue;
                for (int k = 0; k < per_scale; ++k) {
                    const int rcx = rng.randint(0, max_x);
                    const int rcy = rng.randint(0, max_y);
                    const BBox box = root_box_at(model, level, rcx, rcy);
                    bool overlaps = false;
                    if (boxes)
                        for (const auto& g : *boxes)
                            if (iou(box, g) >= cfg.negative_iou_max) {
                                overlaps = true;
                                break;
                            }
                    if (overlaps) continue;
                    const WindowScore ws = score_root_at(model, level, rcx, rcy);
                    Violator v;
                    v.key = NegativeKey{int(f), int(s), rcx, rcy};
                    v.example.x = assemble_phi(model, lay, level, rcx, rcy, ws);
                    v.example.y = -1;
                    v.example.target = margin_target(-1, deformation_total(model, ws));
                    v.score = ws.score;
                    collected[f].push_back(std::move(v));
                }
            }
        });
        for (auto& frame_list : collected)
            for (auto& v : frame_list) {
                if (neg_index.count(v.key)) continue;
                neg_index.emplace(v.key, examples.size());
                examples.push_back(std::move(v.example));
            }
    };

    // One scan over the mining frames: accumulates the exact hinge over all
    // negative windows and optionally collects margin violators.
    auto mine = [&](bool collect) {
        std::vector<FrameScan> scans(mining_frames.size());
        parallel_for(mining_frames.size(), workers, [&](std::size_t f) {
            FrameScan& scan = scans[f];
            const FrameId& frame = mining_frames[f];
            const ImageU8 image = dataset.load_frame(frame);
            const auto git = gt.find(frame);
            const std::vector<BBox>* boxes = git == gt.end() ? nullptr : &git->second;
            for (std::size_t s = 0; s < scales.size(); ++s) {
                const LevelFeatures level = compute_level_features(image, model, scales[s]);
                scan_level(model, level, [&](int rcx, int rcy, const WindowScore& ws) {
                    const BBox box = root_box_at(model, level, rcx, rcy);
                    if (boxes) {
                        for (const auto& g : *boxes)
                            if (iou(box, g) >= cfg.negative_iou_max) return;
                    }
                    scan.hinge_sum += std::max(0.0, 1.0 + ws.score);
                    if (!collect || ws.score <= -1.0 + 1e-9) return;
                    Violator v;
                    v.key = NegativeKey{int(f), int(s), rcx, rcy};
                    v.example.x = assemble_phi(model, lay, level, rcx, rcy, ws);
                    v.example.y = -1;
                    v.example.target = margin_target(-1, deformation_total(model, ws));
                    v.score = ws.score;
                    scan.violators.push_back(std::move(v));
                });
            }
            if (scan.violators.size() > kMiningFrameCap) {
                std::stable_sort(scan.violators.begin(), scan.violators.end(),
                                 [](const Violator& a, const Violator& b) {
                                     return a.score > b.score;
                                 });
                scan.violators.resize(kMiningFrameCap);
            }
        });

        double hinge_total = 0.0;
        std::size_t changed = 0;
        for (auto& scan : scans) {
            hinge_total += scan.hinge_sum;
            for (auto& v : scan.violators) {
                const auto it = neg_index.find(v.key);
                if (it == neg_index.end()) {
                    if (int(examples.size() - n_pos) >= cfg.negative_cache) continue;
                    neg_index.emplace(v.key, examples.size());
                    examples.push_back(std::move(v.example));
                    if (!alphas.empty()) alphas.push_back(0.0);
                    ++changed;
                } else {
                    // refresh stale latent placements with the current argmax
                    SvmExample& cached = examples[it->second];
                    if (raw_score(v.example) > raw_score(cached) + 1e-9) {
                        cached = std::move(v.example);
                        ++changed;
                    }
                }
            }
        }
        return std::pair<double, std::size_t>(hinge_total, changed);
    };

    auto solve = [&]() {
        const SvmSolution sol = solve_hinge_svm(examples, lay.total, C, alphas, 400, 1e-7);
        w = sol.w;
        model_from_weights(model, lay, w);
        if (!std::isfinite(sol.objective)) throw SlfError("latent SVM objective is not finite");
    };

    out.stats.positives = int(n_pos);
    seed_negatives();
    double prev_objective = std::numeric_limits<double>::infinity();

    for (int round = 0; round < cfg.latent_rounds; ++round) {
        relabel_positives(round == 0 && cold);

        double neg_hinge = 0.0;
        const int passes = std::max(1, cfg.mining_passes);
        for (int pass = 0; pass < passes; ++pass) {
            solve();
            const auto [hinge, changed] = mine(true);
            neg_hinge = hinge;
            if (changed == 0) break;
            if (pass + 1 == passes) {
                // cache changed on the last pass; measure at the refreshed w
                solve();
                neg_hinge = mine(false).first;
            }
        }

        double reg = 0.0;
        for (const double v : w) reg += v * v;
        double pos_hinge = 0.0;
        for (std::size_t i = 0; i < n_pos; ++i)
            pos_hinge += std::max(0.0, examples[i].target - dot_w(examples[i]));
        const double objective = 0.5 * reg + C * (pos_hinge + neg_hinge);
        if (!std::isfinite(objective)) throw SlfError("latent SVM objective is not finite");
        out.stats.objective_trace.push_back(objective);
        out.stats.rounds_run = round + 1;

        if (std::isfinite(prev_objective) &&
            std::fabs(prev_objective - objective) <
                cfg.objective_tolerance * std::max(1.0, std::fabs(prev_objective)))
            break;
        prev_objective = objective;
    }

    out.stats.negatives_cached = int(examples.size() - n_pos);

    // Sigmoid calibration over the final training scores.
    std::vector<std::pair<double, int>> scored;
    scored.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i)
        scored.emplace_back(raw_score(examples[i]), examples[i].y);
    out.calibration = fit_platt(scored);

    return out;
}

} // namespace selflearn
