#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "detector/detect.hpp"
#include "detector/model.hpp"

namespace selflearn {

struct LatentTrainStats {
    // Regularized objective (regularizer + hinge at current latent
    // assignments over all negative windows) after each alternation round.
    std::vector<double> objective_trace;
    int rounds_run = 0;
    int positives = 0;
    int negatives_cached = 0;
};

struct TrainedDetector {
    DetectorModel model;
    Calibration calibration;
    LatentTrainStats stats;
};

// Latent-SVM training: alternates latent placement assignment for positives
// with convex hinge minimization over fixed placements, mining hard
// negatives from the exhaustively labelled frames between rounds.
// `negative_frames` must carry complete ground truth; windows overlapping
// any of their boxes above cfg.negative_iou_max are never used as negatives.
// When warm_start points at a geometry-compatible model, its weights become
// the starting point and the cold-start component assignment is skipped.
TrainedDetector train_latent_svm(const DatasetIndex& dataset,
                                 const std::vector<Annotation>& positives,
                                 const std::vector<FrameId>& negative_frames,
                                 const ScalePrior& prior, const DetectorConfig& cfg,
                                 std::uint64_t seed, int workers,
                                 const DetectorModel* warm_start = nullptr);

} // namespace selflearn
