#pragma once

#include <string>
#include <vector>

#include "core/annotation.hpp"
#include "core/geometry.hpp"

namespace selflearn {

struct EvalDetection {
    FrameId frame_id;
    BBox box;
    double confidence = 0.0;
};

struct MatchResult {
    // per detection, in the (deterministic) rank order used for matching
    std::vector<EvalDetection> ranked;
    std::vector<bool> is_tp;
    int n_truth = 0;
};

// PASCAL-VOC-style greedy matching at the given IoU threshold: detections in
// descending confidence (ties by frame, then x, then y) claim the
// highest-IoU unclaimed truth box; duplicates are false positives.
MatchResult match_detections(std::vector<EvalDetection> detections,
                             const std::vector<Annotation>& ground_truth,
                             double iou_threshold = 0.5);

// Every-point interpolated average precision (VOC2010 style).
double average_precision(const std::vector<bool>& tp_flags, int n_truth);

struct PRPoint {
    double precision = 1.0;
    double recall = 0.0;
    bool precision_defined = true; // false when there are no detections
};

PRPoint precision_recall(const std::vector<bool>& tp_flags, int n_truth);

struct PRCurve {
    std::vector<double> precision;
    std::vector<double> recall;
    double ap = 0.0;
};

PRCurve pr_curve(const std::vector<bool>& tp_flags, int n_truth);

} // namespace selflearn
