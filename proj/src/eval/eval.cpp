#include "eval/eval.hpp"

#include <algorithm>
#include <map>

namespace selflearn {

MatchResult match_detections(std::vector<EvalDetection> detections,
                             const std::vector<Annotation>& ground_truth, double iou_threshold) {
    std::stable_sort(detections.begin(), detections.end(),
                     [](const EvalDetection& a, const EvalDetection& b) {
                         if (a.confidence != b.confidence) return a.confidence > b.confidence;
                         if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
                         if (a.box.x != b.box.x) return a.box.x < b.box.x;
                         return a.box.y < b.box.y;
                     });

    std::map<FrameId, std::vector<std::size_t>> truth_by_frame;
    std::vector<bool> claimed(ground_truth.size(), false);
    int n_truth = 0;
    for (std::size_t i = 0; i < ground_truth.size(); ++i) {
        if (ground_truth[i].class_label != ClassLabel::Player) continue;
        truth_by_frame[ground_truth[i].frame_id].push_back(i);
        ++n_truth;
    }

    MatchResult res;
    res.n_truth = n_truth;
    res.is_tp.resize(detections.size(), false);
    for (std::size_t d = 0; d < detections.size(); ++d) {
        const auto it = truth_by_frame.find(detections[d].frame_id);
        if (it == truth_by_frame.end()) continue;
        double best_iou = 0.0;
        std::size_t best = 0;
        bool found = false;
        for (const auto g : it->second) {
            if (claimed[g]) continue;
            const double overlap = iou(detections[d].box, ground_truth[g].box);
            if (overlap >= iou_threshold && overlap > best_iou) {
                best_iou = overlap;
                best = g;
                found = true;
            }
        }
        if (found) {
            claimed[best] = true;
            res.is_tp[d] = true;
        }
    }
    res.ranked = std::move(detections);
    return res;
}

double average_precision(const std::vector<bool>& tp_flags, int n_truth) {
    if (n_truth <= 0) return 0.0; // defined as 0 (with a warning upstream)
    if (tp_flags.empty()) return 0.0;

    const std::size_t n = tp_flags.size();
    std::vector<double> precision(n), recall(n);
    int tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (tp_flags[i]) ++tp;
        precision[i] = double(tp) / double(i + 1);
        recall[i] = double(tp) / double(n_truth);
    }

    // precision envelope: running max from the right
    for (std::size_t i = n - 1; i-- > 0;)
        precision[i] = std::max(precision[i], precision[i + 1]);

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (recall[i] > prev_recall) {
            ap += (recall[i] - prev_recall) * precision[i];
            prev_recall = recall[i];
        }
    }
    return ap;
}

PRPoint precision_recall(const std::vector<bool>& tp_flags, int n_truth) {
    PRPoint p;
    int tp = 0;
    for (const bool f : tp_flags)
        if (f) ++tp;
    if (tp_flags.empty()) {
        // no detections: recall 0, precision reported 1.0 by convention
        p.precision = 1.0;
        p.precision_defined = false;
        p.recall = 0.0;
        return p;
    }
    p.precision = double(tp) / double(tp_flags.size());
    p.recall = n_truth > 0 ? double(tp) / double(n_truth) : 0.0;
    return p;
}

PRCurve pr_curve(const std::vector<bool>& tp_flags, int n_truth) {
    PRCurve curve;
    curve.ap = average_precision(tp_flags, n_truth);
    int tp = 0;
    for (std::size_t i = 0; i < tp_flags.size(); ++i) {
        if (tp_flags[i]) ++tp;
        curve.precision.push_back(double(tp) / double(i + 1));
        curve.recall.push_back(n_truth > 0 ? double(tp) / double(n_truth) : 0.0);
    }
    return curve;
}

} // namespace selflearn
