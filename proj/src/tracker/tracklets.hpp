#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/annotation.hpp"
#include "detector/model.hpp"
#include "tracker/kalman.hpp"

namespace selflearn {

enum class WindowOrigin { Detected, Predicted };

struct TrackletEntry {
    int frame = 0;
    BBox box;
    WindowOrigin origin = WindowOrigin::Detected;
    std::string team; // per-window team label, empty for predicted gaps
    // index of the source detection in that frame's detection list, -1 for
    // predicted entries
    int detection_index = -1;
};

// Identity-consistent sequence of windows. Frames are strictly increasing;
// gaps appear only as predicted entries; at least one entry is detected.
struct Tracklet {
    int id = 0;
    std::string seq;
    std::string team; // majority vote over detected entries
    std::vector<TrackletEntry> entries;

    std::size_t length() const { return entries.size(); }
    int detected_count() const;
};

struct Match {
    std::size_t track;
    std::size_t detection;
    double iou;
};

struct AssociationResult {
    std::vector<Match> matches;
    std::vector<std::size_t> unmatched_tracks;
    std::vector<std::size_t> unmatched_detections;
};

// Greedy descending-IoU matching between predicted track boxes and
// detections. Pairs below gate_iou or with differing team labels are
// excluded; each side is used at most once.
AssociationResult associate(const std::vector<BBox>& predicted_boxes,
                            const std::vector<std::string>& track_teams,
                            const std::vector<Detection>& detections, double gate_iou);

// Detections per frame index of one sequence, team labels already assigned.
using FrameDetections = std::map<int, std::vector<Detection>>;

std::vector<Tracklet> build_tracklets(const std::string& seq, int frame_count,
                                      const FrameDetections& detections, double aspect,
                                      const TrackerConfig& cfg, int first_track_id = 0);

} // namespace selflearn
