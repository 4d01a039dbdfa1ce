#pragma once

#include <string>
#include <vector>

#include "core/annotation.hpp"
#include "core/geometry.hpp"

namespace selflearn {

// Detections as written by the detect command: JSON-lines with
// {seq, frame, x, y, w, h, score, prob, team}.
struct DetectionRecord {
    FrameId frame_id;
    BBox box;
    double score = 0.0;
    double prob = 0.0;
    std::string team;
};

std::vector<DetectionRecord> read_detections(const std::string& path);
void write_detections(const std::vector<DetectionRecord>& records, const std::string& path);

} // namespace selflearn
