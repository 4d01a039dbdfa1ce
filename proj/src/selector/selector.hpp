#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/annotation.hpp"
#include "core/config.hpp"
#include "detector/model.hpp"
#include "segmenter/gentle_boost.hpp"
#include "tracker/tracklets.hpp"

namespace selflearn {

// One candidate label drawn from a surviving tracklet.
struct Candidate {
    FrameId frame_id;
    BBox box;
    std::string team;
    WindowOrigin origin = WindowOrigin::Detected;
    int track_id = 0;
    double shape_score = 0.0;
    double foreground = 0.0; // a_f
};

struct HarvestReport {
    int tracklets_in = 0;
    int tracklets_pruned = 0;
    int pool_size = 0;
    int gated_out = 0;
    int selected = 0;
    std::vector<int> score_histogram;      // 20 bins over observed score range
    double score_histogram_lo = 0.0;
    double score_histogram_hi = 0.0;
    std::vector<int> foreground_histogram; // 20 bins over [0,1]
    std::vector<Candidate> selected_candidates;
};

std::vector<Tracklet> prune_tracklets(const std::vector<Tracklet>& tracklets, int min_len);

// Pool initialization from surviving tracklets, restricted to eligible
// frames (harvesting never touches the initially labelled ones).
std::vector<Candidate> make_candidate_pool(const std::vector<Tracklet>& tracklets,
                                           const std::function<bool(const FrameId&)>& eligible);

// Scores every candidate window with the shape detector at its own geometry
// and orders the pool by ascending shape confidence (stable).
void rescore_candidates(const DetectorModel& model,
                        const std::function<const ImageU8&(const FrameId&)>& frame_provider,
                        std::vector<Candidate>& pool, int workers);

// Final selection: walk the ascending-confidence pool, admit windows whose
// a_f falls inside the gate, stop at n_max.
std::vector<Annotation> select(std::vector<Candidate>& pool, const ForegroundGate& gate,
                               const std::function<const ImageU8&(const FrameId&)>& mask_provider,
                               int n_max, int session, HarvestReport& report);

} // namespace selflearn
