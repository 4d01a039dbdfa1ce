#pragma once

#include <set>
#include <vector>

#include "core/annotation.hpp"

namespace selflearn {

// The evolving labelled set L, the unlabelled frame set U and the candidate
// pool C. Immutable after load; merge_labels returns a new store.
struct LabelStore {
    std::vector<Annotation> labelled;       // L
    std::set<FrameId> labelled_frames;      // frames of the initial L
    std::set<FrameId> unlabelled_frames;    // U, fixed at load time
    std::vector<Annotation> candidate_pool; // C, transient between stages

    std::size_t label_count() const { return labelled.size(); }
};

// Union of the store with `incoming`, prioritizing incoming instances: any
// existing same-frame player annotation with IoU >= dup_iou against an
// admitted incoming one is discarded. Incoming annotations conflicting with
// an earlier admitted incoming one are dropped (stable order).
LabelStore merge_labels(const LabelStore& store, const std::vector<Annotation>& incoming,
                        double dup_iou);

} // namespace selflearn
