#include "core/label_store.hpp"

#include <algorithm>

namespace selflearn {

LabelStore merge_labels(const LabelStore& store, const std::vector<Annotation>& incoming,
                        double dup_iou) {
    LabelStore out = store;

    std::vector<Annotation> admitted;
    admitted.reserve(incoming.size());
    for (const auto& cand : incoming) {
        bool dup_of_admitted = false;
        if (cand.class_label == ClassLabel::Player) {
            for (const auto& a : admitted) {
                if (a.class_label != ClassLabel::Player) continue;
                if (a.frame_id != cand.frame_id) continue;
                if (iou(a.box, cand.box) >= dup_iou) {
                    dup_of_admitted = true;
                    break;
                }
            }
        }
        if (!dup_of_admitted) admitted.push_back(cand);
    }

    auto conflicts_with_admitted = [&](const Annotation& old) {
        if (old.class_label != ClassLabel::Player) return false;
        for (const auto& a : admitted) {
            if (a.class_label != ClassLabel::Player) continue;
            if (a.frame_id != old.frame_id) continue;
            if (iou(a.box, old.box) >= dup_iou) return true;
        }
        return false;
    };

    std::erase_if(out.labelled, conflicts_with_admitted);
    out.labelled.insert(out.labelled.end(), admitted.begin(), admitted.end());
    return out;
}

} // namespace selflearn
