#include "selector/selector.hpp"

#include <algorithm>
#include <cmath>

#include "core/parallel.hpp"
#include "detector/detect.hpp"

namespace selflearn {

std::vector<Tracklet> prune_tracklets(const std::vector<Tracklet>& tracklets, int min_len) {
    std::vector<Tracklet> kept;
    for (const auto& t : tracklets)
        if (int(t.length()) >= min_len) kept.push_back(t);
    return kept;
}

std::vector<Candidate> make_candidate_pool(const std::vector<Tracklet>& tracklets,
                                           const std::function<bool(const FrameId&)>& eligible) {
    std::vector<Candidate> pool;
    for (const auto& t : tracklets) {
        for (const auto& e : t.entries) {
            const FrameId frame_id{t.seq, e.frame};
            if (eligible && !eligible(frame_id)) continue;
            Candidate c;
            c.frame_id = frame_id;
            c.box = e.box;
            c.team = t.team;
            c.origin = e.origin;
            c.track_id = t.id;
            pool.push_back(std::move(c));
        }
    }
    return pool;
}

void rescore_candidates(const DetectorModel& model,
                        const std::function<const ImageU8&(const FrameId&)>& frame_provider,
                        std::vector<Candidate>& pool, int workers) {
    // group by frame so images load once
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pool[a].frame_id < pool[b].frame_id;
    });
    std::vector<std::pair<std::size_t, std::size_t>> groups; // [begin, end) into order
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && pool[order[j]].frame_id == pool[order[i]].frame_id) ++j;
        groups.emplace_back(i, j);
        i = j;
    }

    parallel_for(groups.size(), workers, [&](std::size_t g) {
        const auto [begin, end] = groups[g];
        const ImageU8& image = frame_provider(pool[order[begin]].frame_id);
        for (std::size_t k = begin; k < end; ++k) {
            Candidate& c = pool[order[k]];
            BBox box = c.box;
            // clamp windows that drifted past the border during tracking
            box.x = std::clamp(box.x, 0, image.width - 1);
            box.y = std::clamp(box.y, 0, image.height - 1);
            box.w = std::max(1, std::min(box.w, image.width - box.x));
            box.h = std::max(1, std::min(box.h, image.height - box.y));
            c.box = box;
            c.shape_score = score_window(model, image, box).first;
        }
    });

    std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
        return a.shape_score < b.shape_score;
    });
}

std::vector<Annotation> select(std::vector<Candidate>& pool, const ForegroundGate& gate,
                               const std::function<const ImageU8&(const FrameId&)>& mask_provider,
                               int n_max, int session, HarvestReport& report) {
    report.pool_size = int(pool.size());
    report.foreground_histogram.assign(20, 0);
    report.score_histogram.assign(20, 0);

    double lo = 0.0, hi = 1.0;
    if (!pool.empty()) {
        lo = pool.front().shape_score;
        hi = pool.back().shape_score;
        if (!(hi > lo)) hi = lo + 1.0;
    }
    report.score_histogram_lo = lo;
    report.score_histogram_hi = hi;

    std::vector<Annotation> selected;
    for (auto& c : pool) {
        const ImageU8& mask = mask_provider(c.frame_id);
        c.foreground = foreground_score(mask, c.box);

        const int sbin = std::clamp(int((c.shape_score - lo) / (hi - lo) * 20.0), 0, 19);
        report.score_histogram[std::size_t(sbin)]++;
        const int fbin = std::clamp(int(c.foreground * 20.0), 0, 19);
        report.foreground_histogram[std::size_t(fbin)]++;

        if (!gate.admits(c.foreground)) {
            report.gated_out++;
            continue;
        }
        if (int(selected.size()) >= n_max) break;

        Annotation a;
        a.frame_id = c.frame_id;
        a.box = c.box;
        a.class_label = ClassLabel::Player;
        a.team_label = c.team;
        a.track_id = c.track_id;
        a.source = Source::Harvested;
        a.session = session;
        selected.push_back(a);
        report.selected_candidates.push_back(c);
    }
    report.selected = int(selected.size());
    return selected;
}

} // namespace selflearn
