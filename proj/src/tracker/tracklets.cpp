#include "tracker/tracklets.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace selflearn {

int Tracklet::detected_count() const {
    int n = 0;
    for (const auto& e : entries)
        if (e.origin == WindowOrigin::Detected) ++n;
    return n;
}

AssociationResult associate(const std::vector<BBox>& predicted_boxes,
                            const std::vector<std::string>& track_teams,
                            const std::vector<Detection>& detections, double gate_iou) {
    if (predicted_boxes.size() != track_teams.size())
        throw SlfError("associate: box/team list size mismatch");

    std::vector<Match> pairs;
    for (std::size_t t = 0; t < predicted_boxes.size(); ++t) {
        for (std::size_t d = 0; d < detections.size(); ++d) {
            if (!track_teams[t].empty() && !detections[d].team.empty() &&
                track_teams[t] != detections[d].team)
                continue;
            const double overlap = iou(predicted_boxes[t], detections[d].box);
            if (overlap < gate_iou) continue;
            pairs.push_back(Match{t, d, overlap});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Match& a, const Match& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.track != b.track) return a.track < b.track;
        return a.detection < b.detection;
    });

    AssociationResult res;
    std::vector<bool> track_used(predicted_boxes.size(), false);
    std::vector<bool> det_used(detections.size(), false);
    for (const auto& p : pairs) {
        if (track_used[p.track] || det_used[p.detection]) continue;
        track_used[p.track] = true;
        det_used[p.detection] = true;
        res.matches.push_back(p);
    }
    for (std::size_t t = 0; t < predicted_boxes.size(); ++t)
        if (!track_used[t]) res.unmatched_tracks.push_back(t);
    for (std::size_t d = 0; d < detections.size(); ++d)
        if (!det_used[d]) res.unmatched_detections.push_back(d);
    return res;
}

namespace {

struct ActiveTrack {
    KalmanTrack filter;
    Tracklet tracklet;
    int misses = 0;
    std::map<std::string, int> team_votes;

    ActiveTrack(const BBox& box, double aspect, const TrackerConfig& cfg)
        : filter(box, aspect, cfg) {}

    std::string majority_team() const {
        std::string best;
        int best_votes = 0;
        for (const auto& [team, votes] : team_votes) {
            if (votes > best_votes) {
                best = team;
                best_votes = votes;
            }
        }
        return best;
    }
};

void finalize(ActiveTrack& track, std::vector<Tracklet>& out) {
    auto& entries = track.tracklet.entries;
    // trim the terminal predicted-only tail
    while (!entries.empty() && entries.back().origin == WindowOrigin::Predicted)
        entries.pop_back();
    if (entries.empty()) return;
    track.tracklet.team = track.majority_team();
    out.push_back(std::move(track.tracklet));
}

} // namespace

std::vector<Tracklet> build_tracklets(const std::string& seq, int frame_count,
                                      const FrameDetections& detections, double aspect,
                                      const TrackerConfig& cfg, int first_track_id) {
    std::vector<Tracklet> out;
    std::vector<ActiveTrack> active;
    int next_id = first_track_id;
    static const std::vector<Detection> kNone;

    for (int frame = 0; frame < frame_count; ++frame) {
        const auto it = detections.find(frame);
        const std::vector<Detection>& dets = it == detections.end() ? kNone : it->second;

        std::vector<BBox> predicted(active.size());
        std::vector<std::string> teams(active.size());
        for (std::size_t t = 0; t < active.size(); ++t) {
            active[t].filter.predict();
            predicted[t] = active[t].filter.rounded_box();
            teams[t] = active[t].majority_team();
        }

        const AssociationResult assoc = associate(predicted, teams, dets, cfg.gate_iou);

        for (const auto& m : assoc.matches) {
            ActiveTrack& track = active[m.track];
            const Detection& det = dets[m.detection];
            track.filter.update(det.box);
            track.misses = 0;
            track.team_votes[det.team]++;
            track.tracklet.entries.push_back(
                TrackletEntry{frame, det.box, WindowOrigin::Detected, det.team,
                              int(m.detection)});
        }

        for (const auto t : assoc.unmatched_tracks) {
            ActiveTrack& track = active[t];
            track.misses++;
            if (track.misses <= cfg.max_misses)
                track.tracklet.entries.push_back(
                    TrackletEntry{frame, predicted[t], WindowOrigin::Predicted, "", -1});
        }

        // retire tracks that outlived their miss budget
        std::vector<ActiveTrack> kept;
        kept.reserve(active.size());
        for (auto& track : active) {
            if (track.misses > cfg.max_misses)
                finalize(track, out);
            else
                kept.push_back(std::move(track));
        }
        active = std::move(kept);

        for (const auto d : assoc.unmatched_detections) {
            const Detection& det = dets[d];
            ActiveTrack track(det.box, aspect, cfg);
            track.tracklet.id = next_id++;
            track.tracklet.seq = seq;
            track.team_votes[det.team]++;
            track.tracklet.entries.push_back(
                TrackletEntry{frame, det.box, WindowOrigin::Detected, det.team, int(d)});
            active.push_back(std::move(track));
        }
    }

    for (auto& track : active) finalize(track, out);
    std::sort(out.begin(), out.end(),
              [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
    return out;
}

} // namespace selflearn
