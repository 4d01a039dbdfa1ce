#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "driver/bundle.hpp"
#include "selector/selector.hpp"

namespace selflearn {

struct SessionRecord {
    int session = 0; // 0 = bootstrap
    std::size_t label_count = 0;
    int tracklets = 0;
    int tracklets_pruned = 0;
    int pool_size = 0;
    int gated_out = 0;
    int harvested = 0;
    std::string bundle_checksum;
    double wall_seconds = 0.0;      // written to the timing sidecar only
    std::optional<double> eval_ap;  // present when an evaluator is attached
};

struct SessionReport {
    std::uint64_t seed = 0;
    std::size_t initial_labels = 0;
    std::vector<SessionRecord> sessions;
};

// Per-frame detections with team labels, the unit passed between the
// detection, tracking and selection stages.
struct FrameResult {
    FrameId frame_id;
    std::vector<Detection> detections;
};

// Trains every model of the bundle from the labelled set alone.
ModelBundle bootstrap(const DatasetIndex& dataset, const LabelStore& store,
                      const RunConfig& config);

using BundleEvaluator = std::function<double(const ModelBundle&)>;

struct SelfLearnResult {
    ModelBundle bundle;
    SessionReport report;
    LabelStore store;
    std::vector<HarvestReport> harvests; // one per session
};

// Runs driver.sessions self-learning sessions: detect on the unlabelled
// frames, classify teams, track, select new labels, merge and retrain the
// detector and team models. Segmenter, gate, scale prior and tracker
// parameters stay frozen at their bootstrap values. Bundles are checkpointed
// under out_dir when it is non-empty.
SelfLearnResult run_self_learning(const DatasetIndex& dataset, const LabelStore& initial_store,
                                  const RunConfig& config, const std::string& out_dir,
                                  const BundleEvaluator& evaluator = nullptr);

// Detection + team classification over a set of frames, parallel across
// frames, deterministic for any worker count.
std::vector<FrameResult> detect_frames(const DatasetIndex& dataset,
                                       const std::vector<FrameId>& frames,
                                       const ModelBundle& bundle, const RunConfig& config);

} // namespace selflearn
