#pragma once

#include <string>

#include "driver/driver.hpp"

namespace selflearn {

// Experiment workflows shared by the C API and the acceptance suite.

// Keeps only the annotations of m randomly selected labelled frames
// (seeded); every other frame becomes unlabelled.
LabelStore sample_initial_labels(const DatasetIndex& index, const LabelStore& full, int m,
                                 std::uint64_t seed);

struct PreparedRun {
    LoadedDataset data;
};

// Loads cfg.dataset and applies the labelled-frame sampling when
// labelled_frames > 0.
PreparedRun prepare_run(const RunConfig& cfg, int labelled_frames);

// Bootstrap only: writes bundle_session_0.slfb, labels_initial.jsonl and
// report.json under out_dir.
void run_bootstrap_to_dir(const RunConfig& cfg, int labelled_frames, const std::string& out_dir);

// Full self-learning run: per-session bundles and harvest audits,
// labels_final.jsonl, bundle_final.slfb, report.json, timing.json.
SelfLearnResult run_selflearn_to_dir(const RunConfig& cfg, int labelled_frames,
                                     const std::string& out_dir,
                                     const BundleEvaluator& evaluator = nullptr);

// Runs a bundle over every frame of a dataset, writing detections.
void detect_to_file(const RunConfig& cfg, const std::string& bundle_path,
                    const std::string& dataset_root, const std::string& out_path);

struct EvalSummary {
    double ap = 0.0;
    int n_detections = 0;
    int n_truth = 0;
    double precision = 1.0;
    double recall = 0.0;
    bool precision_defined = true;
    bool truth_empty_with_detections = false;
};

EvalSummary evaluate_detection_file(const std::string& detections_path,
                                    const std::string& truth_path, double iou_threshold,
                                    bool team_filter, const std::string& report_path = {},
                                    const std::string& pr_csv_path = {});

} // namespace selflearn
