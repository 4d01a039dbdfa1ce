#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/annotation.hpp"

namespace selflearn {

// Plain-text `key = value` file, '#' starts a comment.
std::map<std::string, std::string> read_kv_file(const std::string& path);
std::map<std::string, std::string> parse_kv_text(const std::string& text);

struct FeatureConfig {
    int hue_bins = 10;
    int sat_bins = 10;
    int val_bins = 10;

    int histogram_bins() const { return hue_bins * sat_bins + val_bins; }
};

struct DetectorConfig {
    int cell_size = 8;       // root cell size in pixels; parts use cell_size/2
    int root_cells_w = 3;
    int root_cells_h = 6;
    int parts = 4;
    int components = 1;
    int displacement = 4;    // part displacement radius in part cells
    double deformation_quadratic = 0.05;
    double deformation_linear = 0.0;
    double svm_c = 0.02;
    int latent_rounds = 4;
    double objective_tolerance = 1e-4;
    int mining_passes = 2;
    int negatives_per_frame = 30;
    double negative_iou_max = 0.3;
    int negative_cache = 12000;
    int max_mining_frames = 40;
    double nms_iou = 0.5;
    double prob_threshold = 0.5;
    double scale_step = 1.0905077326652577; // 2^(1/8)

    int root_w_px() const { return root_cells_w * cell_size; }
    int root_h_px() const { return root_cells_h * cell_size; }
};

struct TeamConfig {
    double svm_c = 1.0;
    double others_threshold = 0.5;
};

struct SegmenterConfig {
    int rounds = 150;
    int max_depth = 10;
    bool stumps = false;
    int max_pixels_per_class = 50000;
    int max_mask_frames = 5;
};

struct TrackerConfig {
    double process_noise = 1.0;     // px/frame^2
    double measurement_noise = 2.0; // px
    double gate_iou = 0.3;
    int max_misses = 5;
};

struct SelectorConfig {
    int min_tracklet_length = 10;
    int n_max = 2000;
};

struct DriverConfig {
    int sessions = 5;
    bool warm_start = false;
    bool eval_each_session = false;
};

struct RunConfig {
    std::string dataset;
    std::string out;
    std::uint64_t seed = 1;
    int workers = 0; // 0 = all cores
    std::vector<std::string> teams = {"red", "blue", "ref"};

    FeatureConfig features;
    DetectorConfig detector;
    TeamConfig team;
    SegmenterConfig segmenter;
    TrackerConfig tracker;
    SelectorConfig selector;
    double merge_dup_iou = 0.5;
    DriverConfig driver;
    double eval_iou = 0.5;

    TeamLabelSet team_label_set() const { return TeamLabelSet(teams); }

    // Applies key/value pairs; collects unknown keys and bad values.
    // Throws ValidationError listing every offending key.
    void apply(const std::map<std::string, std::string>& kv);
    void validate() const;

    static RunConfig from_file(const std::string& path);
    std::string to_text() const;
};

} // namespace selflearn
