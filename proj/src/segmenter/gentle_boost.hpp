#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "core/image.hpp"

namespace selflearn {

// Per-pixel features: R, G, B, H, S, V plus 3x3 neighbourhood mean and
// standard deviation of each RGB channel. All scaled to roughly [0,1].
constexpr int kPixelFeatureDim = 12;

void pixel_features(const ImageU8& image, int x, int y, float* out);

// All-pixel feature matrix, row-major, width*height rows.
std::vector<float> pixel_feature_map(const ImageU8& image);

// Axis-aligned regression tree stored flat. Leaves have feature == -1.
struct TreeNode {
    std::int16_t feature = -1;
    float threshold = 0.0f;
    std::int32_t left = -1;  // feature value <= threshold
    std::int32_t right = -1;
    float value = 0.0f; // leaf output
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    float predict(const float* features) const;
};

// Gentle Adaboost ensemble: decision value H(d) is the sum of the trees'
// outputs; the binary rule is foreground iff H(d) >= 0.
struct GentleBoostModel {
    std::vector<RegressionTree> trees;
    // Mean exponential loss after each round, recorded during training.
    std::vector<double> loss_trace;

    double decision(const float* features) const;
    bool foreground(const float* features) const { return decision(features) >= 0.0; }

    void save(std::ostream& os) const;
    static GentleBoostModel load(std::istream& is);
};

struct GentleBoostConfig {
    int rounds = 150;
    int max_depth = 10;
    bool stumps = false;
    int min_samples_leaf = 8;
};

// labels are +1 (foreground) / -1 (background); both classes required.
GentleBoostModel train_gentleboost(const std::vector<float>& features,
                                   const std::vector<std::int8_t>& labels,
                                   const GentleBoostConfig& cfg);

// Binary mask of the playing field: 255 where H(d) >= 0, else 0.
ImageU8 foreground_mask(const GentleBoostModel& model, const ImageU8& image, int workers = 1);

// Eq-7 foreground score: fraction of foreground pixels inside the window.
double foreground_score(const ImageU8& mask, const BBox& window);

// tau thresholds from the foreground scores of labelled positives:
// [mu - sigma, mu + sigma], clamped to [0,1]. Population stddev.
struct ForegroundGate {
    double tau_lower = 0.0;
    double tau_upper = 1.0;

    bool admits(double a_f) const { return a_f >= tau_lower && a_f <= tau_upper; }
};

ForegroundGate fit_gate(const std::vector<double>& positive_scores);

} // namespace selflearn
