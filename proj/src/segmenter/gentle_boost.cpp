#include "segmenter/gentle_boost.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/serialize.hpp"

namespace selflearn {

void pixel_features(const ImageU8& image, int x, int y, float* out) {
    const std::uint8_t r = image.at(x, y, 0);
    const std::uint8_t g = image.at(x, y, 1);
    const std::uint8_t b = image.at(x, y, 2);
    out[0] = r / 255.0f;
    out[1] = g / 255.0f;
    out[2] = b / 255.0f;
    double h, s, v;
    rgb_to_hsv(r, g, b, h, s, v);
    out[3] = float(h / 360.0);
    out[4] = float(s);
    out[5] = float(v);

    for (int c = 0; c < 3; ++c) {
        double sum = 0.0, sum2 = 0.0;
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy) {
            const int yy = std::clamp(y + dy, 0, image.height - 1);
            for (int dx = -1; dx <= 1; ++dx) {
                const int xx = std::clamp(x + dx, 0, image.width - 1);
                const double val = image.at(xx, yy, c) / 255.0;
                sum += val;
                sum2 += val * val;
                ++n;
            }
        }
        const double mean = sum / n;
        const double var = std::max(0.0, sum2 / n - mean * mean);
        out[6 + c] = float(mean);
        out[9 + c] = float(std::sqrt(var));
    }
}

std::vector<float> pixel_feature_map(const ImageU8& image) {
    if (image.channels != 3) throw SlfError("pixel features need an RGB image");
    std::vector<float> out(std::size_t(image.width) * image.height * kPixelFeatureDim);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            pixel_features(image, x, y, out.data() +
                                            (std::size_t(y) * image.width + x) * kPixelFeatureDim);
    return out;
}

float RegressionTree::predict(const float* f) const {
    int idx = 0;
    for (;;) {
        const TreeNode& n = nodes[std::size_t(idx)];
        if (n.feature < 0) return n.value;
        idx = f[n.feature] <= n.threshold ? n.left : n.right;
    }
}

double GentleBoostModel::decision(const float* f) const {
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(f);
    return sum;
}

namespace {

struct SplitResult {
    int feature = -1;
    float threshold = 0.0f;
    double gain = 0.0;
};

// Histogram-based weighted least-squares split search.
SplitResult best_split(const std::vector<float>& features, const std::vector<double>& weights,
                       const std::vector<double>& targets, const std::vector<std::uint32_t>& idx,
                       int min_leaf) {
    constexpr int kBins = 64;
    SplitResult best;

    double w_total = 0.0, wy_total = 0.0;
    for (const auto i : idx) {
        w_total += weights[i];
        wy_total += weights[i] * targets[i];
    }
    if (w_total <= 0.0) return best;
    const double base_score = wy_total * wy_total / w_total;

    for (int f = 0; f < kPixelFeatureDim; ++f) {
        float lo = std::numeric_limits<float>::max();
        float hi = std::numeric_limits<float>::lowest();
        for (const auto i : idx) {
            const float v = features[std::size_t(i) * kPixelFeatureDim + f];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(hi > lo)) continue;
        const float inv_span = float(kBins) / (hi - lo);

        double w_bin[kBins] = {0};
        double wy_bin[kBins] = {0};
        std::uint32_t n_bin[kBins] = {0};
        for (const auto i : idx) {
            const float v = features[std::size_t(i) * kPixelFeatureDim + f];
            int b = int((v - lo) * inv_span);
            b = std::clamp(b, 0, kBins - 1);
            w_bin[b] += weights[i];
            wy_bin[b] += weights[i] * targets[i];
            n_bin[b]++;
        }

        double wl = 0.0, wyl = 0.0;
        std::uint32_t nl = 0;
        for (int b = 0; b < kBins - 1; ++b) {
            wl += w_bin[b];
            wyl += wy_bin[b];
            nl += n_bin[b];
            const std::uint32_t nr = std::uint32_t(idx.size()) - nl;
            if (nl < std::uint32_t(min_leaf) || nr < std::uint32_t(min_leaf)) continue;
            const double wr = w_total - wl;
            const double wyr = wy_total - wyl;
            if (wl <= 0.0 || wr <= 0.0) continue;
            const double score = wyl * wyl / wl + wyr * wyr / wr;
            const double gain = score - base_score;
            if (gain > best.gain + 1e-12) {
                best.gain = gain;
                best.feature = f;
                best.threshold = lo + (hi - lo) * float(b + 1) / float(kBins);
            }
        }
    }
    return best;
}

int build_tree(RegressionTree& tree, const std::vector<float>& features,
               const std::vector<double>& weights, const std::vector<double>& targets,
               std::vector<std::uint32_t>& idx, int depth, const GentleBoostConfig& cfg) {
    double w_total = 0.0, wy_total = 0.0;
    for (const auto i : idx) {
        w_total += weights[i];
        wy_total += weights[i] * targets[i];
    }
    const float leaf_value = w_total > 0.0 ? float(wy_total / w_total) : 0.0f;

    const int max_depth = cfg.stumps ? 1 : cfg.max_depth;
    if (depth >= max_depth || int(idx.size()) < 2 * cfg.min_samples_leaf) {
        tree.nodes.push_back(TreeNode{-1, 0.0f, -1, -1, leaf_value});
        return int(tree.nodes.size()) - 1;
    }

    const SplitResult split = best_split(features, weights, targets, idx, cfg.min_samples_leaf);
    if (split.feature < 0) {
        tree.nodes.push_back(TreeNode{-1, 0.0f, -1, -1, leaf_value});
        return int(tree.nodes.size()) - 1;
    }

    std::vector<std::uint32_t> left_idx, right_idx;
    left_idx.reserve(idx.size());
    right_idx.reserve(idx.size());
    for (const auto i : idx) {
        if (features[std::size_t(i) * kPixelFeatureDim + split.feature] <= split.threshold)
            left_idx.push_back(i);
        else
            right_idx.push_back(i);
    }
    if (left_idx.empty() || right_idx.empty()) {
        tree.nodes.push_back(TreeNode{-1, 0.0f, -1, -1, leaf_value});
        return int(tree.nodes.size()) - 1;
    }
    idx.clear();
    idx.shrink_to_fit();

    const int node_idx = int(tree.nodes.size());
    tree.nodes.push_back(TreeNode{std::int16_t(split.feature), split.threshold, -1, -1, 0.0f});
    const int left = build_tree(tree, features, weights, targets, left_idx, depth + 1, cfg);
    const int right = build_tree(tree, features, weights, targets, right_idx, depth + 1, cfg);
    tree.nodes[std::size_t(node_idx)].left = left;
    tree.nodes[std::size_t(node_idx)].right = right;
    return node_idx;
}

} // namespace

GentleBoostModel train_gentleboost(const std::vector<float>& features,
                                   const std::vector<std::int8_t>& labels,
                                   const GentleBoostConfig& cfg) {
    const std::size_t n = labels.size();
    if (n == 0 || features.size() != n * kPixelFeatureDim)
        throw SlfError("gentle boost: feature/label size mismatch");
    bool has_pos = false, has_neg = false;
    for (const auto y : labels) {
        if (y > 0) has_pos = true;
        else has_neg = true;
    }
    if (!has_pos || !has_neg) throw SlfError("gentle boost needs both classes present");
    if (cfg.rounds < 1) throw SlfError("gentle boost needs rounds >= 1");

    std::vector<double> weights(n, 1.0 / double(n));
    std::vector<double> targets(n);
    for (std::size_t i = 0; i < n; ++i) targets[i] = double(labels[i]);

    // running decision values, for the loss trace
    std::vector<double> H(n, 0.0);

    GentleBoostModel model;
    for (int round = 0; round < cfg.rounds; ++round) {
        std::vector<std::uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);

        RegressionTree tree;
        build_tree(tree, features, weights, targets, idx, 0, cfg);

        // Backtracking shrink keeps the exponential loss non-increasing even
        // in degenerate weighted fits.
        double prev_loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) prev_loss += std::exp(-targets[i] * H[i]);
        prev_loss /= double(n);

        std::vector<float> h(n);
        for (std::size_t i = 0; i < n; ++i)
            h[i] = tree.predict(features.data() + i * kPixelFeatureDim);

        double shrink = 1.0;
        double new_loss = 0.0;
        for (int attempt = 0; attempt < 30; ++attempt) {
            new_loss = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                new_loss += std::exp(-targets[i] * (H[i] + shrink * h[i]));
            new_loss /= double(n);
            if (new_loss <= prev_loss * (1.0 + 1e-12)) break;
            shrink *= 0.5;
        }
        if (new_loss > prev_loss * (1.0 + 1e-12)) {
            shrink = 0.0;
            new_loss = prev_loss;
        }
        if (shrink != 1.0)
            for (auto& node : tree.nodes)
                if (node.feature < 0) node.value *= float(shrink);

        for (std::size_t i = 0; i < n; ++i) H[i] += shrink * h[i];
        model.trees.push_back(std::move(tree));
        model.loss_trace.push_back(new_loss);

        // reweight: w <- exp(-y * H), normalized
        double w_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            weights[i] = std::exp(-targets[i] * H[i]);
            w_sum += weights[i];
        }
        if (w_sum <= 0.0) break;
        for (auto& w : weights) w /= w_sum;
    }
    return model;
}

ImageU8 foreground_mask(const GentleBoostModel& model, const ImageU8& image, int workers) {
    if (image.channels != 3) throw SlfError("foreground mask needs an RGB image");
    ImageU8 mask(image.width, image.height, 1);
    parallel_for(std::size_t(image.height), workers, [&](std::size_t y) {
        float f[kPixelFeatureDim];
        std::uint8_t* row = mask.row(int(y));
        for (int x = 0; x < image.width; ++x) {
            pixel_features(image, x, int(y), f);
            row[x] = model.foreground(f) ? 255 : 0;
        }
    });
    return mask;
}

double foreground_score(const ImageU8& mask, const BBox& window) {
    if (mask.channels != 1) throw SlfError("foreground score needs a gray mask");
    if (!mask.contains(window)) throw SlfError("foreground score window outside mask bounds");
    std::int64_t fg = 0;
    for (int y = window.y; y < window.y2(); ++y) {
        const std::uint8_t* row = mask.row(y);
        for (int x = window.x; x < window.x2(); ++x)
            if (row[x] >= 128) ++fg;
    }
    return double(fg) / double(window.area());
}

ForegroundGate fit_gate(const std::vector<double>& scores) {
    if (scores.size() < 2) throw SlfError("foreground gate needs at least two positive instances");
    double mean = 0.0;
    for (const double s : scores) mean += s;
    mean /= double(scores.size());
    double var = 0.0;
    for (const double s : scores) var += (s - mean) * (s - mean);
    var /= double(scores.size()); // population convention
    const double sigma = std::sqrt(var);
    ForegroundGate gate;
    gate.tau_lower = std::clamp(mean - sigma, 0.0, 1.0);
    gate.tau_upper = std::clamp(mean + sigma, 0.0, 1.0);
    return gate;
}

namespace {
constexpr std::uint32_t kBoostMagic = 0x534c4647; // "SLFG"
constexpr std::uint32_t kBoostVersion = 1;
} // namespace

void GentleBoostModel::save(std::ostream& os) const {
    write_u32(os, kBoostMagic);
    write_u32(os, kBoostVersion);
    write_u32(os, std::uint32_t(trees.size()));
    for (const auto& t : trees) {
        write_u32(os, std::uint32_t(t.nodes.size()));
        for (const auto& n : t.nodes) {
            write_i32(os, n.feature);
            write_f32(os, n.threshold);
            write_i32(os, n.left);
            write_i32(os, n.right);
            write_f32(os, n.value);
        }
    }
    write_u64(os, loss_trace.size());
    for (const double v : loss_trace) write_f64(os, v);
}

GentleBoostModel GentleBoostModel::load(std::istream& is) {
    if (read_u32(is) != kBoostMagic) throw SlfError("not a segmentation model stream");
    const std::uint32_t version = read_u32(is);
    if (version != kBoostVersion)
        throw SlfError("segmentation model version mismatch: have " + std::to_string(version) +
                       ", expected " + std::to_string(kBoostVersion));
    GentleBoostModel m;
    const std::uint32_t n_trees = read_u32(is);
    for (std::uint32_t t = 0; t < n_trees; ++t) {
        RegressionTree tree;
        const std::uint32_t n_nodes = read_u32(is);
        for (std::uint32_t i = 0; i < n_nodes; ++i) {
            TreeNode node;
            node.feature = std::int16_t(read_i32(is));
            node.threshold = read_f32(is);
            node.left = read_i32(is);
            node.right = read_i32(is);
            node.value = read_f32(is);
            tree.nodes.push_back(node);
        }
        m.trees.push_back(std::move(tree));
    }
    const std::uint64_t n_loss = read_u64(is);
    for (std::uint64_t i = 0; i < n_loss; ++i) m.loss_trace.push_back(read_f64(is));
    return m;
}

} // namespace selflearn
