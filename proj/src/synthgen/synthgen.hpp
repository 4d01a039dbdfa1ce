#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace selflearn {

// Scene parameters for the deterministic synthetic sports-video generator.
// The same seed always produces a byte-identical corpus.
struct SceneConfig {
    int frame_w = 320;
    int frame_h = 180;
    int train_sequences = 1;
    int train_frames = 60;
    int test_sequences = 0;
    int test_frames = 0;
    int players_min = 4;
    int players_max = 6;
    double height_mean = 40.0;
    double height_std = 5.0;
    double height_min = 28.0;
    double height_max = 54.0;
    double aspect = 0.5; // box width / height
    double velocity_max = 2.0;
    double accel_noise = 0.3;
    double pan_speed = 0.8;
    bool occlusion = true;
    double illumination_amp = 0.25;
    int illumination_period = 100;
    double blur_prob = 0.3;
    double noise_std = 8.0;
    bool hard_mode = false; // palettes share a colour
    std::uint64_t seed = 1;
    std::vector<std::string> teams = {"red", "blue", "ref"};

    void apply(const std::map<std::string, std::string>& kv);
    void validate() const;
    static SceneConfig from_file(const std::string& path);

    // "small": one 60-frame training sequence for unit tests.
    // "acceptance": 3 train sequences x 300 frames + 2 test x 200.
    static SceneConfig preset(const std::string& name);
};

struct GeneratedCorpus {
    std::string train_root;
    std::string test_root; // empty when the config has no test sequences
};

// Renders frames, ground-truth annotations and figure-ground masks under
// <out_dir>/train (and <out_dir>/test when configured).
GeneratedCorpus generate_corpus(const SceneConfig& config, const std::string& out_dir,
                                int workers);

} // namespace selflearn
