#include "synthgen/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/annotation.hpp"
#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/image.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace fs = std::filesystem;

namespace selflearn {

void SceneConfig::apply(const std::map<std::string, std::string>& kv) {
    std::vector<std::string> problems;
    auto geti = [&](const std::string& k, const std::string& v, int& out) {
        try {
            out = std::stoi(v);
        } catch (...) {
            problems.push_back(k + ": expected integer, got '" + v + "'");
        }
    };
    auto getd = [&](const std::string& k, const std::string& v, double& out) {
        try {
            out = std::stod(v);
        } catch (...) {
            problems.push_back(k + ": expected number, got '" + v + "'");
        }
    };
    auto getb = [&](const std::string& k, const std::string& v, bool& out) {
        if (v == "true" || v == "1") out = true;
        else if (v == "false" || v == "0") out = false;
        else problems.push_back(k + ": expected true/false, got '" + v + "'");
    };

    for (const auto& [key, value] : kv) {
        if (key == "frame_w") geti(key, value, frame_w);
        else if (key == "frame_h") geti(key, value, frame_h);
        else if (key == "train_sequences") geti(key, value, train_sequences);
        else if (key == "train_frames") geti(key, value, train_frames);
        else if (key == "test_sequences") geti(key, value, test_sequences);
        else if (key == "test_frames") geti(key, value, test_frames);
        else if (key == "players_min") geti(key, value, players_min);
        else if (key == "players_max") geti(key, value, players_max);
        else if (key == "height_mean") getd(key, value, height_mean);
        else if (key == "height_std") getd(key, value, height_std);
        else if (key == "height_min") getd(key, value, height_min);
        else if (key == "height_max") getd(key, value, height_max);
        else if (key == "aspect") getd(key, value, aspect);
        else if (key == "velocity_max") getd(key, value, velocity_max);
        else if (key == "accel_noise") getd(key, value, accel_noise);
        else if (key == "pan_speed") getd(key, value, pan_speed);
        else if (key == "occlusion") getb(key, value, occlusion);
        else if (key == "illumination_amp") getd(key, value, illumination_amp);
        else if (key == "illumination_period") geti(key, value, illumination_period);
        else if (key == "blur_prob") getd(key, value, blur_prob);
        else if (key == "noise_std") getd(key, value, noise_std);
        else if (key == "hard_mode") getb(key, value, hard_mode);
        else if (key == "seed") {
            try {
                seed = std::stoull(value);
            } catch (...) {
                problems.push_back("seed: expected unsigned integer, got '" + value + "'");
            }
        } else {
            problems.push_back(key + ": unknown scene configuration key");
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid scene configuration:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ValidationError(msg);
    }
}

void SceneConfig::validate() const {
    std::vector<std::string> problems;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) problems.push_back(msg);
    };
    require(frame_w >= 64 && frame_h >= 64, "frame size must be at least 64x64");
    require(train_sequences >= 1 && train_frames >= 1, "at least one training sequence required");
    require(test_sequences >= 0 && test_frames >= 0, "test counts must be >= 0");
    require(players_min >= 1 && players_max >= players_min, "players range must be non-degenerate");
    require(height_min > 4.0 && height_max > height_min, "height range must be non-degenerate");
    require(height_mean > 0.0 && height_std >= 0.0, "height distribution must be valid");
    require(aspect > 0.1 && aspect < 2.0, "aspect must be in (0.1, 2)");
    require(blur_prob >= 0.0 && blur_prob <= 1.0, "blur_prob must be in [0,1]");
    require(illumination_period >= 1, "illumination_period must be >= 1");
    if (!problems.empty()) {
        std::string msg = "invalid scene configuration:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ValidationError(msg);
    }
}

SceneConfig SceneConfig::from_file(const std::string& path) {
    SceneConfig cfg;
    cfg.apply(read_kv_file(path));
    cfg.validate();
    return cfg;
}

SceneConfig SceneConfig::preset(const std::string& name) {
    SceneConfig cfg;
    if (name == "small") {
        cfg.train_sequences = 1;
        cfg.train_frames = 60;
        cfg.test_sequences = 0;
        cfg.test_frames = 0;
        cfg.players_min = 4;
        cfg.players_max = 6;
        return cfg;
    }
    if (name == "acceptance") {
        cfg.train_sequences = 3;
        cfg.train_frames = 300;
        cfg.test_sequences = 2;
        cfg.test_frames = 200;
        cfg.players_min = 5;
        cfg.players_max = 7;
        return cfg;
    }
    throw ValidationError("unknown corpus preset: " + name);
}

namespace {

struct RGB {
    std::uint8_t r, g, b;
};

struct Palette {
    RGB torso;
    RGB patch; // chest patch
    RGB limbs;
};

Palette team_palette(std::size_t team_idx, bool hard_mode) {
    // red-ish, blue-ish, referee yellow, then generated hues
    switch (team_idx) {
        case 0: return Palette{{200, 40, 40}, {235, 230, 225}, {50, 45, 60}};
        case 1:
            if (hard_mode) // share the red accent with team 0
                return Palette{{45, 70, 200}, {200, 40, 40}, {50, 45, 60}};
            return Palette{{45, 70, 200}, {235, 230, 225}, {50, 45, 60}};
        case 2: return Palette{{225, 205, 55}, {35, 35, 35}, {50, 45, 60}};
        default: {
            const std::uint8_t g = std::uint8_t(60 + (team_idx * 67) % 160);
            return Palette{{g, std::uint8_t(255 - g), 90}, {235, 230, 225}, {50, 45, 60}};
        }
    }
}

struct PlayerState {
    double x, y;   // box top-left
    double vx, vy;
    double w, h;
    int team = 0;
    double phase = 0.0;
    double shade = 1.0; // per-player brightness jitter
    double torso_width = 0.7;
};

struct FramePlan {
    std::vector<PlayerState> players;
    double illumination = 1.0;
    bool blur = false;
    double pan = 0.0;
};

std::uint8_t scale8(std::uint8_t v, double k) {
    return std::uint8_t(std::clamp(std::lround(v * k), 0L, 255L));
}

void put_px(ImageU8& img, ImageU8& mask, int x, int y, RGB c, bool foreground) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    std::uint8_t* p = img.row(y) + std::size_t(x) * 3;
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
    if (foreground) mask.at(x, y, 0) = 255;
}

void fill_rect(ImageU8& img, ImageU8& mask, double x0, double y0, double x1, double y1, RGB c,
               bool foreground) {
    for (int y = int(std::floor(y0)); y < int(std::ceil(y1)); ++y)
        for (int x = int(std::floor(x0)); x < int(std::ceil(x1)); ++x)
            put_px(img, mask, x, y, c, foreground);
}

void fill_ellipse(ImageU8& img, ImageU8& mask, double cx, double cy, double rx, double ry, RGB c,
                  bool foreground) {
    for (int y = int(std::floor(cy - ry)); y <= int(std::ceil(cy + ry)); ++y)
        for (int x = int(std::floor(cx - rx)); x <= int(std::ceil(cx + rx)); ++x) {
            const double dx = (x + 0.5 - cx) / rx;
            const double dy = (y + 0.5 - cy) / ry;
            if (dx * dx + dy * dy <= 1.0) put_px(img, mask, x, y, c, foreground);
        }
}

constexpr int kCrowdBand = 22; // pixels of spectator clutter at the top

void draw_background(ImageU8& img, double pan, Rng& noise_rng, double illum, double noise_std) {
    const RGB ice{196, 206, 214};
    for (int y = 0; y < img.height; ++y) {
        std::uint8_t* row = img.row(y);
        const bool crowd = y < kCrowdBand;
        for (int x = 0; x < img.width; ++x) {
            RGB c;
            if (crowd) {
                // dark noisy spectator band
                const int v = 40 + ((x * 7919 + y * 104729) % 60);
                c = RGB{std::uint8_t(v + 20), std::uint8_t(v), std::uint8_t(v)};
            } else {
                c = ice;
                const double wx = x + pan; // world coordinate under the pan
                const long stripe = std::lround(wx) / 40;
                if (stripe % 2 == 0) {
                    c.r = std::uint8_t(c.r - 6);
                    c.g = std::uint8_t(c.g - 6);
                    c.b = std::uint8_t(c.b - 6);
                }
                const double line_pos = std::fmod(std::fmod(wx, 160.0) + 160.0, 160.0);
                if (line_pos < 3.0) c = RGB{170, 80, 80};        // red line
                else if (std::fabs(line_pos - 80.0) < 1.5) c = RGB{80, 90, 170}; // blue line
                if (y > img.height - 4) c = RGB{120, 120, 130};  // near board shadow
            }
            const double n = noise_rng.normal(0.0, noise_std);
            row[std::size_t(x) * 3 + 0] = std::uint8_t(std::clamp(std::lround(c.r * illum + n), 0L, 255L));
            row[std::size_t(x) * 3 + 1] = std::uint8_t(std::clamp(std::lround(c.g * illum + n), 0L, 255L));
            row[std::size_t(x) * 3 + 2] = std::uint8_t(std::clamp(std::lround(c.b * illum + n), 0L, 255L));
        }
    }
}

void draw_player(ImageU8& img, ImageU8& mask, const PlayerState& p, const Palette& pal,
                 double illum, double t) {
    const double k = p.shade * illum;
    const RGB torso{scale8(pal.torso.r, k), scale8(pal.torso.g, k), scale8(pal.torso.b, k)};
    const RGB patch{scale8(pal.patch.r, k), scale8(pal.patch.g, k), scale8(pal.patch.b, k)};
    const RGB limbs{scale8(pal.limbs.r, k), scale8(pal.limbs.g, k), scale8(pal.limbs.b, k)};
    const RGB skin{scale8(222, k), scale8(190, k), scale8(160, k)};

    // legs swing against each other
    const double swing = 0.13 * p.w * std::sin(p.phase + t * 0.55);
    const double leg_w = 0.24 * p.w;
    const double leg_top = p.y + 0.52 * p.h;
    const double l1 = p.x + 0.30 * p.w + swing - leg_w / 2;
    const double l2 = p.x + 0.70 * p.w - swing - leg_w / 2;
    fill_rect(img, mask, l1, leg_top, l1 + leg_w, p.y + p.h, limbs, true);
    fill_rect(img, mask, l2, leg_top, l2 + leg_w, p.y + p.h, limbs, true);

    // torso in the team colour
    const double tcx = p.x + 0.5 * p.w;
    const double tcy = p.y + 0.34 * p.h;
    fill_ellipse(img, mask, tcx, tcy, 0.5 * p.torso_width * p.w, 0.27 * p.h, torso, true);
    // chest patch, the most team-discriminative part
    fill_rect(img, mask, tcx - 0.16 * p.w, p.y + 0.22 * p.h, tcx + 0.16 * p.w, p.y + 0.38 * p.h,
              patch, true);
    // head
    fill_ellipse(img, mask, tcx, p.y + 0.09 * p.h, 0.13 * p.w, 0.08 * p.h, skin, true);
}

void box_blur3(ImageU8& img) {
    ImageU8 src = img;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                int sum = 0, n = 0;
                for (int dy = -1; dy <= 1; ++dy) {
                    const int yy = std::clamp(y + dy, 0, img.height - 1);
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int xx = std::clamp(x + dx, 0, img.width - 1);
                        sum += src.at(xx, yy, c);
                        ++n;
                    }
                }
                img.at(x, y, c) = std::uint8_t(sum / n);
            }
        }
    }
}

// Sequential trajectory simulation; rendering is parallel afterwards.
std::vector<FramePlan> simulate_sequence(const SceneConfig& cfg, Rng rng, int frames) {
    const int n_players = rng.randint(cfg.players_min, cfg.players_max);
    const double y_min = kCrowdBand + 1;

    std::vector<PlayerState> players;
    for (int i = 0; i < n_players; ++i) {
        PlayerState p;
        p.h = std::clamp(rng.normal(cfg.height_mean, cfg.height_std), cfg.height_min,
                         cfg.height_max);
        p.w = std::max(4.0, cfg.aspect * p.h);
        p.x = rng.uniform(1.0, cfg.frame_w - p.w - 2.0);
        p.y = rng.uniform(y_min, cfg.frame_h - p.h - 2.0);
        p.vx = rng.uniform(-cfg.velocity_max, cfg.velocity_max);
        p.vy = rng.uniform(-cfg.velocity_max, cfg.velocity_max);
        // first players cover every team so training labels always span them
        p.team = i < int(cfg.teams.size()) ? i
                                           : (rng.uniform() < 0.85
                                                  ? rng.randint(0, std::max(0, int(cfg.teams.size()) - 2))
                                                  : int(cfg.teams.size()) - 1);
        p.phase = rng.uniform(0.0, 6.283185307179586);
        p.shade = rng.uniform(0.82, 1.12);
        p.torso_width = rng.uniform(0.62, 0.8);
        players.push_back(p);
    }

    const double illum_phase = rng.uniform(0.0, 6.283185307179586);
    double pan = rng.uniform(0.0, 160.0);
    const double pan_dir = rng.uniform() < 0.5 ? -1.0 : 1.0;

    std::vector<FramePlan> plans;
    plans.reserve(std::size_t(frames));
    for (int t = 0; t < frames; ++t) {
        FramePlan plan;
        plan.illumination =
            1.0 + cfg.illumination_amp *
                      std::sin(6.283185307179586 * t / cfg.illumination_period + illum_phase);
        plan.blur = rng.bernoulli(cfg.blur_prob);
        pan += pan_dir * cfg.pan_speed + 0.4 * std::sin(t / 17.0);
        plan.pan = pan;

        for (auto& p : players) {
            p.vx += rng.normal(0.0, cfg.accel_noise);
            p.vy += rng.normal(0.0, cfg.accel_noise);
            p.vx = std::clamp(p.vx, -cfg.velocity_max, cfg.velocity_max);
            p.vy = std::clamp(p.vy, -cfg.velocity_max, cfg.velocity_max);
            p.x += p.vx;
            p.y += p.vy;
            // bounce so the truth box stays fully inside the frame
            if (p.x < 1.0) {
                p.x = 1.0;
                p.vx = std::fabs(p.vx);
            }
            if (p.x + p.w > cfg.frame_w - 1.0) {
                p.x = cfg.frame_w - 1.0 - p.w;
                p.vx = -std::fabs(p.vx);
            }
            if (p.y < y_min) {
                p.y = y_min;
                p.vy = std::fabs(p.vy);
            }
            if (p.y + p.h > cfg.frame_h - 1.0) {
                p.y = cfg.frame_h - 1.0 - p.h;
                p.vy = -std::fabs(p.vy);
            }
        }

        if (!cfg.occlusion) {
            // keep players apart by swapping velocities on near-collision
            for (std::size_t i = 0; i < players.size(); ++i)
                for (std::size_t j = i + 1; j < players.size(); ++j) {
                    auto& a = players[i];
                    auto& b = players[j];
                    const bool overlap_x = a.x < b.x + b.w && b.x < a.x + a.w;
                    const bool overlap_y = a.y < b.y + b.h && b.y < a.y + a.h;
                    if (overlap_x && overlap_y) {
                        std::swap(a.vx, b.vx);
                        std::swap(a.vy, b.vy);
                        const double push = 1.5;
                        if (a.x < b.x) {
                            a.x -= push;
                            b.x += push;
                        } else {
                            a.x += push;
                            b.x -= push;
                        }
                    }
                }
        }

        plan.players = players;
        plans.push_back(std::move(plan));
    }
    return plans;
}

void render_sequence(const SceneConfig& cfg, const std::string& root, const std::string& seq,
                     const std::vector<FramePlan>& plans, const Rng& noise_root, int workers,
                     std::vector<Annotation>& annotations) {
    fs::create_directories(fs::path(root) / "frames" / seq);
    fs::create_directories(fs::path(root) / "masks" / seq);

    parallel_for(plans.size(), workers, [&](std::size_t t) {
        const FramePlan& plan = plans[t];
        ImageU8 frame(cfg.frame_w, cfg.frame_h, 3);
        ImageU8 mask(cfg.frame_w, cfg.frame_h, 1, 0);
        Rng noise = noise_root.stream("frame:" + std::to_string(t));
        draw_background(frame, plan.pan, noise, plan.illumination, cfg.noise_std);

        // painter's order: players lower in the frame draw later
        std::vector<std::size_t> order(plan.players.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return plan.players[a].y + plan.players[a].h < plan.players[b].y + plan.players[b].h;
        });
        for (const auto i : order)
            draw_player(frame, mask, plan.players[i],
                        team_palette(std::size_t(plan.players[i].team), cfg.hard_mode),
                        plan.illumination, double(t));

        if (plan.blur) box_blur3(frame);

        save_png(frame, (fs::path(root) / "frames" / seq / frame_file_name(int(t))).string());
        save_png(mask, (fs::path(root) / "masks" / seq / frame_file_name(int(t))).string());
    });

    for (std::size_t t = 0; t < plans.size(); ++t) {
        const FramePlan& plan = plans[t];
        for (std::size_t i = 0; i < plan.players.size(); ++i) {
            const auto& p = plan.players[i];
            Annotation a;
            a.frame_id = FrameId{seq, int(t)};
            a.box = BBoxF{p.x, p.y, p.w, p.h}.rounded();
            // rounding must never push the box outside the frame
            a.box.x = std::clamp(a.box.x, 0, cfg.frame_w - a.box.w);
            a.box.y = std::clamp(a.box.y, 0, cfg.frame_h - a.box.h);
            a.class_label = ClassLabel::Player;
            a.team_label = cfg.teams[std::size_t(p.team) % cfg.teams.size()];
            a.track_id = int(i);
            a.source = Source::SyntheticTruth;
            annotations.push_back(a);
        }
    }
}

void generate_split(const SceneConfig& cfg, const std::string& root, int sequences, int frames,
                    const std::string& split_label, int workers) {
    fs::create_directories(root);
    std::vector<Annotation> annotations;
    const Rng base(cfg.seed);
    for (int s = 0; s < sequences; ++s) {
        const std::string seq = "seq" + std::to_string(s);
        const std::string label = split_label + ":" + seq;
        const auto plans = simulate_sequence(cfg, base.stream("sim:" + label), frames);
        render_sequence(cfg, root, seq, plans, base.stream("noise:" + label), workers,
                        annotations);
    }
    write_annotations(annotations, (fs::path(root) / "annotations.jsonl").string());
}

} // namespace

GeneratedCorpus generate_corpus(const SceneConfig& config, const std::string& out_dir,
                                int workers) {
    config.validate();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir))
        throw SlfError("cannot create output directory: " + out_dir);

    GeneratedCorpus corpus;
    corpus.train_root = (fs::path(out_dir) / "train").string();
    generate_split(config, corpus.train_root, config.train_sequences, config.train_frames,
                   "train", workers);
    if (config.test_sequences > 0) {
        corpus.test_root = (fs::path(out_dir) / "test").string();
        generate_split(config, corpus.test_root, config.test_sequences, config.test_frames,
                       "test", workers);
    }
    return corpus;
}

} // namespace selflearn
