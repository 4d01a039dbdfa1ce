#include "driver/driver.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <set>

#include "core/error.hpp"
#include "core/hash.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "detector/detect.hpp"
#include "detector/train.hpp"

namespace fs = std::filesystem;

namespace selflearn {

namespace {

std::vector<Annotation> player_annotations(const LabelStore& store) {
    std::vector<Annotation> out;
    for (const auto& a : store.labelled)
        if (a.class_label == ClassLabel::Player) out.push_back(a);
    return out;
}

GentleBoostModel train_segmenter(const DatasetIndex& dataset, const LabelStore& store,
                                 const RunConfig& config) {
    // Mask ingestion replaces the paper's interactive pixel labelling: the
    // first few labelled frames that ship a mask file become training data.
    std::vector<FrameId> mask_frames;
    for (const auto& frame : store.labelled_frames) {
        if (dataset.mask_path(frame).empty()) continue;
        mask_frames.push_back(frame);
        if (int(mask_frames.size()) >= config.segmenter.max_mask_frames) break;
    }
    if (mask_frames.empty())
        throw SlfError("bootstrap needs a figure-ground mask for at least one labelled frame");

    std::vector<float> fg_features, bg_features;
    for (const auto& frame : mask_frames) {
        const ImageU8 image = dataset.load_frame(frame);
        const ImageU8 mask = load_png(dataset.mask_path(frame));
        if (mask.width != image.width || mask.height != image.height || mask.channels != 1)
            throw ValidationError("mask geometry mismatch for frame " + frame.seq + "/" +
                                  std::to_string(frame.frame));
        float f[kPixelFeatureDim];
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x) {
                pixel_features(image, x, y, f);
                auto& dst = mask.at(x, y, 0) >= 128 ? fg_features : bg_features;
                dst.insert(dst.end(), f, f + kPixelFeatureDim);
            }
    }

    // seeded uniform subsample per class
    auto subsample = [&](std::vector<float>& feats, const std::string& label) {
        const std::size_t n = feats.size() / kPixelFeatureDim;
        const std::size_t cap = std::size_t(config.segmenter.max_pixels_per_class);
        if (n <= cap) return;
        Rng rng(Rng::derive(config.seed, Rng::hash_label("segmenter-subsample:" + label)));
        std::vector<std::uint32_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = std::uint32_t(i);
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(idx[i], idx[std::size_t(rng.randint(0, int(i)))]);
        idx.resize(cap);
        std::sort(idx.begin(), idx.end());
        std::vector<float> kept;
        kept.reserve(cap * kPixelFeatureDim);
        for (const auto i : idx)
            kept.insert(kept.end(), feats.begin() + long(i) * kPixelFeatureDim,
                        feats.begin() + long(i + 1) * kPixelFeatureDim);
        feats = std::move(kept);
    };
    subsample(fg_features, "fg");
    subsample(bg_features, "bg");

    const std::size_t n_fg = fg_features.size() / kPixelFeatureDim;
    const std::size_t n_bg = bg_features.size() / kPixelFeatureDim;
    if (n_fg == 0 || n_bg == 0)
        throw SlfError("mask training data is missing one of the classes");

    std::vector<float> features;
    features.reserve(fg_features.size() + bg_features.size());
    features.insert(features.end(), fg_features.begin(), fg_features.end());
    features.insert(features.end(), bg_features.begin(), bg_features.end());
    std::vector<std::int8_t> labels(n_fg + n_bg, 1);
    std::fill(labels.begin() + long(n_fg), labels.end(), std::int8_t(-1));

    GentleBoostConfig boost_cfg;
    boost_cfg.rounds = config.segmenter.rounds;
    boost_cfg.max_depth = config.segmenter.max_depth;
    boost_cfg.stumps = config.segmenter.stumps;
    return train_gentleboost(features, labels, boost_cfg);
}

// Background windows for the one-vs-rest team negatives.
std::vector<BBox> sample_background_windows(const DatasetIndex& dataset, const FrameId& frame,
                                            const std::vector<BBox>& gt, const ScalePrior& prior,
                                            double aspect, int count, Rng& rng, int width,
                                            int height) {
    (void)dataset;
    std::vector<BBox> out;
    int attempts = 0;
    while (int(out.size()) < count && attempts < count * 20) {
        ++attempts;
        const double h = std::clamp(rng.uniform(prior.lower(), prior.upper()), 8.0,
                                    double(height - 2));
        BBox b;
        b.h = int(std::lround(h));
        b.w = std::max(2, int(std::lround(aspect * h)));
        if (b.w >= width || b.h >= height) continue;
        b.x = rng.randint(0, width - b.w - 1);
        b.y = rng.randint(0, height - b.h - 1);
        bool overlaps = false;
        for (const auto& g : gt)
            if (iou(b, g) >= 0.3) {
                overlaps = true;
                break;
            }
        if (!overlaps) out.push_back(b);
    }
    return out;
}

TeamModel train_teams(const DatasetIndex& dataset, const LabelStore& store,
                      const ModelBundle& bundle, const RunConfig& config) {
    const TeamLabelSet team_set = config.team_label_set();
    const HistogramSizes sizes{config.features.hue_bins, config.features.sat_bins,
                               config.features.val_bins};

    std::map<FrameId, std::vector<std::size_t>> by_frame;
    std::vector<Annotation> players = player_annotations(store);
    for (std::size_t i = 0; i < players.size(); ++i) by_frame[players[i].frame_id].push_back(i);
    const std::vector<std::pair<FrameId, std::vector<std::size_t>>> groups(by_frame.begin(),
                                                                           by_frame.end());

    std::vector<std::vector<std::pair<std::vector<float>, std::string>>> per_group(groups.size());
    const Rng bg_root(Rng::derive(config.seed, Rng::hash_label("team-background")));
    parallel_for(groups.size(), config.workers, [&](std::size_t g) {
        const auto& [frame, idxs] = groups[g];
        const ImageU8 image = dataset.load_frame(frame);
        std::vector<BBox> gt;
        for (const auto i : idxs) gt.push_back(players[i].box);

        for (const auto i : idxs) {
            const auto [score, placement] = score_window(bundle.detector, image, players[i].box);
            (void)score;
            per_group[g].emplace_back(team_descriptor(image, placement, sizes),
                                      players[i].team_label);
        }

        // background windows act as negatives for every team model
        if (store.labelled_frames.count(frame)) {
            Rng rng = bg_root.stream(frame.seq + "/" + std::to_string(frame.frame));
            const int n_bg = std::max(2, int(idxs.size()));
            for (const auto& box :
                 sample_background_windows(dataset, frame, gt, bundle.detector.prior,
                                           bundle.detector.aspect(), n_bg, rng, image.width,
                                           image.height)) {
                const auto [score, placement] = score_window(bundle.detector, image, box);
                (void)score;
                per_group[g].emplace_back(team_descriptor(image, placement, sizes),
                                          "(background)");
            }
        }
    });

    std::vector<std::pair<std::vector<float>, std::string>> samples;
    for (auto& g : per_group)
        for (auto& s : g) samples.push_back(std::move(s));

    return train_team_models(samples, team_set, sizes, config.team.svm_c);
}

ForegroundGate fit_gate_from_store(const DatasetIndex& dataset, const LabelStore& store,
                                   const ModelBundle& bundle, const RunConfig& config) {
    const std::vector<Annotation> players = player_annotations(store);
    std::map<FrameId, std::vector<std::size_t>> by_frame;
    for (std::size_t i = 0; i < players.size(); ++i) by_frame[players[i].frame_id].push_back(i);
    const std::vector<std::pair<FrameId, std::vector<std::size_t>>> groups(by_frame.begin(),
                                                                           by_frame.end());

    std::vector<std::vector<double>> per_group(groups.size());
    parallel_for(groups.size(), config.workers, [&](std::size_t g) {
        const auto& [frame, idxs] = groups[g];
        const ImageU8 image = dataset.load_frame(frame);
        const ImageU8 mask = foreground_mask(bundle.segmenter, image, 1);
        for (const auto i : idxs) per_group[g].push_back(foreground_score(mask, players[i].box));
    });

    std::vector<double> scores;
    for (const auto& g : per_group) scores.insert(scores.end(), g.begin(), g.end());
    return fit_gate(scores);
}

void validate_bootstrap_inputs(const LabelStore& store, const RunConfig& config) {
    if (store.labelled.empty()) throw SlfError("bootstrap needs a non-empty labelled set");
    std::set<std::string> seen;
    for (const auto& a : store.labelled)
        if (a.class_label == ClassLabel::Player) seen.insert(a.team_label);
    std::vector<std::string> missing;
    for (const auto& t : config.teams)
        if (!seen.count(t)) missing.push_back(t);
    if (!missing.empty()) {
        std::string msg = "labelled set lacks team(s):";
        for (const auto& m : missing) msg += " " + m;
        throw SlfError(msg);
    }
}

TrainedDetector train_detector(const DatasetIndex& dataset, const LabelStore& store,
                               const ScalePrior& prior, const RunConfig& config,
                               std::uint64_t seed, const DetectorModel* warm = nullptr) {
    const std::vector<FrameId> negative_frames(store.labelled_frames.begin(),
                                               store.labelled_frames.end());
    return train_latent_svm(dataset, player_annotations(store), negative_frames, prior,
                            config.detector, seed, config.workers, warm);
}

} // namespace

ModelBundle bootstrap(const DatasetIndex& dataset, const LabelStore& store,
                      const RunConfig& config) {
    validate_bootstrap_inputs(store, config);

    std::vector<double> heights;
    for (const auto& a : player_annotations(store)) heights.push_back(double(a.box.h));
    const ScalePrior prior = fit_scale_prior(heights);

    ModelBundle bundle;
    bundle.segmenter = train_segmenter(dataset, store, config);

    const TrainedDetector trained =
        train_detector(dataset, store, prior, config, Rng::derive(config.seed, 0));
    bundle.detector = trained.model;
    bundle.detector_calibration = trained.calibration;

    bundle.gate = fit_gate_from_store(dataset, store, bundle, config);
    bundle.teams = train_teams(dataset, store, bundle, config);
    return bundle;
}

std::vector<FrameResult> detect_frames(const DatasetIndex& dataset,
                                       const std::vector<FrameId>& frames,
                                       const ModelBundle& bundle, const RunConfig& config) {
    std::vector<FrameResult> results(frames.size());
    parallel_for(frames.size(), config.workers, [&](std::size_t i) {
        FrameResult& res = results[i];
        res.frame_id = frames[i];
        const ImageU8 image = dataset.load_frame(frames[i]);
        res.detections = detect_frame(bundle.detector, bundle.detector_calibration, image,
                                      bundle.detector.prior, config.detector.scale_step,
                                      config.detector.nms_iou, config.detector.prob_threshold);
        for (auto& det : res.detections) {
            const auto [team, posterior] =
                classify_team(bundle.teams, image, det.placement, config.team.others_threshold);
            det.team = team;
            det.team_posterior = posterior;
        }
    });
    return results;
}

SelfLearnResult run_self_learning(const DatasetIndex& dataset, const LabelStore& initial_store,
                                  const RunConfig& config, const std::string& out_dir,
                                  const BundleEvaluator& evaluator) {
    using clock = std::chrono::steady_clock;

    SelfLearnResult result;
    result.report.seed = config.seed;
    result.report.initial_labels = initial_store.labelled.size();
    result.store = initial_store;

    auto checkpoint = [&](const ModelBundle& bundle, int session) {
        if (out_dir.empty()) return std::string{};
        fs::create_directories(out_dir);
        const std::string path =
            (fs::path(out_dir) / ("bundle_session_" + std::to_string(session) + ".slfb")).string();
        bundle.save(path);
        return file_checksum(path);
    };

    const auto t0 = clock::now();
    result.bundle = bootstrap(dataset, result.store, config);
    {
        SessionRecord rec;
        rec.session = 0;
        rec.label_count = result.store.labelled.size();
        rec.bundle_checksum = checkpoint(result.bundle, 0);
        rec.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
        if (evaluator && config.driver.eval_each_session) rec.eval_ap = evaluator(result.bundle);
        result.report.sessions.push_back(std::move(rec));
    }

    const std::vector<FrameId> unlabelled(result.store.unlabelled_frames.begin(),
                                          result.store.unlabelled_frames.end());

    // Masks are frozen across sessions, so they are computed lazily once.
    std::map<FrameId, ImageU8> mask_cache;
    auto mask_provider = [&](const FrameId& frame) -> const ImageU8& {
        auto it = mask_cache.find(frame);
        if (it == mask_cache.end()) {
            const ImageU8 image = dataset.load_frame(frame);
            it = mask_cache
                     .emplace(frame, foreground_mask(result.bundle.segmenter, image,
                                                     config.workers))
                     .first;
        }
        return it->second;
    };

    for (int session = 1; session <= config.driver.sessions; ++session) {
        const auto session_start = clock::now();

        // Detection + team classification over U
        std::vector<FrameResult> frame_results =
            detect_frames(dataset, unlabelled, result.bundle, config);

        // Team filtering, then group by sequence for tracking
        std::map<std::string, FrameDetections> by_seq;
        for (auto& fr : frame_results) {
            std::vector<Detection> kept = filter_detections(fr.detections);
            if (!kept.empty()) by_seq[fr.frame_id.seq][fr.frame_id.frame] = std::move(kept);
        }

        std::vector<Tracklet> tracklets;
        int next_track_id = 0;
        for (const auto& seq : dataset.sequences) {
            const auto it = by_seq.find(seq.id);
            if (it == by_seq.end()) continue;
            auto seq_tracklets =
                build_tracklets(seq.id, seq.frame_count, it->second,
                                result.bundle.detector.aspect(), config.tracker, next_track_id);
            if (!seq_tracklets.empty()) next_track_id = seq_tracklets.back().id + 1;
            tracklets.insert(tracklets.end(), seq_tracklets.begin(), seq_tracklets.end());
        }

        // Data selection
        HarvestReport harvest;
        harvest.tracklets_in = int(tracklets.size());
        std::vector<Tracklet> survivors =
            prune_tracklets(tracklets, config.selector.min_tracklet_length);
        harvest.tracklets_pruned = int(tracklets.size() - survivors.size());

        std::vector<Candidate> pool = make_candidate_pool(survivors, [&](const FrameId& f) {
            return result.store.unlabelled_frames.count(f) > 0;
        });

        auto frame_provider = [&](const FrameId& frame) -> const ImageU8& {
            thread_local ImageU8 image;
            image = dataset.load_frame(frame);
            return image;
        };
        rescore_candidates(result.bundle.detector, frame_provider, pool, config.workers);

        std::vector<Annotation> harvested = select(pool, result.bundle.gate, mask_provider,
                                                   config.selector.n_max, session, harvest);

        if (harvested.empty()) {
            // fixed point: models retrain on the unchanged labelled set
            std::fprintf(stderr, "warning: session %d harvested zero labels\n", session);
        }

        result.store = merge_labels(result.store, harvested, config.merge_dup_iou);

        // Retrain the detector and team models; segmenter, gate, prior and
        // tracker stay frozen.
        const TrainedDetector retrained = train_detector(
            dataset, result.store, result.bundle.detector.prior, config,
            Rng::derive(config.seed, std::uint64_t(session)),
            config.driver.warm_start ? &result.bundle.detector : nullptr);
        result.bundle.detector = retrained.model;
        result.bundle.detector_calibration = retrained.calibration;
        result.bundle.teams = train_teams(dataset, result.store, result.bundle, config);

        SessionRecord rec;
        rec.session = session;
        rec.label_count = result.store.labelled.size();
        rec.tracklets = harvest.tracklets_in;
        rec.tracklets_pruned = harvest.tracklets_pruned;
        rec.pool_size = harvest.pool_size;
        rec.gated_out = harvest.gated_out;
        rec.harvested = harvest.selected;
        rec.bundle_checksum = checkpoint(result.bundle, session);
        rec.wall_seconds = std::chrono::duration<double>(clock::now() - session_start).count();
        if (evaluator && config.driver.eval_each_session) rec.eval_ap = evaluator(result.bundle);
        result.report.sessions.push_back(std::move(rec));
        result.harvests.push_back(std::move(harvest));
    }

    return result;
}

} // namespace selflearn
