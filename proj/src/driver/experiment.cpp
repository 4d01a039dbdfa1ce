#include "driver/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/hash.hpp"
#include "core/rng.hpp"
#include "eval/detections_io.hpp"
#include "eval/eval.hpp"

namespace fs = std::filesystem;

namespace selflearn {

namespace {

using nlohmann::ordered_json;

void write_json_file(const ordered_json& j, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SlfError("cannot write " + path);
    out << j.dump(2) << '\n';
}

ordered_json report_json(const SessionReport& report) {
    ordered_json j;
    j["seed"] = report.seed;
    j["initial_labels"] = report.initial_labels;
    j["sessions"] = ordered_json::array();
    for (const auto& s : report.sessions) {
        ordered_json r;
        r["session"] = s.session;
        r["label_count"] = s.label_count;
        if (s.session > 0) {
            r["tracklets"] = s.tracklets;
            r["tracklets_pruned"] = s.tracklets_pruned;
            r["pool_size"] = s.pool_size;
            r["gated_out"] = s.gated_out;
            r["harvested"] = s.harvested;
        }
        r["bundle_checksum"] = s.bundle_checksum;
        if (s.eval_ap) r["ap"] = *s.eval_ap;
        j["sessions"].push_back(std::move(r));
    }
    return j;
}

ordered_json timing_json(const SessionReport& report) {
    ordered_json j;
    double total = 0.0;
    j["sessions"] = ordered_json::array();
    for (const auto& s : report.sessions) {
        total += s.wall_seconds;
        j["sessions"].push_back({{"session", s.session}, {"wall_seconds", s.wall_seconds}});
    }
    j["total_seconds"] = total;
    return j;
}

ordered_json harvest_json(const HarvestReport& h, int session) {
    ordered_json j;
    j["session"] = session;
    j["tracklets_in"] = h.tracklets_in;
    j["tracklets_pruned"] = h.tracklets_pruned;
    j["pool_size"] = h.pool_size;
    j["gated_out"] = h.gated_out;
    j["selected"] = h.selected;
    j["score_histogram"] = {{"lo", h.score_histogram_lo},
                            {"hi", h.score_histogram_hi},
                            {"bins", h.score_histogram}};
    j["foreground_histogram"] = h.foreground_histogram;
    j["selected_windows"] = ordered_json::array();
    for (const auto& c : h.selected_candidates) {
        j["selected_windows"].push_back({{"seq", c.frame_id.seq},
                                         {"frame", c.frame_id.frame},
                                         {"x", c.box.x},
                                         {"y", c.box.y},
                                         {"w", c.box.w},
                                         {"h", c.box.h},
                                         {"team", c.team},
                                         {"origin", c.origin == WindowOrigin::Detected
                                                        ? "detected"
                                                        : "predicted"},
                                         {"track", c.track_id},
                                         {"score", c.shape_score},
                                         {"a_f", c.foreground}});
    }
    return j;
}

} // namespace

LabelStore sample_initial_labels(const DatasetIndex& index, const LabelStore& full, int m,
                                 std::uint64_t seed) {
    std::vector<FrameId> labelled_frames(full.labelled_frames.begin(),
                                         full.labelled_frames.end());
    if (m <= 0 || m > int(labelled_frames.size()))
        throw ValidationError("labelled-frame count " + std::to_string(m) +
                              " is outside the available " +
                              std::to_string(labelled_frames.size()) + " labelled frames");

    Rng rng(Rng::derive(seed, Rng::hash_label("label-frames")));
    for (std::size_t i = labelled_frames.size() - 1; i > 0; --i)
        std::swap(labelled_frames[i], labelled_frames[std::size_t(rng.randint(0, int(i)))]);
    labelled_frames.resize(std::size_t(m));
    const std::set<FrameId> chosen(labelled_frames.begin(), labelled_frames.end());

    LabelStore store;
    for (const auto& a : full.labelled)
        if (chosen.count(a.frame_id)) {
            Annotation human = a;
            human.source = Source::Human; // selected truth becomes the human set
            human.session = 0;
            store.labelled.push_back(std::move(human));
        }
    store.labelled_frames = chosen;
    for (const auto& seq : index.sequences)
        for (int f = 0; f < seq.frame_count; ++f) {
            const FrameId id{seq.id, f};
            if (!chosen.count(id)) store.unlabelled_frames.insert(id);
        }
    return store;
}

PreparedRun prepare_run(const RunConfig& cfg, int labelled_frames) {
    if (cfg.dataset.empty()) throw ValidationError("config is missing the dataset path");
    PreparedRun run{load_dataset(cfg.dataset)};
    if (labelled_frames > 0)
        run.data.store = sample_initial_labels(run.data.index, run.data.store, labelled_frames,
                                               cfg.seed);
    return run;
}

void run_bootstrap_to_dir(const RunConfig& cfg, int labelled_frames, const std::string& out_dir) {
    const PreparedRun run = prepare_run(cfg, labelled_frames);
    fs::create_directories(out_dir);
    write_annotations(run.data.store.labelled,
                      (fs::path(out_dir) / "labels_initial.jsonl").string());

    const ModelBundle bundle = bootstrap(run.data.index, run.data.store, cfg);
    const std::string bundle_path = (fs::path(out_dir) / "bundle_session_0.slfb").string();
    bundle.save(bundle_path);

    SessionReport report;
    report.seed = cfg.seed;
    report.initial_labels = run.data.store.labelled.size();
    SessionRecord rec;
    rec.session = 0;
    rec.label_count = run.data.store.labelled.size();
    rec.bundle_checksum = file_checksum(bundle_path);
    report.sessions.push_back(rec);
    write_json_file(report_json(report), (fs::path(out_dir) / "report.json").string());
}

SelfLearnResult run_selflearn_to_dir(const RunConfig& cfg, int labelled_frames,
                                     const std::string& out_dir,
                                     const BundleEvaluator& evaluator) {
    const PreparedRun run = prepare_run(cfg, labelled_frames);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_annotations(run.data.store.labelled,
                          (fs::path(out_dir) / "labels_initial.jsonl").string());
    }

    SelfLearnResult result =
        run_self_learning(run.data.index, run.data.store, cfg, out_dir, evaluator);

    if (!out_dir.empty()) {
        write_annotations(result.store.labelled,
                          (fs::path(out_dir) / "labels_final.jsonl").string());
        const std::string final_path = (fs::path(out_dir) / "bundle_final.slfb").string();
        result.bundle.save(final_path);
        for (std::size_t i = 0; i < result.harvests.size(); ++i)
            write_json_file(harvest_json(result.harvests[i], int(i) + 1),
                            (fs::path(out_dir) /
                             ("harvest_session_" + std::to_string(i + 1) + ".json"))
                                .string());
        write_json_file(report_json(result.report), (fs::path(out_dir) / "report.json").string());
        write_json_file(timing_json(result.report), (fs::path(out_dir) / "timing.json").string());
    }
    return result;
}

void detect_to_file(const RunConfig& cfg, const std::string& bundle_path,
                    const std::string& dataset_root, const std::string& out_path) {
    const std::string root = dataset_root.empty() ? cfg.dataset : dataset_root;
    if (root.empty()) throw ValidationError("detect needs a dataset path");
    const ModelBundle bundle = ModelBundle::load(bundle_path);

    // annotations are not needed to run detection, but load_dataset indexes
    // frames and validates layout
    const LoadedDataset data = load_dataset(root);

    std::vector<FrameId> frames;
    for (const auto& seq : data.index.sequences)
        for (int f = 0; f < seq.frame_count; ++f) frames.push_back(FrameId{seq.id, f});

    const std::vector<FrameResult> results = detect_frames(data.index, frames, bundle, cfg);

    std::vector<DetectionRecord> records;
    for (const auto& fr : results)
        for (const auto& d : fr.detections) {
            DetectionRecord r;
            r.frame_id = fr.frame_id;
            r.box = d.box;
            r.score = d.score;
            r.prob = d.prob;
            r.team = d.team;
            records.push_back(std::move(r));
        }
    write_detections(records, out_path);
}

EvalSummary evaluate_detection_file(const std::string& detections_path,
                                    const std::string& truth_path, double iou_threshold,
                                    bool team_filter, const std::string& report_path,
                                    const std::string& pr_csv_path) {
    const std::vector<DetectionRecord> records = read_detections(detections_path);
    const std::vector<Annotation> truth = read_annotations(truth_path);

    std::vector<EvalDetection> detections;
    for (const auto& r : records) {
        if (team_filter && r.team == TeamLabelSet::kOthers) continue;
        detections.push_back(EvalDetection{r.frame_id, r.box, r.prob});
    }

    const MatchResult matched = match_detections(detections, truth, iou_threshold);
    EvalSummary summary;
    summary.ap = average_precision(matched.is_tp, matched.n_truth);
    summary.n_detections = int(matched.is_tp.size());
    summary.n_truth = matched.n_truth;
    if (matched.n_truth == 0 && !matched.is_tp.empty()) {
        summary.truth_empty_with_detections = true;
        std::fprintf(stderr, "warning: no ground truth boxes; AP reported as 0\n");
    }
    const PRPoint pr = precision_recall(matched.is_tp, matched.n_truth);
    summary.precision = pr.precision;
    summary.recall = pr.recall;
    summary.precision_defined = pr.precision_defined;

    const PRCurve curve = pr_curve(matched.is_tp, matched.n_truth);
    if (!report_path.empty()) {
        ordered_json j;
        j["ap"] = summary.ap;
        j["n_detections"] = summary.n_detections;
        j["n_truth"] = summary.n_truth;
        j["precision"] = summary.precision;
        j["recall"] = summary.recall;
        j["precision_defined"] = summary.precision_defined;
        j["team_filter"] = team_filter;
        j["iou_threshold"] = iou_threshold;
        j["pr_points"] = ordered_json::array();
        for (std::size_t i = 0; i < curve.precision.size(); ++i)
            j["pr_points"].push_back({{"recall", curve.recall[i]},
                                      {"precision", curve.precision[i]}});
        write_json_file(j, report_path);
    }
    if (!pr_csv_path.empty()) {
        std::ofstream csv(pr_csv_path, std::ios::trunc);
        if (!csv) throw SlfError("cannot write " + pr_csv_path);
        csv << "recall,precision\n";
        csv.precision(10);
        for (std::size_t i = 0; i < curve.precision.size(); ++i)
            csv << curve.recall[i] << ',' << curve.precision[i] << '\n';
    }
    return summary;
}

} // namespace selflearn
