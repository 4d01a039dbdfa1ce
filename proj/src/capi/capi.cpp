#include "selflearn/selflearn.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/hash.hpp"
#include "core/serialize.hpp"
#include "driver/bundle.hpp"
#include "driver/experiment.hpp"
#include "synthgen/synthgen.hpp"

using namespace selflearn;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
slf_status guarded(Fn&& fn) {
    try {
        fn();
        return SLF_OK;
    } catch (const ValidationError& e) {
        g_last_error = e.what();
        return SLF_INVALID;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SLF_ERROR;
    } catch (...) {
        g_last_error = "unknown failure";
        return SLF_ERROR;
    }
}

slf_status invalid(const std::string& msg) {
    g_last_error = msg;
    return SLF_INVALID;
}

} // namespace

struct slf_config {
    RunConfig cfg;
};

struct slf_scene {
    SceneConfig cfg;
};

struct slf_bundle {
    ModelBundle bundle;
    std::string path;
};

extern "C" {

const char* slf_version(void) { return "0.1.0"; }

const char* slf_status_name(slf_status status) {
    switch (status) {
        case SLF_OK: return "ok";
        case SLF_INVALID: return "invalid-input";
        case SLF_ERROR: return "runtime-error";
    }
    return "unknown";
}

const char* slf_last_error(void) { return g_last_error.c_str(); }

void slf_string_free(char* s) { delete[] s; }

slf_status slf_config_create(slf_config** out) {
    if (!out) return invalid("out handle is null");
    return guarded([&] { *out = new slf_config{}; });
}

slf_status slf_config_load(const char* path, slf_config** out) {
    if (!out || !path) return invalid("null argument");
    return guarded([&] { *out = new slf_config{RunConfig::from_file(path)}; });
}

slf_status slf_config_set(slf_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return invalid("null argument");
    return guarded([&] { cfg->cfg.apply({{key, value}}); });
}

slf_status slf_config_validate(const slf_config* cfg) {
    if (!cfg) return invalid("null config");
    return guarded([&] { cfg->cfg.validate(); });
}

slf_status slf_config_dump(const slf_config* cfg, char** out_text) {
    if (!cfg || !out_text) return invalid("null argument");
    return guarded([&] { *out_text = dup_string(cfg->cfg.to_text()); });
}

void slf_config_free(slf_config* cfg) { delete cfg; }

slf_status slf_scene_create(const char* preset, slf_scene** out) {
    if (!out) return invalid("out handle is null");
    return guarded([&] {
        *out = preset ? new slf_scene{SceneConfig::preset(preset)} : new slf_scene{};
    });
}

slf_status slf_scene_load(const char* path, slf_scene** out) {
    if (!out || !path) return invalid("null argument");
    return guarded([&] { *out = new slf_scene{SceneConfig::from_file(path)}; });
}

slf_status slf_scene_set(slf_scene* scene, const char* key, const char* value) {
    if (!scene || !key || !value) return invalid("null argument");
    return guarded([&] {
        scene->cfg.apply({{key, value}});
        scene->cfg.validate();
    });
}

void slf_scene_free(slf_scene* scene) { delete scene; }

slf_status slf_generate(const slf_scene* scene, const char* out_dir, int workers) {
    if (!scene || !out_dir) return invalid("null argument");
    return guarded([&] { generate_corpus(scene->cfg, out_dir, workers); });
}

slf_status slf_bootstrap(const slf_config* cfg, int labelled_frames, const char* out_dir) {
    if (!cfg || !out_dir) return invalid("null argument");
    return guarded([&] {
        cfg->cfg.validate();
        run_bootstrap_to_dir(cfg->cfg, labelled_frames, out_dir);
    });
}

slf_status slf_self_learn(const slf_config* cfg, int labelled_frames, const char* out_dir) {
    if (!cfg || !out_dir) return invalid("null argument");
    return guarded([&] {
        cfg->cfg.validate();
        run_selflearn_to_dir(cfg->cfg, labelled_frames, out_dir);
    });
}

slf_status slf_detect(const slf_config* cfg, const char* bundle_path, const char* dataset,
                      const char* out_path) {
    if (!cfg || !bundle_path || !out_path) return invalid("null argument");
    return guarded([&] {
        cfg->cfg.validate();
        detect_to_file(cfg->cfg, bundle_path, dataset ? dataset : "", out_path);
    });
}

slf_status slf_evaluate(const char* detections_path, const char* truth_path,
                        double iou_threshold, int team_filter, const char* report_path,
                        const char* pr_csv_path, double* ap_out) {
    if (!detections_path || !truth_path) return invalid("null argument");
    return guarded([&] {
        const EvalSummary summary = evaluate_detection_file(
            detections_path, truth_path, iou_threshold, team_filter != 0,
            report_path ? report_path : "", pr_csv_path ? pr_csv_path : "");
        if (ap_out) *ap_out = summary.ap;
    });
}

slf_status slf_bundle_open(const char* path, slf_bundle** out) {
    if (!path || !out) return invalid("null argument");
    return guarded([&] { *out = new slf_bundle{ModelBundle::load(path), path}; });
}

slf_status slf_bundle_info(const slf_bundle* bundle, char** out_json) {
    if (!bundle || !out_json) return invalid("null argument");
    return guarded([&] {
        nlohmann::ordered_json j;
        const auto& b = bundle->bundle;
        j["checksum"] = file_checksum(bundle->path);
        j["detector"] = {{"cell_size", b.detector.cell_size},
                         {"root_cells_w", b.detector.root_cells_w},
                         {"root_cells_h", b.detector.root_cells_h},
                         {"components", b.detector.components.size()},
                         {"parts", b.detector.part_count()},
                         {"displacement", b.detector.displacement},
                         {"prior_mean", b.detector.prior.mean},
                         {"prior_stddev", b.detector.prior.stddev}};
        j["calibration"] = {{"A", b.detector_calibration.A}, {"B", b.detector_calibration.B}};
        j["teams"] = b.teams.labels;
        j["segmenter_trees"] = b.segmenter.trees.size();
        j["gate"] = {{"tau_lower", b.gate.tau_lower}, {"tau_upper", b.gate.tau_upper}};
        *out_json = dup_string(j.dump(2));
    });
}

void slf_bundle_free(slf_bundle* bundle) { delete bundle; }

} // extern "C"
