// Command-line front end. Links only the public C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selflearn/selflearn.h"

namespace {

int fail(slf_status status) {
    std::fprintf(stderr, "error (%s): %s\n", slf_status_name(status), slf_last_error());
    return int(status);
}

struct ConfigGuard {
    slf_config* cfg = nullptr;
    ~ConfigGuard() { slf_config_free(cfg); }
};

struct SceneGuard {
    slf_scene* scene = nullptr;
    ~SceneGuard() { slf_scene_free(scene); }
};

slf_status load_config(const std::string& path, const std::vector<std::string>& overrides,
                       const std::string& dataset, const std::string& seed, int workers,
                       ConfigGuard& guard) {
    slf_status st = path.empty() ? slf_config_create(&guard.cfg)
                                 : slf_config_load(path.c_str(), &guard.cfg);
    if (st != SLF_OK) return st;
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
            return SLF_INVALID;
        }
        st = slf_config_set(guard.cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
        if (st != SLF_OK) return st;
    }
    if (!dataset.empty()) {
        st = slf_config_set(guard.cfg, "dataset", dataset.c_str());
        if (st != SLF_OK) return st;
    }
    if (!seed.empty()) {
        st = slf_config_set(guard.cfg, "seed", seed.c_str());
        if (st != SLF_OK) return st;
    }
    if (workers >= 0) {
        st = slf_config_set(guard.cfg, "workers", std::to_string(workers).c_str());
        if (st != SLF_OK) return st;
    }
    return slf_config_validate(guard.cfg);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"selflearn - weakly-supervised self-learning player localization toolkit"};
    app.require_subcommand(1);

    // ---- generate ----------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "Render a synthetic sports video corpus");
    std::string gen_preset = "small", gen_scene_file, gen_out, gen_seed;
    std::vector<std::string> gen_sets;
    int gen_workers = 0;
    gen->add_option("--preset", gen_preset, "Corpus preset: small | acceptance")
        ->capture_default_str();
    gen->add_option("--scene", gen_scene_file, "Scene configuration file (overrides --preset)");
    gen->add_option("--set", gen_sets, "Override a scene key, key=value (repeatable)");
    gen->add_option("--seed", gen_seed, "Scene seed");
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--workers", gen_workers, "Worker threads (0 = all cores)")
        ->capture_default_str();

    // ---- bootstrap ---------------------------------------------------------
    auto* boot = app.add_subcommand("bootstrap", "Train an initial model bundle from labels");
    std::string boot_config, boot_dataset, boot_out, boot_seed;
    std::vector<std::string> boot_sets;
    int boot_m = 0, boot_workers = -1;
    boot->add_option("--config", boot_config, "Run configuration file");
    boot->add_option("--dataset", boot_dataset, "Dataset root (overrides config)");
    boot->add_option("--labelled-frames", boot_m,
                     "Randomly select this many fully labelled frames (seeded); 0 keeps the "
                     "annotation file's split")
        ->capture_default_str();
    boot->add_option("--set", boot_sets, "Override a config key, key=value (repeatable)");
    boot->add_option("--seed", boot_seed, "Run seed (overrides config)");
    boot->add_option("--workers", boot_workers, "Worker threads (0 = all cores)");
    boot->add_option("--out", boot_out, "Output directory")->required();

    // ---- selflearn ---------------------------------------------------------
    auto* run = app.add_subcommand("selflearn", "Run bootstrap plus self-learning sessions");
    std::string run_config, run_dataset, run_out, run_seed;
    std::vector<std::string> run_sets;
    int run_m = 0, run_workers = -1, run_sessions = -1;
    run->add_option("--config", run_config, "Run configuration file");
    run->add_option("--dataset", run_dataset, "Dataset root (overrides config)");
    run->add_option("--labelled-frames", run_m,
                    "Randomly select this many fully labelled frames (seeded); 0 keeps the "
                    "annotation file's split")
        ->capture_default_str();
    run->add_option("--sessions", run_sessions, "Self-learning session count (overrides config)");
    run->add_option("--set", run_sets, "Override a config key, key=value (repeatable)");
    run->add_option("--seed", run_seed, "Run seed (overrides config)");
    run->add_option("--workers", run_workers, "Worker threads (0 = all cores)");
    run->add_option("--out", run_out, "Output directory")->required();

    // ---- detect ------------------------------------------------------------
    auto* det = app.add_subcommand("detect", "Run a bundle over a dataset, emit detections");
    std::string det_config, det_bundle, det_dataset, det_out, det_seed;
    std::vector<std::string> det_sets;
    int det_workers = -1;
    det->add_option("--config", det_config, "Run configuration file");
    det->add_option("--bundle", det_bundle, "Model bundle file")->required();
    det->add_option("--dataset", det_dataset, "Dataset root")->required();
    det->add_option("--set", det_sets, "Override a config key, key=value (repeatable)");
    det->add_option("--seed", det_seed, "Run seed (overrides config)");
    det->add_option("--workers", det_workers, "Worker threads (0 = all cores)");
    det->add_option("--out", det_out, "Detections output file (JSON-lines)")->required();

    // ---- eval --------------------------------------------------------------
    auto* ev = app.add_subcommand("eval", "Evaluate detections against ground truth (VOC AP)");
    std::string ev_dets, ev_truth, ev_report, ev_csv;
    double ev_iou = 0.5;
    bool ev_team_filter = false;
    ev->add_option("--detections", ev_dets, "Detections file (JSON-lines)")->required();
    ev->add_option("--truth", ev_truth, "Ground-truth annotation file (JSON-lines)")->required();
    ev->add_option("--iou", ev_iou, "Match IoU threshold")->capture_default_str();
    ev->add_flag("--team-filter", ev_team_filter, "Drop detections labelled 'others' first");
    ev->add_option("--report", ev_report, "Write a JSON evaluation report here");
    ev->add_option("--pr-csv", ev_csv, "Write the precision/recall curve as CSV here");

    // ---- inspect -----------------------------------------------------------
    auto* ins = app.add_subcommand("inspect", "Print a model bundle's header and checksum");
    std::string ins_bundle;
    ins->add_option("--bundle", ins_bundle, "Model bundle file")->required();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        SceneGuard scene;
        slf_status st = gen_scene_file.empty()
                            ? slf_scene_create(gen_preset.c_str(), &scene.scene)
                            : slf_scene_load(gen_scene_file.c_str(), &scene.scene);
        if (st != SLF_OK) return fail(st);
        for (const auto& kv : gen_sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
                return 1;
            }
            st = slf_scene_set(scene.scene, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
            if (st != SLF_OK) return fail(st);
        }
        if (!gen_seed.empty()) {
            st = slf_scene_set(scene.scene, "seed", gen_seed.c_str());
            if (st != SLF_OK) return fail(st);
        }
        st = slf_generate(scene.scene, gen_out.c_str(), gen_workers);
        if (st != SLF_OK) return fail(st);
        std::printf("corpus written to %s\n", gen_out.c_str());
        return 0;
    }

    if (boot->parsed()) {
        ConfigGuard cfg;
        slf_status st = load_config(boot_config, boot_sets, boot_dataset, boot_seed,
                                    boot_workers, cfg);
        if (st != SLF_OK) return fail(st);
        st = slf_bootstrap(cfg.cfg, boot_m, boot_out.c_str());
        if (st != SLF_OK) return fail(st);
        std::printf("bootstrap bundle written to %s\n", boot_out.c_str());
        return 0;
    }

    if (run->parsed()) {
        ConfigGuard cfg;
        slf_status st =
            load_config(run_config, run_sets, run_dataset, run_seed, run_workers, cfg);
        if (st != SLF_OK) return fail(st);
        if (run_sessions >= 0) {
            st = slf_config_set(cfg.cfg, "driver.sessions", std::to_string(run_sessions).c_str());
            if (st != SLF_OK) return fail(st);
        }
        st = slf_self_learn(cfg.cfg, run_m, run_out.c_str());
        if (st != SLF_OK) return fail(st);
        std::printf("self-learning artifacts written to %s\n", run_out.c_str());
        return 0;
    }

    if (det->parsed()) {
        ConfigGuard cfg;
        slf_status st =
            load_config(det_config, det_sets, det_dataset, det_seed, det_workers, cfg);
        if (st != SLF_OK) return fail(st);
        st = slf_detect(cfg.cfg, det_bundle.c_str(), det_dataset.c_str(), det_out.c_str());
        if (st != SLF_OK) return fail(st);
        std::printf("detections written to %s\n", det_out.c_str());
        return 0;
    }

    if (ev->parsed()) {
        double ap = 0.0;
        const slf_status st =
            slf_evaluate(ev_dets.c_str(), ev_truth.c_str(), ev_iou, ev_team_filter ? 1 : 0,
                         ev_report.empty() ? nullptr : ev_report.c_str(),
                         ev_csv.empty() ? nullptr : ev_csv.c_str(), &ap);
        if (st != SLF_OK) return fail(st);
        std::printf("AP %.6f\n", ap);
        return 0;
    }

    if (ins->parsed()) {
        slf_bundle* bundle = nullptr;
        slf_status st = slf_bundle_open(ins_bundle.c_str(), &bundle);
        if (st != SLF_OK) return fail(st);
        char* info = nullptr;
        st = slf_bundle_info(bundle, &info);
        if (st != SLF_OK) {
            slf_bundle_free(bundle);
            return fail(st);
        }
        std::printf("%s\n", info);
        slf_string_free(info);
        slf_bundle_free(bundle);
        return 0;
    }

    return 0;
}
