#ifndef SELFLEARN_H
#define SELFLEARN_H

/*
 * C API of the selflearn toolkit: weakly-supervised self-learning for
 * player localization in sports video. The library trains a part-based
 * player detector plus team-colour classifiers from a handful of labelled
 * frames and harvests additional training labels from the unlabelled
 * portion of the video by combining detection, colour classification,
 * Kalman tracking and figure-ground segmentation.
 *
 * All functions return slf_status; on failure a thread-local message is
 * available through slf_last_error(). Handles are opaque and must be
 * released with their matching *_free function.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SLF_API __declspec(dllexport)
#else
#define SLF_API __attribute__((visibility("default")))
#endif

typedef enum slf_status {
    SLF_OK = 0,
    SLF_INVALID = 1, /* bad configuration, arguments or input files */
    SLF_ERROR = 2    /* runtime failure */
} slf_status;

typedef struct slf_config slf_config; /* run configuration */
typedef struct slf_scene slf_scene;   /* synthetic scene configuration */
typedef struct slf_bundle slf_bundle; /* trained model bundle */

SLF_API const char* slf_version(void);
SLF_API const char* slf_status_name(slf_status status);

/* Message describing the most recent failure in the calling thread. */
SLF_API const char* slf_last_error(void);

/* Frees strings returned through char** out parameters. */
SLF_API void slf_string_free(char* s);

/* ---- run configuration ------------------------------------------------ */

SLF_API slf_status slf_config_create(slf_config** out);
SLF_API slf_status slf_config_load(const char* path, slf_config** out);
SLF_API slf_status slf_config_set(slf_config* cfg, const char* key, const char* value);
SLF_API slf_status slf_config_validate(const slf_config* cfg);
SLF_API slf_status slf_config_dump(const slf_config* cfg, char** out_text);
SLF_API void slf_config_free(slf_config* cfg);

/* ---- synthetic scene configuration ------------------------------------ */

/* preset may be "small", "acceptance" or NULL for defaults */
SLF_API slf_status slf_scene_create(const char* preset, slf_scene** out);
SLF_API slf_status slf_scene_load(const char* path, slf_scene** out);
SLF_API slf_status slf_scene_set(slf_scene* scene, const char* key, const char* value);
SLF_API void slf_scene_free(slf_scene* scene);

/* ---- pipeline stages --------------------------------------------------- */

/* Renders frames, ground truth and masks under out_dir/train (and
 * out_dir/test when the scene has test sequences). */
SLF_API slf_status slf_generate(const slf_scene* scene, const char* out_dir, int workers);

/* Trains a model bundle from the labelled frames of cfg->dataset.
 * labelled_frames > 0 selects that many fully labelled frames at random
 * (seeded) and treats the rest as unlabelled; 0 keeps the annotation file's
 * own labelled/unlabelled split. Writes bundle_session_0.slfb, the initial
 * label file and report.json under out_dir. */
SLF_API slf_status slf_bootstrap(const slf_config* cfg, int labelled_frames,
                                 const char* out_dir);

/* Bootstrap plus cfg's driver.sessions self-learning sessions. Writes
 * per-session bundles, harvest audits, the final label set, report.json and
 * timing.json under out_dir. */
SLF_API slf_status slf_self_learn(const slf_config* cfg, int labelled_frames,
                                  const char* out_dir);

/* Runs a bundle over every frame of a dataset and writes detections as
 * JSON-lines. dataset may be NULL to use cfg->dataset. */
SLF_API slf_status slf_detect(const slf_config* cfg, const char* bundle_path,
                              const char* dataset, const char* out_path);

/* Evaluates a detections file against ground-truth annotations with the
 * PASCAL VOC criterion. team_filter != 0 drops detections labelled
 * "others" first. Writes a JSON report (AP, PR points, counts) when
 * report_path is non-NULL, a precision/recall CSV when pr_csv_path is
 * non-NULL, and stores the average precision in *ap_out when non-NULL. */
SLF_API slf_status slf_evaluate(const char* detections_path, const char* truth_path,
                                double iou_threshold, int team_filter,
                                const char* report_path, const char* pr_csv_path,
                                double* ap_out);

/* ---- bundle inspection ------------------------------------------------- */

SLF_API slf_status slf_bundle_open(const char* path, slf_bundle** out);
/* JSON description: embedded header plus the file checksum. */
SLF_API slf_status slf_bundle_info(const slf_bundle* bundle, char** out_json);
SLF_API void slf_bundle_free(slf_bundle* bundle);

#ifdef __cplusplus
}
#endif

#endif /* SELFLEARN_H */
