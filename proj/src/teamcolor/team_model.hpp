#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "core/annotation.hpp"
#include "core/config.hpp"
#include "core/image.hpp"
#include "detector/model.hpp"
#include "detector/platt.hpp"
#include "features/hsv_histogram.hpp"

namespace selflearn {

// One-vs-rest linear colour classifier per team label over part-based HSV
// histogram descriptors (root histogram first, then one per part), with a
// fitted sigmoid per label. The latent placements come from the shape
// detector, so no latent optimization happens here.
struct TeamModel {
    std::vector<std::string> labels; // excludes the sentinel "others"
    std::vector<std::vector<float>> weights;
    std::vector<float> biases;
    std::vector<Calibration> calibrations;
    HistogramSizes sizes;

    std::size_t descriptor_dim(std::size_t placements) const {
        return placements * std::size_t(sizes.total());
    }

    double raw_score(std::size_t label_idx, const std::vector<float>& descriptor) const;

    void save(std::ostream& os) const;
    static TeamModel load(std::istream& is);
};

struct TeamTrainingSample {
    FrameId frame_id;
    Placement placement;
    std::string team_label;
};

// Trains one binary colour model per team in `teams`, using detections of
// the other teams plus background windows as negatives. Every team needs at
// least one example; errors name the missing teams.
TeamModel train_team_models(
    const std::vector<std::pair<std::vector<float>, std::string>>& descriptors_with_labels,
    const TeamLabelSet& teams, const HistogramSizes& sizes, double svm_c);

std::vector<float> team_descriptor(const ImageU8& image, const Placement& placement,
                                   const HistogramSizes& sizes);

// Eq-6-style decision: argmax over per-label calibrated posteriors, falling
// back to "others" when the best posterior is below others_threshold.
std::pair<std::string, double> classify_team(const TeamModel& models, const ImageU8& image,
                                             const Placement& placement, double others_threshold);

std::pair<std::string, double> classify_team_descriptor(const TeamModel& models,
                                                        const std::vector<float>& descriptor,
                                                        double others_threshold);

// Drops detections labelled "others"; everything else passes through.
std::vector<Detection> filter_detections(const std::vector<Detection>& detections);

} // namespace selflearn
