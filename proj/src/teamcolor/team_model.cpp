#include "teamcolor/team_model.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "core/error.hpp"
#include "core/serialize.hpp"
#include "detector/linear_svm.hpp"
#include "features/part_descriptor.hpp"

namespace selflearn {

double TeamModel::raw_score(std::size_t label_idx, const std::vector<float>& descriptor) const {
    const auto& w = weights[label_idx];
    if (w.size() != descriptor.size()) throw SlfError("team descriptor dimensionality mismatch");
    double dot = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) dot += double(w[i]) * descriptor[i];
    return dot + biases[label_idx];
}

std::vector<float> team_descriptor(const ImageU8& image, const Placement& placement,
                                   const HistogramSizes& sizes) {
    std::vector<BBox> windows = placement.all_windows();
    // Clamp part windows that drifted past the frame border; colour stats
    // only need the visible region.
    for (auto& b : windows) {
        b.x = std::clamp(b.x, 0, image.width - 1);
        b.y = std::clamp(b.y, 0, image.height - 1);
        b.w = std::max(1, std::min(b.w, image.width - b.x));
        b.h = std::max(1, std::min(b.h, image.height - b.y));
    }
    return part_descriptor(image, windows, DescriptorMode::Colour, sizes);
}

TeamModel train_team_models(
    const std::vector<std::pair<std::vector<float>, std::string>>& samples,
    const TeamLabelSet& teams, const HistogramSizes& sizes, double svm_c) {
    if (samples.empty()) throw SlfError("team training needs at least one sample");

    std::vector<std::string> missing;
    for (const auto& t : teams.teams()) {
        const bool found = std::any_of(samples.begin(), samples.end(),
                                       [&](const auto& s) { return s.second == t; });
        if (!found) missing.push_back(t);
    }
    if (!missing.empty()) {
        std::string msg = "no training examples for team(s):";
        for (const auto& m : missing) msg += " " + m;
        throw SlfError(msg);
    }

    TeamModel model;
    model.labels = teams.teams();
    model.sizes = sizes;
    const std::size_t dim = samples.front().first.size();

    for (const auto& label : model.labels) {
        std::vector<SvmExample> examples;
        examples.reserve(samples.size());
        for (const auto& [descriptor, team] : samples) {
            if (descriptor.size() != dim)
                throw SlfError("inconsistent team descriptor dimensionality");
            SvmExample e;
            e.x = descriptor;
            e.y = team == label ? 1 : -1;
            examples.push_back(std::move(e));
        }
        std::vector<double> alphas;
        const SvmSolution sol = solve_hinge_svm(examples, dim, svm_c, alphas, 500, 1e-8);

        std::vector<float> w(dim);
        for (std::size_t i = 0; i < dim; ++i) w[i] = float(sol.w[i]);
        model.weights.push_back(std::move(w));
        model.biases.push_back(0.0f); // bias-free margins; the sigmoid absorbs the offset

        std::vector<std::pair<double, int>> scored;
        scored.reserve(examples.size());
        for (const auto& e : examples) {
            double dot = 0.0;
            for (std::size_t i = 0; i < dim; ++i) dot += sol.w[i] * e.x[i];
            scored.emplace_back(dot, e.y);
        }
        model.calibrations.push_back(fit_platt(scored));
    }
    return model;
}

std::pair<std::string, double> classify_team_descriptor(const TeamModel& model,
                                                        const std::vector<float>& descriptor,
                                                        double others_threshold) {
    if (model.labels.empty()) throw SlfError("team model has no labels");
    double best_posterior = -1.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < model.labels.size(); ++i) {
        const double p = model.calibrations[i].probability(model.raw_score(i, descriptor));
        if (p > best_posterior) {
            best_posterior = p;
            best = i;
        }
    }
    if (best_posterior < others_threshold)
        return {TeamLabelSet::kOthers, best_posterior};
    return {model.labels[best], best_posterior};
}

std::pair<std::string, double> classify_team(const TeamModel& model, const ImageU8& image,
                                             const Placement& placement, double others_threshold) {
    return classify_team_descriptor(model, team_descriptor(image, placement, model.sizes),
                                    others_threshold);
}

std::vector<Detection> filter_detections(const std::vector<Detection>& detections) {
    std::vector<Detection> kept;
    kept.reserve(detections.size());
    for (const auto& d : detections)
        if (d.team != TeamLabelSet::kOthers) kept.push_back(d);
    return kept;
}

namespace {
constexpr std::uint32_t kTeamMagic = 0x534c4654; // "SLFT"
constexpr std::uint32_t kTeamVersion = 1;
} // namespace

void TeamModel::save(std::ostream& os) const {
    write_u32(os, kTeamMagic);
    write_u32(os, kTeamVersion);
    write_i32(os, sizes.hue_bins);
    write_i32(os, sizes.sat_bins);
    write_i32(os, sizes.val_bins);
    write_u32(os, std::uint32_t(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        write_string(os, labels[i]);
        write_f32_vec(os, weights[i]);
        write_f32(os, biases[i]);
        write_f64(os, calibrations[i].A);
        write_f64(os, calibrations[i].B);
    }
}

TeamModel TeamModel::load(std::istream& is) {
    if (read_u32(is) != kTeamMagic) throw SlfError("not a team model stream");
    const std::uint32_t version = read_u32(is);
    if (version != kTeamVersion)
        throw SlfError("team model version mismatch: have " + std::to_string(version) +
                       ", expected " + std::to_string(kTeamVersion));
    TeamModel m;
    m.sizes.hue_bins = read_i32(is);
    m.sizes.sat_bins = read_i32(is);
    m.sizes.val_bins = read_i32(is);
    const std::uint32_t n = read_u32(is);
    for (std::uint32_t i = 0; i < n; ++i) {
        m.labels.push_back(read_string(is));
        m.weights.push_back(read_f32_vec(is));
        m.biases.push_back(read_f32(is));
        Calibration cal;
        cal.A = read_f64(is);
        cal.B = read_f64(is);
        m.calibrations.push_back(cal);
    }
    return m;
}

} // namespace selflearn
