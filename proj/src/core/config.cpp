#include "core/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "core/error.hpp"

namespace selflearn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        const auto t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

} // namespace

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config line " + std::to_string(line_no) + " has an empty key");
        kv[key] = value;
    }
    return kv;
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_kv_text(ss.str());
}

void RunConfig::apply(const std::map<std::string, std::string>& kv) {
    std::vector<std::string> problems;

    auto parse_int = [&](const std::string& key, const std::string& v, int& out) {
        try {
            std::size_t pos = 0;
            const int x = std::stoi(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            out = x;
        } catch (...) {
            problems.push_back(key + ": expected integer, got '" + v + "'");
        }
    };
    auto parse_u64 = [&](const std::string& key, const std::string& v, std::uint64_t& out) {
        try {
            std::size_t pos = 0;
            const unsigned long long x = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            out = x;
        } catch (...) {
            problems.push_back(key + ": expected unsigned integer, got '" + v + "'");
        }
    };
    auto parse_double = [&](const std::string& key, const std::string& v, double& out) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            out = x;
        } catch (...) {
            problems.push_back(key + ": expected number, got '" + v + "'");
        }
    };
    auto parse_bool = [&](const std::string& key, const std::string& v, bool& out) {
        if (v == "true" || v == "1") out = true;
        else if (v == "false" || v == "0") out = false;
        else problems.push_back(key + ": expected true/false, got '" + v + "'");
    };

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"dataset", [&](const std::string&, const std::string& v) { dataset = v; }},
        {"out", [&](const std::string&, const std::string& v) { out = v; }},
        {"seed", [&](const std::string& k, const std::string& v) { parse_u64(k, v, seed); }},
        {"workers", [&](const std::string& k, const std::string& v) { parse_int(k, v, workers); }},
        {"teams", [&](const std::string&, const std::string& v) { teams = split_csv(v); }},
        {"features.hue_bins", [&](const std::string& k, const std::string& v) { parse_int(k, v, features.hue_bins); }},
        {"features.sat_bins", [&](const std::string& k, const std::string& v) { parse_int(k, v, features.sat_bins); }},
        {"features.val_bins", [&](const std::string& k, const std::string& v) { parse_int(k, v, features.val_bins); }},
        {"detector.cell_size", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.cell_size); }},
        {"detector.root_cells_w", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.root_cells_w); }},
        {"detector.root_cells_h", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.root_cells_h); }},
        {"detector.parts", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.parts); }},
        {"detector.components", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.components); }},
        {"detector.displacement", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.displacement); }},
        {"detector.deformation_quadratic", [&](const std::string& k, const std::string& v) { parse_double(k, v, detector.deformation_quadratic); }},
        {"detector.deformation_linear", [&](const std::string& k, const std::string& v) { parse_double(k, v, detector.deformation_linear); }},
        {"detector.svm_c", [&](const std::string& k, const std::string& v) { parse_double(k, v, detector.svm_c); }},
        {"detector.latent_rounds", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.latent_rounds); }},
        {"detector.objective_tolerance", [&](const std::string& k, const std::string& v) { parse_double(k, v, detector.objective_tolerance); }},
        {"detector.mining_passes", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.mining_passes); }},
        {"detector.negatives_per_frame", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.negatives_per_frame); }},
        {"detector.negative_iou_max", [&](const std::string& k, const std::string& v) { parse_double(k, v, detector.negative_iou_max); }},
        {"detector.negative_cache", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.negative_cache); }},
        {"detector.max_mining_frames", [&](const std::string& k, const std::string& v) { parse_int(k, v, detector.max_mining_frames); }},
        {"detector.nms_iou", [&](const std::string& k, const std::string& v) { parse_double(k, v, detector.nms_iou); }},
        {"detector.prob_threshold", [&](const std::string& k, const std::string& v) { parse_double(k, v, detector.prob_threshold); }},
        {"detector.scale_step", [&](const std::string& k, const std::string& v) { parse_double(k, v, detector.scale_step); }},
        {"team.svm_c", [&](const std::string& k, const std::string& v) { parse_double(k, v, team.svm_c); }},
        {"team.others_threshold", [&](const std::string& k, const std::string& v) { parse_double(k, v, team.others_threshold); }},
        {"segmenter.rounds", [&](const std::string& k, const std::string& v) { parse_int(k, v, segmenter.rounds); }},
        {"segmenter.max_depth", [&](const std::string& k, const std::string& v) { parse_int(k, v, segmenter.max_depth); }},
        {"segmenter.stumps", [&](const std::string& k, const std::string& v) { parse_bool(k, v, segmenter.stumps); }},
        {"segmenter.max_pixels_per_class", [&](const std::string& k, const std::string& v) { parse_int(k, v, segmenter.max_pixels_per_class); }},
        {"segmenter.max_mask_frames", [&](const std::string& k, const std::string& v) { parse_int(k, v, segmenter.max_mask_frames); }},
        {"tracker.process_noise", [&](const std::string& k, const std::string& v) { parse_double(k, v, tracker.process_noise); }},
        {"tracker.measurement_noise", [&](const std::string& k, const std::string& v) { parse_double(k, v, tracker.measurement_noise); }},
        {"tracker.gate_iou", [&](const std::string& k, const std::string& v) { parse_double(k, v, tracker.gate_iou); }},
        {"tracker.max_misses", [&](const std::string& k, const std::string& v) { parse_int(k, v, tracker.max_misses); }},
        {"selector.min_tracklet_length", [&](const std::string& k, const std::string& v) { parse_int(k, v, selector.min_tracklet_length); }},
        {"selector.n_max", [&](const std::string& k, const std::string& v) { parse_int(k, v, selector.n_max); }},
        {"merge.dup_iou", [&](const std::string& k, const std::string& v) { parse_double(k, v, merge_dup_iou); }},
        {"driver.sessions", [&](const std::string& k, const std::string& v) { parse_int(k, v, driver.sessions); }},
        {"driver.warm_start", [&](const std::string& k, const std::string& v) { parse_bool(k, v, driver.warm_start); }},
        {"driver.eval_each_session", [&](const std::string& k, const std::string& v) { parse_bool(k, v, driver.eval_each_session); }},
        {"eval.iou", [&](const std::string& k, const std::string& v) { parse_double(k, v, eval_iou); }},
    };

    for (const auto& [key, value] : kv) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            problems.push_back(key + ": unknown configuration key");
            continue;
        }
        it->second(key, value);
    }

    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ValidationError(msg);
    }
}

void RunConfig::validate() const {
    std::vector<std::string> problems;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) problems.push_back(msg);
    };

    require(!teams.empty(), "teams: at least one team label required");
    for (const auto& t : teams)
        require(t != TeamLabelSet::kOthers, "teams: 'others' is reserved");
    require(features.hue_bins >= 1 && features.sat_bins >= 1 && features.val_bins >= 1,
            "features.*_bins: must be >= 1");
    require(detector.cell_size >= 2 && detector.cell_size % 2 == 0,
            "detector.cell_size: must be an even integer >= 2");
    require(detector.root_cells_w >= 2 && detector.root_cells_h >= 2,
            "detector.root_cells_*: must be >= 2");
    require(detector.parts >= 0, "detector.parts: must be >= 0");
    require(detector.components >= 1, "detector.components: must be >= 1");
    require(detector.displacement >= 0, "detector.displacement: must be >= 0");
    require(detector.deformation_quadratic >= 0.0,
            "detector.deformation_quadratic: must be >= 0 (penalty, never reward)");
    require(detector.svm_c > 0.0, "detector.svm_c: must be > 0");
    require(detector.latent_rounds >= 1, "detector.latent_rounds: must be >= 1");
    require(detector.nms_iou > 0.0 && detector.nms_iou <= 1.0, "detector.nms_iou: must be in (0,1]");
    require(detector.prob_threshold >= 0.0 && detector.prob_threshold <= 1.0,
            "detector.prob_threshold: must be in [0,1]");
    require(detector.scale_step > 1.0, "detector.scale_step: must be > 1");
    require(team.svm_c > 0.0, "team.svm_c: must be > 0");
    require(team.others_threshold >= 0.0 && team.others_threshold <= 1.0,
            "team.others_threshold: must be in [0,1]");
    require(segmenter.rounds >= 1, "segmenter.rounds: must be >= 1");
    require(segmenter.max_depth >= 1, "segmenter.max_depth: must be >= 1");
    require(segmenter.max_pixels_per_class >= 100, "segmenter.max_pixels_per_class: must be >= 100");
    require(tracker.process_noise >= 0.0, "tracker.process_noise: must be >= 0");
    require(tracker.measurement_noise >= 0.0, "tracker.measurement_noise: must be >= 0");
    require(tracker.gate_iou > 0.0 && tracker.gate_iou <= 1.0, "tracker.gate_iou: must be in (0,1]");
    require(tracker.max_misses >= 0, "tracker.max_misses: must be >= 0");
    require(selector.min_tracklet_length >= 1, "selector.min_tracklet_length: must be >= 1");
    require(selector.n_max >= 0, "selector.n_max: must be >= 0");
    require(merge_dup_iou > 0.0 && merge_dup_iou <= 1.0, "merge.dup_iou: must be in (0,1]");
    require(driver.sessions >= 0, "driver.sessions: must be >= 0");
    require(eval_iou > 0.0 && eval_iou <= 1.0, "eval.iou: must be in (0,1]");

    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ValidationError(msg);
    }
}

RunConfig RunConfig::from_file(const std::string& path) {
    RunConfig cfg;
    cfg.apply(read_kv_file(path));
    cfg.validate();
    return cfg;
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "dataset = " << dataset << '\n';
    os << "out = " << out << '\n';
    os << "seed = " << seed << '\n';
    os << "workers = " << workers << '\n';
    os << "teams = ";
    for (std::size_t i = 0; i < teams.size(); ++i) os << (i ? "," : "") << teams[i];
    os << '\n';
    os << "features.hue_bins = " << features.hue_bins << '\n';
    os << "features.sat_bins = " << features.sat_bins << '\n';
    os << "features.val_bins = " << features.val_bins << '\n';
    os << "detector.cell_size = " << detector.cell_size << '\n';
    os << "detector.root_cells_w = " << detector.root_cells_w << '\n';
    os << "detector.root_cells_h = " << detector.root_cells_h << '\n';
    os << "detector.parts = " << detector.parts << '\n';
    os << "detector.components = " << detector.components << '\n';
    os << "detector.displacement = " << detector.displacement << '\n';
    os << "detector.deformation_quadratic = " << detector.deformation_quadratic << '\n';
    os << "detector.deformation_linear = " << detector.deformation_linear << '\n';
    os << "detector.svm_c = " << detector.svm_c << '\n';
    os << "detector.latent_rounds = " << detector.latent_rounds << '\n';
    os << "detector.objective_tolerance = " << detector.objective_tolerance << '\n';
    os << "detector.mining_passes = " << detector.mining_passes << '\n';
    os << "detector.negatives_per_frame = " << detector.negatives_per_frame << '\n';
    os << "detector.negative_iou_max = " << detector.negative_iou_max << '\n';
    os << "detector.negative_cache = " << detector.negative_cache << '\n';
    os << "detector.max_mining_frames = " << detector.max_mining_frames << '\n';
    os << "detector.nms_iou = " << detector.nms_iou << '\n';
    os << "detector.prob_threshold = " << detector.prob_threshold << '\n';
    os << "detector.scale_step = " << detector.scale_step << '\n';
    os << "team.svm_c = " << team.svm_c << '\n';
    os << "team.others_threshold = " << team.others_threshold << '\n';
    os << "segmenter.rounds = " << segmenter.rounds << '\n';
    os << "segmenter.max_depth = " << segmenter.max_depth << '\n';
    os << "segmenter.stumps = " << (segmenter.stumps ? "true" : "false") << '\n';
    os << "segmenter.max_pixels_per_class = " << segmenter.max_pixels_per_class << '\n';
    os << "segmenter.max_mask_frames = " << segmenter.max_mask_frames << '\n';
    os << "tracker.process_noise = " << tracker.process_noise << '\n';
    os << "tracker.measurement_noise = " << tracker.measurement_noise << '\n';
    os << "tracker.gate_iou = " << tracker.gate_iou << '\n';
    os << "tracker.max_misses = " << tracker.max_misses << '\n';
    os << "selector.min_tracklet_length = " << selector.min_tracklet_length << '\n';
    os << "selector.n_max = " << selector.n_max << '\n';
    os << "merge.dup_iou = " << merge_dup_iou << '\n';
    os << "driver.sessions = " << driver.sessions << '\n';
    os << "driver.warm_start = " << (driver.warm_start ? "true" : "false") << '\n';
    os << "driver.eval_each_session = " << (driver.eval_each_session ? "true" : "false") << '\n';
    os << "eval.iou = " << eval_iou << '\n';
    return os.str();
}

} // namespace selflearn
