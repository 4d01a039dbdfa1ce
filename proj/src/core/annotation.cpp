#include "core/annotation.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "core/error.hpp"

namespace selflearn {

using nlohmann::ordered_json;

std::string class_label_name(ClassLabel c) {
    return c == ClassLabel::Player ? "player" : "background";
}

ClassLabel class_label_from_name(const std::string& s) {
    if (s == "player") return ClassLabel::Player;
    if (s == "background") return ClassLabel::Background;
    throw ValidationError("unknown class label: " + s);
}

std::string source_name(Source s, int session) {
    switch (s) {
        case Source::Human: return "human";
        case Source::SyntheticTruth: return "synthetic-truth";
        case Source::Harvested: return "harvested:" + std::to_string(session);
    }
    throw SlfError("bad source enum");
}

void source_from_name(const std::string& s, Source& out, int& session) {
    session = 0;
    if (s == "human") { out = Source::Human; return; }
    if (s == "synthetic-truth") { out = Source::SyntheticTruth; return; }
    if (s.rfind("harvested", 0) == 0) {
        out = Source::Harvested;
        const auto colon = s.find(':');
        if (colon != std::string::npos) session = std::stoi(s.substr(colon + 1));
        return;
    }
    throw ValidationError("unknown annotation source: " + s);
}

TeamLabelSet::TeamLabelSet(std::vector<std::string> teams) : teams_(std::move(teams)) {
    std::set<std::string> seen;
    for (const auto& t : teams_) {
        if (t.empty()) throw ValidationError("team label must be non-empty");
        if (t == kOthers) throw ValidationError("'others' is reserved and cannot be a team label");
        if (!seen.insert(t).second) throw ValidationError("duplicate team label: " + t);
    }
}

bool TeamLabelSet::is_team(const std::string& name) const {
    return std::find(teams_.begin(), teams_.end(), name) != teams_.end();
}

int TeamLabelSet::index_of(const std::string& name) const {
    const auto it = std::find(teams_.begin(), teams_.end(), name);
    return it == teams_.end() ? -1 : int(it - teams_.begin());
}

std::string annotation_to_json_line(const Annotation& a) {
    ordered_json j;
    j["seq"] = a.frame_id.seq;
    j["frame"] = a.frame_id.frame;
    j["x"] = a.box.x;
    j["y"] = a.box.y;
    j["w"] = a.box.w;
    j["h"] = a.box.h;
    j["class"] = class_label_name(a.class_label);
    j["team"] = a.team_label;
    if (a.track_id) j["track_id"] = *a.track_id;
    j["source"] = source_name(a.source, a.session);
    return j.dump();
}

Annotation annotation_from_json_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    Annotation a;
    a.frame_id.seq = j.at("seq").get<std::string>();
    a.frame_id.frame = j.at("frame").get<int>();
    a.box = BBox{j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()};
    if (!a.box.valid()) throw ValidationError("annotation box must have positive width and height");
    a.class_label = class_label_from_name(j.at("class").get<std::string>());
    a.team_label = j.at("team").get<std::string>();
    if (j.contains("track_id")) a.track_id = j.at("track_id").get<int>();
    source_from_name(j.at("source").get<std::string>(), a.source, a.session);
    return a;
}

std::vector<Annotation> read_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open annotation file: " + path);
    std::vector<Annotation> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(annotation_from_json_line(line));
        } catch (const std::exception& e) {
            throw ValidationError("malformed annotation record at " + path + ":" +
                                  std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_annotations(const std::vector<Annotation>& annotations, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SlfError("cannot open annotation file for writing: " + path);
    for (const auto& a : annotations) out << annotation_to_json_line(a) << '\n';
}

} // namespace selflearn
