#include "eval/detections_io.hpp"

#include <fstream>

#include <json.hpp>

#include "core/error.hpp"

namespace selflearn {

std::vector<DetectionRecord> read_detections(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open detections file: " + path);
    std::vector<DetectionRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            DetectionRecord r;
            r.frame_id.seq = j.at("seq").get<std::string>();
            r.frame_id.frame = j.at("frame").get<int>();
            r.box = BBox{j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(),
                         j.at("h").get<int>()};
            r.score = j.at("score").get<double>();
            r.prob = j.at("prob").get<double>();
            r.team = j.value("team", "");
            out.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw ValidationError("malformed detection record at " + path + ":" +
                                  std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_detections(const std::vector<DetectionRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SlfError("cannot open detections file for writing: " + path);
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["seq"] = r.frame_id.seq;
        j["frame"] = r.frame_id.frame;
        j["x"] = r.box.x;
        j["y"] = r.box.y;
        j["w"] = r.box.w;
        j["h"] = r.box.h;
        j["score"] = r.score;
        j["prob"] = r.prob;
        j["team"] = r.team;
        out << j.dump() << '\n';
    }
}

} // namespace selflearn
