#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace selflearn {

enum class ClassLabel { Player, Background };

enum class Source { Human, Harvested, SyntheticTruth };

std::string class_label_name(ClassLabel c);
ClassLabel class_label_from_name(const std::string& s);

// Harvested sources carry the self-learning session that produced them,
// serialized as "harvested:<session>".
std::string source_name(Source s, int session);
void source_from_name(const std::string& s, Source& out, int& session);

struct FrameId {
    std::string seq;
    int frame = 0;

    bool operator==(const FrameId& o) const = default;
    auto operator<=>(const FrameId& o) const = default;
};

struct Annotation {
    FrameId frame_id;
    BBox box;
    ClassLabel class_label = ClassLabel::Player;
    std::string team_label = "others";
    std::optional<int> track_id;
    Source source = Source::Human;
    int session = 0; // harvest session index, 0 otherwise

    bool operator==(const Annotation& o) const = default;
};

// Ordered team names plus the reserved sentinel "others", which is always
// present and never gets a trained model.
class TeamLabelSet {
public:
    static constexpr const char* kOthers = "others";

    TeamLabelSet() = default;
    explicit TeamLabelSet(std::vector<std::string> teams);

    const std::vector<std::string>& teams() const { return teams_; }
    std::size_t team_count() const { return teams_.size(); }
    bool is_team(const std::string& name) const;
    bool is_member(const std::string& name) const { return name == kOthers || is_team(name); }
    int index_of(const std::string& name) const; // -1 if not a team

private:
    std::vector<std::string> teams_;
};

std::string annotation_to_json_line(const Annotation& a);
Annotation annotation_from_json_line(const std::string& line);

std::vector<Annotation> read_annotations(const std::string& path);
void write_annotations(const std::vector<Annotation>& annotations, const std::string& path);

} // namespace selflearn
