#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/label_store.hpp"

namespace selflearn {

// Dataset layout on disk:
//   <root>/frames/<seq>/<frame:07d>.png     8-bit RGB
//   <root>/annotations.jsonl                one record per line
//   <root>/masks/<seq>/<frame:07d>.png      optional, 8-bit gray, 255=fg
struct SequenceInfo {
    std::string id;
    int frame_count = 0;
    std::vector<std::string> frame_paths; // indexed by frame number
};

struct DatasetIndex {
    std::string root;
    std::vector<SequenceInfo> sequences;
    std::string annotation_path;
    std::string mask_dir; // empty when absent

    int total_frames() const;
    const SequenceInfo* find_sequence(const std::string& id) const;
    std::string frame_path(const FrameId& f) const;
    // Empty string when no mask file exists for the frame.
    std::string mask_path(const FrameId& f) const;
    bool has_frame(const FrameId& f) const;

    ImageU8 load_frame(const FrameId& f) const;
};

std::string frame_file_name(int frame);

struct LoadedDataset {
    DatasetIndex index;
    LabelStore store;
};

// Indexes the frames on disk, parses the annotation file and partitions
// frames into the initially labelled set and U.
LoadedDataset load_dataset(const std::string& root, const std::string& annotation_file);

inline LoadedDataset load_dataset(const std::string& root) {
    return load_dataset(root, root + "/annotations.jsonl");
}

} // namespace selflearn
