#include "core/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "core/error.hpp"

namespace fs = std::filesystem;

namespace selflearn {

std::string frame_file_name(int frame) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%07d.png", frame);
    return buf;
}

int DatasetIndex::total_frames() const {
    int n = 0;
    for (const auto& s : sequences) n += s.frame_count;
    return n;
}

const SequenceInfo* DatasetIndex::find_sequence(const std::string& id) const {
    for (const auto& s : sequences)
        if (s.id == id) return &s;
    return nullptr;
}

bool DatasetIndex::has_frame(const FrameId& f) const {
    const auto* seq = find_sequence(f.seq);
    return seq && f.frame >= 0 && f.frame < seq->frame_count;
}

std::string DatasetIndex::frame_path(const FrameId& f) const {
    const auto* seq = find_sequence(f.seq);
    if (!seq || f.frame < 0 || f.frame >= seq->frame_count)
        throw SlfError("frame does not exist in dataset: " + f.seq + "/" + std::to_string(f.frame));
    return seq->frame_paths[std::size_t(f.frame)];
}

std::string DatasetIndex::mask_path(const FrameId& f) const {
    if (mask_dir.empty()) return {};
    const fs::path p = fs::path(mask_dir) / f.seq / frame_file_name(f.frame);
    return fs::exists(p) ? p.string() : std::string{};
}

ImageU8 DatasetIndex::load_frame(const FrameId& f) const {
    return load_png(frame_path(f));
}

LoadedDataset load_dataset(const std::string& root, const std::string& annotation_file) {
    const fs::path frames_dir = fs::path(root) / "frames";
    if (!fs::is_directory(frames_dir))
        throw ValidationError("dataset frames directory not found: " + frames_dir.string());

    DatasetIndex index;
    index.root = root;
    index.annotation_path = annotation_file;
    const fs::path masks = fs::path(root) / "masks";
    if (fs::is_directory(masks)) index.mask_dir = masks.string();

    std::vector<std::string> seq_ids;
    for (const auto& e : fs::directory_iterator(frames_dir))
        if (e.is_directory()) seq_ids.push_back(e.path().filename().string());
    std::sort(seq_ids.begin(), seq_ids.end());
    if (seq_ids.empty()) throw ValidationError("dataset has no sequences under " + frames_dir.string());

    for (const auto& id : seq_ids) {
        SequenceInfo info;
        info.id = id;
        const fs::path seq_dir = frames_dir / id;
        int count = 0;
        while (fs::exists(seq_dir / frame_file_name(count))) ++count;
        if (count == 0)
            throw ValidationError("sequence has no frames (expected 0000000.png onward): " + seq_dir.string());
        info.frame_count = count;
        info.frame_paths.reserve(std::size_t(count));
        for (int i = 0; i < count; ++i) info.frame_paths.push_back((seq_dir / frame_file_name(i)).string());
        index.sequences.push_back(std::move(info));
    }

    LabelStore store;
    if (fs::exists(annotation_file)) {
        store.labelled = read_annotations(annotation_file);
    } else {
        throw ValidationError("annotation file not found: " + annotation_file);
    }

    for (const auto& a : store.labelled) {
        if (!index.has_frame(a.frame_id))
            throw ValidationError("annotation references missing frame: " + a.frame_id.seq + "/" +
                                  std::to_string(a.frame_id.frame));
        store.labelled_frames.insert(a.frame_id);
    }
    for (const auto& seq : index.sequences)
        for (int f = 0; f < seq.frame_count; ++f) {
            const FrameId id{seq.id, f};
            if (!store.labelled_frames.count(id)) store.unlabelled_frames.insert(id);
        }

    return LoadedDataset{std::move(index), std::move(store)};
}

} // namespace selflearn
