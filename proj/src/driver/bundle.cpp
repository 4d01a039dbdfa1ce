#include "driver/bundle.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/serialize.hpp"

namespace selflearn {

namespace {
constexpr std::uint32_t kBundleMagic = 0x534c4642; // "SLFB"
constexpr std::uint32_t kBundleVersion = 1;
} // namespace

void ModelBundle::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw SlfError("cannot open bundle for writing: " + path);

    nlohmann::ordered_json header;
    header["format"] = "selflearn-bundle";
    header["detector"] = {
        {"cell_size", detector.cell_size},
        {"root_cells_w", detector.root_cells_w},
        {"root_cells_h", detector.root_cells_h},
        {"components", detector.components.size()},
        {"parts", detector.part_count()},
        {"displacement", detector.displacement},
        {"prior_mean", detector.prior.mean},
        {"prior_stddev", detector.prior.stddev},
    };
    header["calibration"] = {{"A", detector_calibration.A}, {"B", detector_calibration.B}};
    header["teams"] = teams.labels;
    header["histogram_bins"] = teams.sizes.total();
    header["segmenter_trees"] = segmenter.trees.size();
    header["gate"] = {{"tau_lower", gate.tau_lower}, {"tau_upper", gate.tau_upper}};

    write_u32(os, kBundleMagic);
    write_u32(os, kBundleVersion);
    write_string(os, header.dump());
    write_f64(os, detector_calibration.A);
    write_f64(os, detector_calibration.B);
    write_f64(os, gate.tau_lower);
    write_f64(os, gate.tau_upper);
    detector.save(os);
    teams.save(os);
    segmenter.save(os);
    if (!os) throw SlfError("failed writing bundle: " + path);
}

ModelBundle ModelBundle::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw SlfError("cannot open bundle: " + path);
    if (read_u32(is) != kBundleMagic) throw SlfError("not a model bundle: " + path);
    const std::uint32_t version = read_u32(is);
    if (version != kBundleVersion)
        throw SlfError("bundle version mismatch in " + path + ": have " +
                       std::to_string(version) + ", expected " + std::to_string(kBundleVersion));

    const std::string header = read_string(is);
    const auto j = nlohmann::json::parse(header);
    if (j.value("format", "") != "selflearn-bundle")
        throw SlfError("bundle header corrupt in " + path);

    ModelBundle bundle;
    bundle.detector_calibration.A = read_f64(is);
    bundle.detector_calibration.B = read_f64(is);
    bundle.gate.tau_lower = read_f64(is);
    bundle.gate.tau_upper = read_f64(is);
    bundle.detector = DetectorModel::load(is);
    bundle.teams = TeamModel::load(is);
    bundle.segmenter = GentleBoostModel::load(is);
    return bundle;
}

} // namespace selflearn
