#pragma once

#include <string>

#include "core/annotation.hpp"
#include "detector/model.hpp"
#include "detector/platt.hpp"
#include "segmenter/gentle_boost.hpp"
#include "teamcolor/team_model.hpp"

namespace selflearn {

// Everything a trained session produces: the shape detector with its
// calibration, the per-team colour models, the figure-ground segmenter and
// the foreground gate. Persisted as a versioned binary file with an embedded
// JSON header carrying dimensions, sizes and calibrations.
struct ModelBundle {
    DetectorModel detector; // carries the scale prior
    Calibration detector_calibration;
    TeamModel teams;
    GentleBoostModel segmenter;
    ForegroundGate gate;

    void save(const std::string& path) const;
    static ModelBundle load(const std::string& path);
};

} // namespace selflearn
