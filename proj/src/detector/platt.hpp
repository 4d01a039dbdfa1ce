#pragma once

#include <utility>
#include <vector>

namespace selflearn {

// Sigmoid map from raw classifier score to posterior probability:
//   P(y=1|f) = 1 / (1 + exp(f*A + B))
// A is negative whenever larger scores mean more positive.
struct Calibration {
    double A = -1.0;
    double B = 0.0;

    double probability(double f) const;
};

// Fits (A, B) by minimizing the negative log-likelihood with Platt's
// smoothed targets, via Newton iterations with backtracking. Deterministic
// for a fixed input. Throws if only one class is present.
Calibration fit_platt(const std::vector<std::pair<double, int>>& scored_labels);

} // namespace selflearn
