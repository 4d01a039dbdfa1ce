#pragma once

#include <Eigen/Dense>

#include "core/config.hpp"
#include "core/geometry.hpp"

namespace selflearn {

// Constant-velocity Kalman track over (cx, cy, h, vx, vy, vh). The box width
// follows a fixed aspect ratio; state is real-valued and only rounded when
// boxes are emitted.
class KalmanTrack {
public:
    using Vec6 = Eigen::Matrix<double, 6, 1>;
    using Mat6 = Eigen::Matrix<double, 6, 6>;
    using Vec3 = Eigen::Matrix<double, 3, 1>;

    KalmanTrack(const BBox& first, double aspect, const TrackerConfig& cfg);

    void predict(double dt = 1.0);
    void update(const BBox& measurement);

    BBoxF state_box() const;
    BBox rounded_box() const { return state_box().rounded(); }

    const Vec6& state() const { return x_; }
    const Mat6& covariance() const { return P_; }
    double height() const { return x_(2); }

    // Transition and noise builders, shared with the test oracles.
    static Mat6 transition(double dt);
    static Mat6 process_noise(double sigma_q, double dt);
    static Eigen::Matrix<double, 3, 6> measurement_matrix();
    static Eigen::Matrix3d measurement_noise(double sigma_r);

private:
    Vec6 x_;
    Mat6 P_;
    double aspect_;
    double sigma_q_;
    double sigma_r_;
};

} // namespace selflearn
