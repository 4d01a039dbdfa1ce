#include "tracker/kalman.hpp"

#include <cmath>

#include "core/error.hpp"

namespace selflearn {

KalmanTrack::Mat6 KalmanTrack::transition(double dt) {
    Mat6 F = Mat6::Identity();
    F(0, 3) = dt;
    F(1, 4) = dt;
    F(2, 5) = dt;
    return F;
}

KalmanTrack::Mat6 KalmanTrack::process_noise(double sigma_q, double dt) {
    // white-acceleration model, per-axis [dt^4/4, dt^3/2; dt^3/2, dt^2]
    const double q = sigma_q * sigma_q;
    const double a = q * dt * dt * dt * dt / 4.0;
    const double b = q * dt * dt * dt / 2.0;
    const double c = q * dt * dt;
    Mat6 Q = Mat6::Zero();
    for (int i = 0; i < 3; ++i) {
        Q(i, i) = a;
        Q(i, i + 3) = b;
        Q(i + 3, i) = b;
        Q(i + 3, i + 3) = c;
    }
    return Q;
}

Eigen::Matrix<double, 3, 6> KalmanTrack::measurement_matrix() {
    Eigen::Matrix<double, 3, 6> H = Eigen::Matrix<double, 3, 6>::Zero();
    H(0, 0) = 1.0;
    H(1, 1) = 1.0;
    H(2, 2) = 1.0;
    return H;
}

Eigen::Matrix3d KalmanTrack::measurement_noise(double sigma_r) {
    return Eigen::Matrix3d::Identity() * (sigma_r * sigma_r);
}

KalmanTrack::KalmanTrack(const BBox& first, double aspect, const TrackerConfig& cfg)
    : aspect_(aspect), sigma_q_(cfg.process_noise), sigma_r_(cfg.measurement_noise) {
    if (!first.valid()) throw SlfError("Kalman track initialized from an invalid box");
    x_ = Vec6::Zero();
    x_(0) = first.cx();
    x_(1) = first.cy();
    x_(2) = first.h;

    const double r2 = std::max(sigma_r_ * sigma_r_, 1e-6);
    P_ = Mat6::Zero();
    P_(0, 0) = P_(1, 1) = P_(2, 2) = r2;
    // velocities start at zero with inflated variance
    P_(3, 3) = P_(4, 4) = P_(5, 5) = 100.0 * std::max(sigma_q_ * sigma_q_, 1.0);
}

void KalmanTrack::predict(double dt) {
    const Mat6 F = transition(dt);
    x_ = F * x_;
    P_ = F * P_ * F.transpose() + process_noise(sigma_q_, dt);
    P_ = 0.5 * (P_ + P_.transpose()); // keep symmetric
}

void KalmanTrack::update(const BBox& measurement) {
    if (!measurement.valid()) throw SlfError("Kalman update with an invalid measurement");
    Vec3 z;
    z << measurement.cx(), measurement.cy(), double(measurement.h);
    if (!z.allFinite()) throw SlfError("Kalman update with a non-finite measurement");

    const auto H = measurement_matrix();
    const Eigen::Matrix3d R = measurement_noise(sigma_r_);
    const Vec3 innovation = z - H * x_;
    const Eigen::Matrix3d S = H * P_ * H.transpose() + R;
    const Eigen::Matrix<double, 6, 3> K = P_ * H.transpose() * S.inverse();

    x_ = x_ + K * innovation;
    // Joseph form keeps the covariance PSD under roundoff.
    const Mat6 IKH = Mat6::Identity() - K * H;
    P_ = IKH * P_ * IKH.transpose() + K * R * K.transpose();
    P_ = 0.5 * (P_ + P_.transpose());
    if (x_(2) < 1.0) x_(2) = 1.0;
}

BBoxF KalmanTrack::state_box() const {
    BBoxF b;
    b.h = std::max(1.0, x_(2));
    b.w = std::max(1.0, aspect_ * b.h);
    b.x = x_(0) - 0.5 * b.w;
    b.y = x_(1) - 0.5 * b.h;
    return b;
}

} // namespace selflearn
