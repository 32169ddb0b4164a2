#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "pts/errors.hpp"
#include "pts/geometry.hpp"
#include "pts/image.hpp"

namespace pts {

/// Object state [x, y, dx, dy] with covariance, in the coordinates of the
/// current reference frame. Position in pixels, velocity in pixels/frame.
struct MotionState {
    Eigen::Vector4d x_hat = Eigen::Vector4d::Zero();
    Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
    int frame_index = 0;

    Point2 position() const { return {x_hat(0), x_hat(1)}; }
    Vec2 velocity() const { return {x_hat(2), x_hat(3)}; }

    void set_position(Point2 p) { x_hat(0) = p.x; x_hat(1) = p.y; }
    void set_velocity(Vec2 v) { x_hat(2) = v.x; x_hat(3) = v.y; }
};

/// Constant-velocity filter matrices, dt = 1 frame.
struct KalmanConfig {
    Eigen::Matrix4d F;       // transition
    Eigen::Matrix4d Q;       // process noise
    Eigen::Matrix<double, 2, 4> H_meas;  // selects (x, y)
    Eigen::Matrix2d R;       // measurement noise
    Eigen::Matrix4d P0;      // covariance at (re)initialization

    KalmanConfig() {
        F << 1, 0, 1, 0,
             0, 1, 0, 1,
             0, 0, 1, 0,
             0, 0, 0, 1;
        Q = Eigen::Vector4d(1.0, 1.0, 4.0, 4.0).asDiagonal();
        H_meas << 1, 0, 0, 0,
                  0, 1, 0, 0;
        R = Eigen::Vector2d(4.0, 4.0).asDiagonal();
        P0 = Eigen::Vector4d(10.0, 10.0, 100.0, 100.0).asDiagonal();
    }
};

/// Unweighted mean of foreground pixel coordinates, pixel centers at integers.
inline Point2 center_of_mass(const BinaryMask& mask) {
    double sx = 0, sy = 0;
    std::size_t n = 0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.get(x, y)) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    if (n == 0)
        throw EmptyMask("center_of_mass: empty mask");
    return {mask.origin.x + sx / static_cast<double>(n),
            mask.origin.y + sy / static_cast<double>(n)};
}

inline MotionState kalman_predict(const MotionState& state, const KalmanConfig& cfg) {
    MotionState out = state;
    out.x_hat = cfg.F * state.x_hat;
    out.P = cfg.F * state.P * cfg.F.transpose() + cfg.Q;
    out.frame_index = state.frame_index + 1;
    return out;
}

inline MotionState kalman_correct(const MotionState& prior, Point2 z, const KalmanConfig& cfg) {
    const Eigen::Vector2d residual =
        Eigen::Vector2d(z.x, z.y) - cfg.H_meas * prior.x_hat;
    const Eigen::Matrix2d s = cfg.H_meas * prior.P * cfg.H_meas.transpose() + cfg.R;
    if (std::abs(s.determinant()) < 1e-30)
        throw SingularInnovation("innovation covariance not invertible");
    const Eigen::Matrix<double, 4, 2> gain =
        prior.P * cfg.H_meas.transpose() * s.inverse();

    MotionState out = prior;
    out.x_hat = prior.x_hat + gain * residual;
    Eigen::Matrix4d p = (Eigen::Matrix4d::Identity() - gain * cfg.H_meas) * prior.P;
    out.P = 0.5 * (p + p.transpose());
    return out;
}

/// Velocity from two consecutive positions in the same reference coordinates.
inline Vec2 bootstrap_velocity(Point2 p_prev, Point2 p_curr) {
    return p_curr - p_prev;
}

namespace detail {

/// 2x2 Jacobian of the projective map at q.
inline Eigen::Matrix2d homography_jacobian(const Homography& h, Point2 q) {
    const double u = h.m(0, 0) * q.x + h.m(0, 1) * q.y + h.m(0, 2);
    const double v = h.m(1, 0) * q.x + h.m(1, 1) * q.y + h.m(1, 2);
    const double w = h.m(2, 0) * q.x + h.m(2, 1) * q.y + h.m(2, 2);
    if (std::abs(w) <= 1e-12)
        throw PointAtInfinity("jacobian at infinity");
    Eigen::Matrix2d j;
    j(0, 0) = (h.m(0, 0) * w - u * h.m(2, 0)) / (w * w);
    j(0, 1) = (h.m(0, 1) * w - u * h.m(2, 1)) / (w * w);
    j(1, 0) = (h.m(1, 0) * w - v * h.m(2, 0)) / (w * w);
    j(1, 1) = (h.m(1, 1) * w - v * h.m(2, 1)) / (w * w);
    return j;
}

} // namespace detail

/// Re-expresses the state in a new reference frame. Position is projected;
/// velocity maps as H(p+v) - H(p); covariance is propagated to first order
/// through the Jacobian of that map and re-symmetrized.
inline MotionState advance_reference(const MotionState& state,
                                     const Homography& h_old_ref_to_new_ref) {
    const Point2 p = state.position();
    const Point2 p_plus_v = p + state.velocity();
    const Point2 p_new = apply_homography(h_old_ref_to_new_ref, p);
    const Point2 q_new = apply_homography(h_old_ref_to_new_ref, p_plus_v);

    const Eigen::Matrix2d jp = detail::homography_jacobian(h_old_ref_to_new_ref, p);
    const Eigen::Matrix2d jq = detail::homography_jacobian(h_old_ref_to_new_ref, p_plus_v);

    Eigen::Matrix4d big = Eigen::Matrix4d::Zero();
    big.block<2, 2>(0, 0) = jp;
    big.block<2, 2>(2, 0) = jq - jp;
    big.block<2, 2>(2, 2) = jq;

    MotionState out = state;
    out.set_position(p_new);
    out.set_velocity(q_new - p_new);
    const Eigen::Matrix4d p_cov = big * state.P * big.transpose();
    out.P = 0.5 * (p_cov + p_cov.transpose());
    return out;
}

} // namespace pts
