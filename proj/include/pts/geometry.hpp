#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "pts/errors.hpp"
#include "pts/random.hpp"

namespace pts {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator+(Point2 p, Vec2 v) { return {p.x + v.x, p.y + v.y}; }

/// A correspondence between the reference frame (src) and a pending frame (dst).
struct PointMatch {
    Point2 src;
    Point2 dst;
};

/// 3x3 projective map from reference to pending coordinates,
/// normalized so that m(2,2) == 1.
struct Homography {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

    static Homography identity() { return {}; }

    /// Normalizes the gauge to m(2,2)=1; rejects maps that cannot be
    /// normalized or are numerically singular.
    static Homography from_matrix(const Eigen::Matrix3d& raw) {
        if (std::abs(raw(2, 2)) < 1e-12)
            throw DegenerateConfiguration("homography gauge: |m22| below 1e-12");
        Homography h;
        h.m = raw / raw(2, 2);
        if (std::abs(h.m.determinant()) < 1e-12)
            throw DegenerateConfiguration("homography is singular");
        return h;
    }

    static Homography translation(double tx, double ty) {
        Homography h;
        h.m(0, 2) = tx;
        h.m(1, 2) = ty;
        return h;
    }

    /// Rotation by `radians` about `center`.
    static Homography rotation(double radians, Point2 center = {0.0, 0.0}) {
        const double c = std::cos(radians), s = std::sin(radians);
        Homography h;
        h.m << c, -s, center.x - c * center.x + s * center.y,
               s,  c, center.y - s * center.x - c * center.y,
               0,  0, 1;
        return h;
    }
};

struct RansacConfig {
    int max_iterations = 500;
    double inlier_threshold = 3.0;     // px reprojection distance
    double min_inlier_fraction = 0.3;
    std::uint64_t rng_seed = 1;
};

/// Projects a point through h. Throws PointAtInfinity when the homogeneous
/// scale vanishes.
inline Point2 apply_homography(const Homography& h, Point2 p) {
    const double w = h.m(2, 0) * p.x + h.m(2, 1) * p.y + h.m(2, 2);
    if (std::abs(w) <= 1e-12)
        throw PointAtInfinity("projected point at infinity");
    return {(h.m(0, 0) * p.x + h.m(0, 1) * p.y + h.m(0, 2)) / w,
            (h.m(1, 0) * p.x + h.m(1, 1) * p.y + h.m(1, 2)) / w};
}

inline Homography invert_homography(const Homography& h) {
    if (std::abs(h.m.determinant()) < 1e-12)
        throw SingularMatrix("homography not invertible");
    const Eigen::Matrix3d inv = h.m.inverse();
    if (std::abs(inv(2, 2)) < 1e-12)
        throw SingularMatrix("inverse cannot be gauge-normalized");
    Homography out;
    out.m = inv / inv(2, 2);
    return out;
}

namespace detail {

struct NormXform {
    // p_norm = scale * (p - centroid)
    double cx = 0, cy = 0, scale = 1;
};

/// Hartley isotropic normalization: centroid to origin, mean distance sqrt(2).
inline NormXform hartley(const std::vector<Point2>& pts) {
    NormXform t;
    for (const auto& p : pts) {
        t.cx += p.x;
        t.cy += p.y;
    }
    const double n = static_cast<double>(pts.size());
    t.cx /= n;
    t.cy /= n;
    double mean_dist = 0;
    for (const auto& p : pts)
        mean_dist += std::hypot(p.x - t.cx, p.y - t.cy);
    mean_dist /= n;
    t.scale = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;
    return t;
}

inline Eigen::Matrix3d norm_matrix(const NormXform& t) {
    Eigen::Matrix3d m;
    m << t.scale, 0, -t.scale * t.cx,
         0, t.scale, -t.scale * t.cy,
         0, 0, 1;
    return m;
}

} // namespace detail

/// Least-squares homography from >= 4 correspondences (DLT with Hartley
/// normalization). Minimizes the algebraic residual over all matches.
inline Homography estimate_homography(const std::vector<PointMatch>& matches) {
    const std::size_t n = matches.size();
    if (n < 4)
        throw DegenerateConfiguration("need at least 4 matches");

    std::vector<Point2> src(n), dst(n);
    for (std::size_t i = 0; i < n; ++i) {
        src[i] = matches[i].src;
        dst[i] = matches[i].dst;
    }
    const auto ts = detail::hartley(src);
    const auto td = detail::hartley(dst);

    Eigen::MatrixXd a(2 * n, 9);
    for (std::size_t i = 0; i < n; ++i) {
        const double sx = ts.scale * (src[i].x - ts.cx);
        const double sy = ts.scale * (src[i].y - ts.cy);
        const double dx = td.scale * (dst[i].x - td.cx);
        const double dy = td.scale * (dst[i].y - td.cy);
        a.row(2 * i)     << -sx, -sy, -1, 0, 0, 0, dx * sx, dx * sy, dx;
        a.row(2 * i + 1) << 0, 0, 0, -sx, -sy, -1, dy * sx, dy * sy, dy;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // Rank must be 8 for a unique solution; collinear/coincident points drop it.
    if (sv(7) < 1e-9 * std::max(sv(0), 1e-300))
        throw DegenerateConfiguration("design matrix rank-deficient");

    const Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

    const Eigen::Matrix3d denorm =
        detail::norm_matrix(td).inverse() * hn * detail::norm_matrix(ts);
    return Homography::from_matrix(denorm);
}

inline double reprojection_error(const Homography& h, const PointMatch& m) {
    const Point2 p = apply_homography(h, m.src);
    return std::hypot(p.x - m.dst.x, p.y - m.dst.y);
}

/// Robust homography estimation. Samples are drawn one per spatial quadrant
/// of the source points when every quadrant is populated, otherwise four
/// distinct uniform indices. Deterministic for a fixed cfg.rng_seed.
inline std::pair<Homography, std::vector<std::size_t>>
ransac_homography(const std::vector<PointMatch>& matches, const RansacConfig& cfg) {
    const std::size_t n = matches.size();
    if (n < 4)
        throw DegenerateConfiguration("need at least 4 matches");

    // Quadrants split the source extent at its bounding-box midpoint.
    double min_x = matches[0].src.x, max_x = min_x;
    double min_y = matches[0].src.y, max_y = min_y;
    for (const auto& m : matches) {
        min_x = std::min(min_x, m.src.x);
        max_x = std::max(max_x, m.src.x);
        min_y = std::min(min_y, m.src.y);
        max_y = std::max(max_y, m.src.y);
    }
    const double mid_x = 0.5 * (min_x + max_x);
    const double mid_y = 0.5 * (min_y + max_y);
    std::array<std::vector<std::size_t>, 4> quadrant;
    for (std::size_t i = 0; i < n; ++i) {
        const int q = (matches[i].src.x >= mid_x ? 1 : 0) +
                      (matches[i].src.y >= mid_y ? 2 : 0);
        quadrant[static_cast<std::size_t>(q)].push_back(i);
    }
    const bool quadrants_ok = !quadrant[0].empty() && !quadrant[1].empty() &&
                              !quadrant[2].empty() && !quadrant[3].empty();

    Rng rng(cfg.rng_seed);
    std::vector<PointMatch> sample(4);
    std::vector<std::size_t> best_inliers;

    for (int it = 0; it < cfg.max_iterations; ++it) {
        std::array<std::size_t, 4> idx{};
        if (quadrants_ok) {
            for (int q = 0; q < 4; ++q)
                idx[static_cast<std::size_t>(q)] =
                    quadrant[static_cast<std::size_t>(q)]
                            [uniform_index(rng, quadrant[static_cast<std::size_t>(q)].size())];
        } else {
            for (int k = 0; k < 4; ++k) {
                bool fresh;
                do {
                    idx[static_cast<std::size_t>(k)] = uniform_index(rng, n);
                    fresh = true;
                    for (int j = 0; j < k; ++j)
                        if (idx[static_cast<std::size_t>(j)] == idx[static_cast<std::size_t>(k)])
                            fresh = false;
                } while (!fresh);
            }
        }
        for (int k = 0; k < 4; ++k)
            sample[static_cast<std::size_t>(k)] = matches[idx[static_cast<std::size_t>(k)]];

        Homography cand;
        try {
            cand = estimate_homography(sample);
        } catch (const DegenerateConfiguration&) {
            continue;
        }

        std::vector<std::size_t> inliers;
        for (std::size_t i = 0; i < n; ++i) {
            try {
                if (reprojection_error(cand, matches[i]) <= cfg.inlier_threshold)
                    inliers.push_back(i);
            } catch (const PointAtInfinity&) {
            }
        }
        if (inliers.size() > best_inliers.size())
            best_inliers = std::move(inliers);
    }

    if (best_inliers.size() < 4 ||
        static_cast<double>(best_inliers.size()) / static_cast<double>(n) <
            cfg.min_inlier_fraction)
        throw NoConsensus("best consensus below min_inlier_fraction");

    // Refit on the full consensus, then report membership w.r.t. the final H.
    std::vector<PointMatch> consensus;
    consensus.reserve(best_inliers.size());
    for (std::size_t i : best_inliers)
        consensus.push_back(matches[i]);
    const Homography h = estimate_homography(consensus);

    std::vector<std::size_t> final_inliers;
    for (std::size_t i = 0; i < n; ++i) {
        try {
            if (reprojection_error(h, matches[i]) <= cfg.inlier_threshold)
                final_inliers.push_back(i);
        } catch (const PointAtInfinity&) {
        }
    }
    return {h, final_inliers};
}

} // namespace pts
