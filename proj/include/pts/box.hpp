#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "pts/errors.hpp"
#include "pts/geometry.hpp"

namespace pts {

/// Four corners in consistent winding order (VOT annotation unit).
struct RotatedBox {
    std::array<Point2, 4> corners{};

    static RotatedBox axis_aligned(double x, double y, double w, double h) {
        return {{Point2{x, y}, Point2{x + w, y}, Point2{x + w, y + h}, Point2{x, y + h}}};
    }

    Point2 center() const {
        return {(corners[0].x + corners[1].x + corners[2].x + corners[3].x) / 4.0,
                (corners[0].y + corners[1].y + corners[2].y + corners[3].y) / 4.0};
    }

    /// Axis-aligned hull as (min_x, min_y, max_x, max_y).
    std::array<double, 4> hull() const {
        double mnx = corners[0].x, mxx = corners[0].x;
        double mny = corners[0].y, mxy = corners[0].y;
        for (const auto& c : corners) {
            mnx = std::min(mnx, c.x);
            mxx = std::max(mxx, c.x);
            mny = std::min(mny, c.y);
            mxy = std::max(mxy, c.y);
        }
        return {mnx, mny, mxx, mxy};
    }

    double area() const {
        // Shoelace; corners are expected in winding order.
        double s = 0;
        for (int i = 0; i < 4; ++i) {
            const auto& a = corners[static_cast<std::size_t>(i)];
            const auto& b = corners[static_cast<std::size_t>((i + 1) % 4)];
            s += a.x * b.y - b.x * a.y;
        }
        return std::abs(s) * 0.5;
    }
};

namespace detail {

inline double cross(Point2 o, Point2 a, Point2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Andrew monotone chain; returns hull in counter-clockwise order
/// (y-down image coordinates), no repeated endpoint.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;

    std::vector<Point2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

} // namespace detail

/// Minimum-area rotated rectangle enclosing a point set (rotating calipers
/// over the convex hull). Degenerate inputs yield degenerate rectangles.
inline RotatedBox min_area_rect(const std::vector<Point2>& points) {
    if (points.empty())
        throw EmptyMask("min_area_rect: no points");
    const std::vector<Point2> hull = detail::convex_hull(points);

    if (hull.size() == 1)
        return {{hull[0], hull[0], hull[0], hull[0]}};
    if (hull.size() == 2) {
        return {{hull[0], hull[1], hull[1], hull[0]}};
    }

    double best_area = std::numeric_limits<double>::infinity();
    RotatedBox best{};
    const std::size_t n = hull.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = hull[i];
        const Point2 b = hull[(i + 1) % n];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (len < 1e-12) continue;
        const double ux = (b.x - a.x) / len, uy = (b.y - a.y) / len;   // edge dir
        const double vx = -uy, vy = ux;                                // edge normal

        double lo_u = 0, hi_u = 0, lo_v = 0, hi_v = 0;
        bool first = true;
        for (const auto& p : hull) {
            const double du = (p.x - a.x) * ux + (p.y - a.y) * uy;
            const double dv = (p.x - a.x) * vx + (p.y - a.y) * vy;
            if (first) {
                lo_u = hi_u = du;
                lo_v = hi_v = dv;
                first = false;
            } else {
                lo_u = std::min(lo_u, du);
                hi_u = std::max(hi_u, du);
                lo_v = std::min(lo_v, dv);
                hi_v = std::max(hi_v, dv);
            }
        }
        const double area = (hi_u - lo_u) * (hi_v - lo_v);
        if (area < best_area) {
            best_area = area;
            auto corner = [&](double u, double v) {
                return Point2{a.x + u * ux + v * vx, a.y + u * uy + v * vy};
            };
            best = {{corner(lo_u, lo_v), corner(hi_u, lo_v), corner(hi_u, hi_v),
                     corner(lo_u, hi_v)}};
        }
    }
    return best;
}

/// Boundary-inclusive point-in-convex-quad test (either winding). Degenerate
/// quads (zero area) contain only points on their own extent.
inline bool point_in_box(const RotatedBox& box, Point2 p) {
    bool has_pos = false, has_neg = false, all_zero = true;
    for (int i = 0; i < 4; ++i) {
        const double c = detail::cross(box.corners[static_cast<std::size_t>(i)],
                                       box.corners[static_cast<std::size_t>((i + 1) % 4)], p);
        if (c > 1e-12) has_pos = true;
        if (c < -1e-12) has_neg = true;
        if (std::abs(c) > 1e-12) all_zero = false;
    }
    if (all_zero) {
        const auto h = box.hull();
        return p.x >= h[0] - 1e-9 && p.x <= h[2] + 1e-9 && p.y >= h[1] - 1e-9 &&
               p.y <= h[3] + 1e-9;
    }
    return !(has_pos && has_neg);
}

} // namespace pts
