#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pts/box.hpp"
#include "pts/errors.hpp"
#include "pts/geometry.hpp"
#include "pts/image.hpp"
#include "pts/track_types.hpp"

namespace pts {

struct VelocityErrors {
    double euclidean = 0.0;   // px/frame
    double cosine = 0.0;      // in [-1, 1]
    double magnitude = 0.0;   // px/frame
};

struct SummaryReport {
    double mean_position_error = 0.0;
    VelocityErrors mean_velocity_errors;
    double accuracy = 0.0;       // mean box overlap on tracked frames
    int failure_count = 0;
    int total_frames = 0;
    int tracked_frames = 0;
};

inline double position_error(Point2 pred, Point2 gt) {
    return std::hypot(pred.x - gt.x, pred.y - gt.y);
}

/// Cosine is defined as 0 when either vector has norm below 1e-12.
inline VelocityErrors velocity_errors(Vec2 pred, Vec2 gt) {
    VelocityErrors e;
    e.euclidean = std::hypot(pred.x - gt.x, pred.y - gt.y);
    const double np = pred.norm(), ng = gt.norm();
    e.cosine = (np < 1e-12 || ng < 1e-12)
                   ? 0.0
                   : std::clamp((pred.x * gt.x + pred.y * gt.y) / (np * ng), -1.0, 1.0);
    e.magnitude = std::abs(np - ng);
    return e;
}

namespace detail {

struct PixelGrid {
    int x0 = 0, y0 = 0, w = 0, h = 0;

    static PixelGrid covering(double mnx, double mny, double mxx, double mxy) {
        PixelGrid g;
        g.x0 = static_cast<int>(std::floor(mnx)) - 1;
        g.y0 = static_cast<int>(std::floor(mny)) - 1;
        g.w = static_cast<int>(std::ceil(mxx)) + 2 - g.x0;
        g.h = static_cast<int>(std::ceil(mxy)) + 2 - g.y0;
        return g;
    }
};

/// Rasterizes a box onto the grid: pixel (i, j) is inside when its sample
/// point (i + 0.5, j + 0.5) lies in the quad (boundary inclusive).
inline void rasterize_box(const RotatedBox& box, const PixelGrid& g, std::vector<bool>& out) {
    for (int j = 0; j < g.h; ++j)
        for (int i = 0; i < g.w; ++i)
            if (point_in_box(box, {g.x0 + i + 0.5, g.y0 + j + 0.5}))
                out[static_cast<std::size_t>(j) * static_cast<std::size_t>(g.w) + static_cast<std::size_t>(i)] = true;
}

inline void rasterize_mask(const BinaryMask& mask, const PixelGrid& g, std::vector<bool>& out) {
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            const int i = static_cast<int>(std::llround(mask.origin.x)) + x - g.x0;
            const int j = static_cast<int>(std::llround(mask.origin.y)) + y - g.y0;
            if (i >= 0 && i < g.w && j >= 0 && j < g.h)
                out[static_cast<std::size_t>(j) * static_cast<std::size_t>(g.w) + static_cast<std::size_t>(i)] = true;
        }
    }
}

inline double iou(const std::vector<bool>& a, const std::vector<bool>& b) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += (a[i] && b[i]) ? 1u : 0u;
        uni += (a[i] || b[i]) ? 1u : 0u;
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace detail

/// Rasterized intersection-over-union of two rotated boxes.
inline double overlap(const RotatedBox& a, const RotatedBox& b) {
    const auto ha = a.hull();
    const auto hb = b.hull();
    const auto g = detail::PixelGrid::covering(std::min(ha[0], hb[0]), std::min(ha[1], hb[1]),
                                               std::max(ha[2], hb[2]), std::max(ha[3], hb[3]));
    std::vector<bool> ra(static_cast<std::size_t>(g.w) * static_cast<std::size_t>(g.h), false), rb = ra;
    detail::rasterize_box(a, g, ra);
    detail::rasterize_box(b, g, rb);
    return detail::iou(ra, rb);
}

/// Rasterized IoU of a mask against a gt box (the spec's failure test shape).
inline double overlap(const BinaryMask& mask, const RotatedBox& gt) {
    if (mask.empty()) return 0.0;
    const auto hb = gt.hull();
    const auto g = detail::PixelGrid::covering(
        std::min(mask.origin.x, hb[0]), std::min(mask.origin.y, hb[1]),
        std::max(mask.origin.x + mask.width, hb[2]),
        std::max(mask.origin.y + mask.height, hb[3]));
    std::vector<bool> ra(static_cast<std::size_t>(g.w) * static_cast<std::size_t>(g.h), false), rb = ra;
    detail::rasterize_mask(mask, g, ra);
    detail::rasterize_box(gt, g, rb);
    return detail::iou(ra, rb);
}

/// Ground truth for one frame as the metrics module consumes it.
struct FrameTruth {
    Point2 center;         // pending-frame coordinates
    Vec2 velocity;         // same convention as the tracker's prediction
    RotatedBox box;
};

/// Aggregates a run. Position/velocity errors and accuracy are computed over
/// status==Tracked frames; Reinitializing and Failed frames are excluded.
inline SummaryReport summarize(const TrackRecord& record,
                               const std::vector<FrameTruth>& gt) {
    if (record.frames.size() != gt.size())
        throw LengthMismatch("summarize: record and gt length differ");

    SummaryReport rep;
    rep.failure_count = record.failure_count;
    rep.total_frames = static_cast<int>(record.frames.size());

    double pos_sum = 0, eu_sum = 0, cos_sum = 0, mag_sum = 0, ov_sum = 0;
    int n = 0;
    for (std::size_t i = 0; i < record.frames.size(); ++i) {
        const auto& f = record.frames[i];
        if (f.status != TrackStatus::Tracked) continue;
        ++n;
        pos_sum += position_error(f.predicted_center, gt[i].center);
        const auto ve = velocity_errors(f.predicted_velocity, gt[i].velocity);
        eu_sum += ve.euclidean;
        cos_sum += ve.cosine;
        mag_sum += ve.magnitude;
        ov_sum += overlap(f.box, gt[i].box);
    }
    rep.tracked_frames = n;
    if (n > 0) {
        const double dn = static_cast<double>(n);
        rep.mean_position_error = pos_sum / dn;
        rep.mean_velocity_errors = {eu_sum / dn, cos_sum / dn, mag_sum / dn};
        rep.accuracy = ov_sum / dn;
    }
    return rep;
}

} // namespace pts
