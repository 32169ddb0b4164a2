#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "pts/errors.hpp"
#include "pts/geometry.hpp"
#include "pts/image.hpp"

namespace pts {

/// Square search crop in pending-frame coordinates.
struct SearchRegion {
    Point2 center;
    double side = 0.0;        // S, pixels
    int out_resolution = 255;
};

struct RegionConfig {
    double velocity_threshold = 5.0;        // T, px/frame
    int out_resolution = 255;
    std::optional<double> pad_value;        // empty -> per-frame mean intensity
};

/// k = 1 + 2*sigmoid(||v|| - T), clamped into the open interval (1, 3) at
/// the saturation points of the double-precision sigmoid.
inline double adaptive_scale(Vec2 v, double velocity_threshold) {
    const double z = v.norm() - velocity_threshold;
    const double sig = 1.0 / (1.0 + std::exp(-z));
    double k = 1.0 + 2.0 * sig;
    k = std::min(k, std::nextafter(3.0, 0.0));
    k = std::max(k, std::nextafter(1.0, 2.0));
    return k;
}

/// S = k * sqrt((w+p)(h+p)), p = (w+h)/2.
inline double region_size(double w, double h, double k) {
    if (w <= 0.0 || h <= 0.0 || k <= 0.0)
        throw NonPositiveExtent("region_size: extents and k must be positive");
    const double p = 0.5 * (w + h);
    return k * std::sqrt((w + p) * (h + p));
}

inline SearchRegion build_search_region(Point2 center_ref,
                                        const Homography& h_ref_to_pending,
                                        double w, double h, Vec2 v,
                                        const RegionConfig& cfg) {
    SearchRegion region;
    region.center = apply_homography(h_ref_to_pending, center_ref);
    region.side = region_size(w, h, adaptive_scale(v, cfg.velocity_threshold));
    region.out_resolution = cfg.out_resolution;
    return region;
}

/// Affine map between patch pixel coordinates and frame coordinates:
/// frame = scale * patch + offset, per axis.
struct PatchTransform {
    double scale = 1.0;
    double offset_x = 0.0;
    double offset_y = 0.0;

    Point2 to_frame(Point2 p) const {
        return {scale * p.x + offset_x, scale * p.y + offset_y};
    }
    Point2 to_patch(Point2 p) const {
        return {(p.x - offset_x) / scale, (p.y - offset_y) / scale};
    }
};

/// Samples the square window [center +- side/2]^2 to out_resolution^2 with
/// bilinear interpolation; out-of-frame samples take the pad value
/// (cfg.pad_value, or the frame mean when unset).
inline std::pair<Image, PatchTransform> extract_patch(const Image& frame,
                                                      const SearchRegion& region,
                                                      const RegionConfig& cfg) {
    const int o = region.out_resolution;
    const double pad = cfg.pad_value ? *cfg.pad_value : frame.mean();
    const double scale = region.side / static_cast<double>(o);

    PatchTransform xf;
    xf.scale = scale;
    xf.offset_x = region.center.x - 0.5 * region.side + 0.5 * scale;
    xf.offset_y = region.center.y - 0.5 * region.side + 0.5 * scale;

    Image patch(o, o);
    for (int y = 0; y < o; ++y) {
        const double fy = xf.scale * y + xf.offset_y;
        for (int x = 0; x < o; ++x) {
            const double fx = xf.scale * x + xf.offset_x;
            patch.at(x, y) = sample_bilinear(frame, fx, fy, pad);
        }
    }
    return {std::move(patch), xf};
}

} // namespace pts
