#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pts/errors.hpp"
#include "pts/geometry.hpp"

namespace pts {

/// Row-major grayscale image, intensities in [0,1].
/// Pixel (ix, iy) has its center at real coordinates (ix, iy).
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    double at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
    double& at(int x, int y) {
        return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
    bool empty() const { return width <= 0 || height <= 0; }

    double mean() const {
        if (data.empty()) return 0.0;
        double s = 0;
        for (double v : data) s += v;
        return s / static_cast<double>(data.size());
    }
};

/// Bilinear sample at real (x, y); positions outside [0,w-1]x[0,h-1] return `pad`.
inline double sample_bilinear(const Image& img, double x, double y, double pad) {
    if (x < 0.0 || y < 0.0 || x > img.width - 1.0 || y > img.height - 1.0)
        return pad;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = img.at(x0, y0) + (img.at(x1, y0) - img.at(x0, y0)) * fx;
    const double bot = img.at(x0, y1) + (img.at(x1, y1) - img.at(x0, y1)) * fx;
    return top + (bot - top) * fy;
}

/// Resample to new dimensions with bilinear interpolation (edge-clamped).
inline Image resize_image(const Image& img, int out_w, int out_h) {
    Image out(out_w, out_h);
    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
            const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
            out.at(x, y) = sample_bilinear(img, fx, fy, 0.0);
        }
    }
    return out;
}

/// Binary mask anchored at `origin` in its parent coordinate system:
/// bit (ix, iy) covers the parent pixel at (origin.x + ix, origin.y + iy).
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<bool> bits;
    Point2 origin{0.0, 0.0};

    BinaryMask() = default;
    BinaryMask(int w, int h, Point2 o = {0.0, 0.0})
        : width(w), height(h), bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), false), origin(o) {}

    bool get(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
    void set(int x, int y, bool v = true) {
        bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] = v;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (bool b : bits) c += b ? 1u : 0u;
        return c;
    }
    bool empty() const { return count() == 0; }
};

} // namespace pts
