#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "pts/box.hpp"
#include "pts/errors.hpp"
#include "pts/image.hpp"

namespace pts {

/// Dense similarity map. Cell (u, v) scores the template aligned with its
/// top-left corner at patch pixel (u + offset_x, v + offset_y); stride is 1.
struct ResponseMap {
    int width = 0;
    int height = 0;
    std::vector<double> scores;
    int offset_x = 0;
    int offset_y = 0;
    int footprint_w = 0;   // template extent the cells were scored with
    int footprint_h = 0;

    double at(int u, int v) const {
        return scores[static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u)];
    }

    /// Argmax cell, first occurrence in row-major order.
    std::pair<int, int> peak() const {
        int bu = 0, bv = 0;
        double best = scores.empty() ? 0.0 : scores[0];
        for (int v = 0; v < height; ++v)
            for (int u = 0; u < width; ++u)
                if (at(u, v) > best) {
                    best = at(u, v);
                    bu = u;
                    bv = v;
                }
        return {bu, bv};
    }
};

struct MatchResult {
    BinaryMask mask;      // patch coordinates
    RotatedBox box;       // patch coordinates
    double score = 0.0;   // objectness in [0, 1]
};

/// Zero-mean normalized cross-correlation of `tmpl` against every aligned
/// window of `patch`. Scores are in [-1, 1]; a perfect match scores 1.
/// Windows with vanishing variance score 0.
inline ResponseMap match_template(const Image& tmpl, const Image& patch) {
    if (tmpl.width > patch.width || tmpl.height > patch.height)
        throw TemplateLargerThanPatch("template exceeds patch size");
    const int tw = tmpl.width, th = tmpl.height;
    const int pw = patch.width, ph = patch.height;
    const std::size_t tn = static_cast<std::size_t>(tw) * static_cast<std::size_t>(th);

    double tmean = 0;
    for (double v : tmpl.data) tmean += v;
    tmean /= static_cast<double>(tn);
    std::vector<double> tz(tn);
    double tvar = 0;
    for (std::size_t i = 0; i < tn; ++i) {
        tz[i] = tmpl.data[i] - tmean;
        tvar += tz[i] * tz[i];
    }
    if (tvar < 1e-12)
        throw ZeroVarianceTemplate("template has no intensity variance");
    const double tnorm = std::sqrt(tvar);

    // Integral images over patch and patch^2 for O(1) window sums.
    const int iw = pw + 1;
    std::vector<double> s1(static_cast<std::size_t>(iw) * static_cast<std::size_t>(ph + 1), 0.0);
    std::vector<double> s2(s1.size(), 0.0);
    for (int y = 0; y < ph; ++y) {
        double row1 = 0, row2 = 0;
        for (int x = 0; x < pw; ++x) {
            const double v = patch.at(x, y);
            row1 += v;
            row2 += v * v;
            const std::size_t idx = static_cast<std::size_t>(y + 1) * static_cast<std::size_t>(iw) + static_cast<std::size_t>(x + 1);
            s1[idx] = s1[idx - static_cast<std::size_t>(iw)] + row1;
            s2[idx] = s2[idx - static_cast<std::size_t>(iw)] + row2;
        }
    }
    auto window_sums = [&](int x, int y, double& sum, double& sumsq) {
        const std::size_t a = static_cast<std::size_t>(y) * static_cast<std::size_t>(iw) + static_cast<std::size_t>(x);
        const std::size_t b = static_cast<std::size_t>(y) * static_cast<std::size_t>(iw) + static_cast<std::size_t>(x + tw);
        const std::size_t c = static_cast<std::size_t>(y + th) * static_cast<std::size_t>(iw) + static_cast<std::size_t>(x);
        const std::size_t d = static_cast<std::size_t>(y + th) * static_cast<std::size_t>(iw) + static_cast<std::size_t>(x + tw);
        sum = s1[d] - s1[b] - s1[c] + s1[a];
        sumsq = s2[d] - s2[b] - s2[c] + s2[a];
    };

    ResponseMap out;
    out.width = pw - tw + 1;
    out.height = ph - th + 1;
    out.footprint_w = tw;
    out.footprint_h = th;
    out.scores.resize(static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height));

    for (int v = 0; v < out.height; ++v) {
        for (int u = 0; u < out.width; ++u) {
            // Sum tz*W; the window mean cancels because sum(tz) == 0.
            double dot = 0;
            for (int y = 0; y < th; ++y) {
                const double* prow = &patch.data[static_cast<std::size_t>(v + y) * static_cast<std::size_t>(pw) + static_cast<std::size_t>(u)];
                const double* trow = &tz[static_cast<std::size_t>(y) * static_cast<std::size_t>(tw)];
                for (int x = 0; x < tw; ++x)
                    dot += trow[x] * prow[x];
            }
            double wsum, wsumsq;
            window_sums(u, v, wsum, wsumsq);
            const double wvar = wsumsq - wsum * wsum / static_cast<double>(tn);
            double score = 0.0;
            if (wvar > 1e-12)
                score = dot / (tnorm * std::sqrt(wvar));
            out.scores[static_cast<std::size_t>(v) * static_cast<std::size_t>(out.width) + static_cast<std::size_t>(u)] =
                std::clamp(score, -1.0, 1.0);
        }
    }
    return out;
}

/// Pixels within the template footprint at `peak` whose absolute intensity
/// difference from the aligned template pixel is below tau_pix, reduced to
/// the largest 4-connected component. May return an empty mask.
inline BinaryMask segment_response(const Image& tmpl, const Image& patch,
                                   std::pair<int, int> peak, double tau_pix) {
    const int tw = tmpl.width, th = tmpl.height;
    const int px = peak.first, py = peak.second;

    std::vector<int> label(static_cast<std::size_t>(tw) * static_cast<std::size_t>(th), 0); // 0 = out, -1 = candidate
    for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x)
            if (std::abs(patch.at(px + x, py + y) - tmpl.at(x, y)) < tau_pix)
                label[static_cast<std::size_t>(y) * static_cast<std::size_t>(tw) + static_cast<std::size_t>(x)] = -1;

    // Flood-fill components, keep the largest (first found wins ties).
    int best_label = 0;
    std::size_t best_size = 0;
    int next = 1;
    std::vector<std::pair<int, int>> stack;
    for (int y0 = 0; y0 < th; ++y0) {
        for (int x0 = 0; x0 < tw; ++x0) {
            if (label[static_cast<std::size_t>(y0) * static_cast<std::size_t>(tw) + static_cast<std::size_t>(x0)] != -1)
                continue;
            std::size_t size = 0;
            stack.push_back({x0, y0});
            label[static_cast<std::size_t>(y0) * static_cast<std::size_t>(tw) + static_cast<std::size_t>(x0)] = next;
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                ++size;
                const int nx[4] = {x - 1, x + 1, x, x};
                const int ny[4] = {y, y, y - 1, y + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || nx[k] >= tw || ny[k] < 0 || ny[k] >= th) continue;
                    auto& l = label[static_cast<std::size_t>(ny[k]) * static_cast<std::size_t>(tw) + static_cast<std::size_t>(nx[k])];
                    if (l == -1) {
                        l = next;
                        stack.push_back({nx[k], ny[k]});
                    }
                }
            }
            if (size > best_size) {
                best_size = size;
                best_label = next;
            }
            ++next;
        }
    }

    BinaryMask mask(tw, th, Point2{static_cast<double>(px), static_cast<double>(py)});
    if (best_label != 0)
        for (int y = 0; y < th; ++y)
            for (int x = 0; x < tw; ++x)
                if (label[static_cast<std::size_t>(y) * static_cast<std::size_t>(tw) + static_cast<std::size_t>(x)] == best_label)
                    mask.set(x, y);
    return mask;
}

/// Minimum-area rotated rectangle around the mask's foreground pixel centers.
inline RotatedBox fit_rotated_box(const BinaryMask& mask) {
    std::vector<Point2> pts;
    pts.reserve(mask.count());
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.get(x, y))
                pts.push_back({mask.origin.x + x, mask.origin.y + y});
    if (pts.empty())
        throw EmptyMask("fit_rotated_box: empty mask");
    return min_area_rect(pts);
}

/// Peak response clamped to [0, 1]; feeds the pipeline failure test.
inline double objectness(const ResponseMap& response) {
    double best = 0.0;
    for (double s : response.scores)
        best = std::max(best, s);
    return std::clamp(best, 0.0, 1.0);
}

/// Appearance matcher contract: template + search patch in, mask/box/score
/// out, all in patch coordinates. Implementations are stateless after
/// construction and usable from many threads.
class Matcher {
public:
    virtual ~Matcher() = default;
    virtual MatchResult match(const Image& tmpl, const Image& patch) const = 0;
};

struct MatcherConfig {
    double tau_pix = 0.15;
    /// A peak only counts as the target when its segmentation covers at
    /// least this fraction of the template footprint; lower-scoring peaks
    /// are tried in order otherwise.
    double min_mask_fraction = 0.25;
    int max_peak_candidates = 48;
};

class NccMatcher final : public Matcher {
public:
    explicit NccMatcher(MatcherConfig cfg = {}) : cfg_(cfg) {}

    MatchResult match(const Image& tmpl, const Image& patch) const override {
        const ResponseMap response = match_template(tmpl, patch);
        MatchResult r;
        r.score = objectness(response);

        const std::size_t need = static_cast<std::size_t>(
            cfg_.min_mask_fraction * static_cast<double>(tmpl.width) * static_cast<double>(tmpl.height));
        for (const auto& pk : peak_candidates(response, cfg_.max_peak_candidates)) {
            BinaryMask mask = segment_response(tmpl, patch, pk, cfg_.tau_pix);
            if (mask.count() >= std::max<std::size_t>(need, 1)) {
                r.box = fit_rotated_box(mask);
                r.mask = std::move(mask);
                return r;
            }
        }
        return r;   // nothing credible: empty mask, score reports the raw max
    }

private:
    /// Strongest response cells in score order, greedily suppressing close
    /// neighbours so one response hill does not use up every candidate slot.
    static std::vector<std::pair<int, int>> peak_candidates(const ResponseMap& response,
                                                            int max_candidates) {
        std::vector<int> order(response.scores.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return response.scores[static_cast<std::size_t>(a)] > response.scores[static_cast<std::size_t>(b)];
        });
        const int radius = std::max(std::max(response.footprint_w, response.footprint_h) / 8, 2);
        std::vector<std::pair<int, int>> out;
        for (int idx : order) {
            const int u = idx % response.width;
            const int v = idx / response.width;
            bool near_chosen = false;
            for (const auto& c : out)
                if (std::abs(c.first - u) <= radius && std::abs(c.second - v) <= radius) {
                    near_chosen = true;
                    break;
                }
            if (near_chosen) continue;
            out.push_back({u, v});
            if (static_cast<int>(out.size()) >= max_candidates) break;
        }
        return out;
    }

    MatcherConfig cfg_;
};

/// Matcher plug-ins are selected by key; "ncc" is the reference implementation.
inline std::unique_ptr<Matcher> make_matcher(const std::string& key,
                                             MatcherConfig cfg = {}) {
    if (key == "ncc")
        return std::make_unique<NccMatcher>(cfg);
    throw ConfigError("unknown matcher key: " + key);
}

} // namespace pts
