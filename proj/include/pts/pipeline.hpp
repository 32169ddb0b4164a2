#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pts/errors.hpp"
#include "pts/geometry.hpp"
#include "pts/image.hpp"
#include "pts/matcher.hpp"
#include "pts/metrics.hpp"
#include "pts/motion.hpp"
#include "pts/region.hpp"
#include "pts/track_types.hpp"

namespace pts {

struct TrackerConfig {
    int reference_interval = 10;   // n
    int reinit_gap = 5;            // frames skipped after a failure
    std::string matcher_key = "ncc";
    double objectness_threshold = 0.25;
    RegionConfig region;
    KalmanConfig kalman;
    RansacConfig ransac;
    MatcherConfig matcher;
};

/// Ablation modes. Baseline recenters on the last measurement with a fixed
/// window (the conventional tracker prior); the partial modes disable one
/// half of the prediction chain each.
enum class TrackMode { Pts, Baseline, PtsNoRegion, PtsNoPrediction };

inline TrackMode parse_track_mode(const std::string& s) {
    if (s == "pts") return TrackMode::Pts;
    if (s == "baseline") return TrackMode::Baseline;
    if (s == "pts-no-region") return TrackMode::PtsNoRegion;
    if (s == "pts-no-prediction") return TrackMode::PtsNoPrediction;
    throw ConfigError("unknown mode: " + s);
}

/// Single-object tracking session: a mutable state machine fed one frame at
/// a time. Distinct sessions share nothing and may run on different threads.
class Session {
public:
    Session() = default;

    /// Starts a track: crops the template from the init box's axis-aligned
    /// hull, initializes the filter at the box center with zero velocity,
    /// and makes this frame the reference.
    void init(const Image& frame, const RotatedBox& init_box, const TrackerConfig& cfg,
              TrackMode mode = TrackMode::Pts, int frame_index = 0) {
        const auto hull = init_box.hull();
        const double w = hull[2] - hull[0];
        const double h = hull[3] - hull[1];
        if (w < 1.0 || h < 1.0)
            throw BoxOutOfBounds("init box is degenerate");
        const int x0 = static_cast<int>(std::floor(hull[0]));
        const int y0 = static_cast<int>(std::floor(hull[1]));
        const int x1 = static_cast<int>(std::ceil(hull[2]));
        const int y1 = static_cast<int>(std::ceil(hull[3]));
        if (x1 <= 0 || y1 <= 0 || x0 >= frame.width - 1 || y0 >= frame.height - 1)
            throw BoxOutOfBounds("init box outside frame");

        cfg_ = cfg;
        mode_ = mode;
        matcher_ = make_matcher(cfg.matcher_key, cfg.matcher);

        const int cx0 = std::max(x0, 0), cy0 = std::max(y0, 0);
        const int cx1 = std::min(x1, frame.width - 1), cy1 = std::min(y1, frame.height - 1);
        template_ = Image(cx1 - cx0 + 1, cy1 - cy0 + 1);
        for (int y = cy0; y <= cy1; ++y)
            for (int x = cx0; x <= cx1; ++x)
                template_.at(x - cx0, y - cy0) = frame.at(x, y);
        template_w_ = w;
        template_h_ = h;

        const Point2 center = init_box.center();
        state_ = MotionState{};
        state_.set_position(center);
        state_.set_velocity({0.0, 0.0});
        state_.P = cfg.kalman.P0;
        state_.frame_index = frame_index;

        frame_index_ = frame_index;
        ref_index_ = frame_index;
        init_position_ = center;
        last_measured_ref_ = center;
        bootstrapped_ = false;
        initialized_ = true;
    }

    bool initialized() const { return initialized_; }
    const MotionState& state() const { return state_; }
    int reference_index() const { return ref_index_; }
    TrackMode mode() const { return mode_; }

    /// Re-expresses a freshly initialized state (in current-frame coordinates)
    /// in an earlier reference frame, so mid-sequence re-inits stay aligned
    /// with the global reference schedule the correspondence files follow.
    void rebase(const Homography& h_frame_to_ref, int ref_index) {
        if (!initialized_)
            throw NotInitialized("rebase before init");
        state_ = advance_reference(state_, h_frame_to_ref);
        last_measured_ref_ = apply_homography(h_frame_to_ref, last_measured_ref_);
        init_position_ = apply_homography(h_frame_to_ref, init_position_);
        ref_index_ = ref_index;
    }

    /// Advances one frame. `matches` relate the current reference frame to
    /// this pending frame; geometry failures degrade to status=Failed.
    TrackOutput step(const Image& frame, const std::vector<PointMatch>& matches) {
        if (!initialized_)
            throw NotInitialized("step before init");
        const int t = ++frame_index_;

        // (1) camera motion: reference -> pending map.
        Homography h = Homography::identity();
        if (uses_homography()) {
            try {
                h = ransac_homography(matches, cfg_.ransac).first;
            } catch (const Error&) {
                h = Homography::identity();   // degrade gracefully
            }
        }

        // (2) predict.
        const MotionState prior = kalman_predict(state_, cfg_.kalman);

        // Search center: prediction-driven modes extrapolate, the others
        // recenter on the last measured position.
        const Point2 center_ref = uses_prediction() ? prior.position() : last_measured_ref_;
        const Vec2 sizing_velocity = prior.velocity();

        TrackOutput out;
        out.frame_index = t;
        out.predicted_velocity = uses_prediction() ? prior.velocity() : Vec2{0.0, 0.0};

        // (3)-(4) adaptive region and patch.
        double k;
        if (uses_adaptive_region())
            k = adaptive_scale(sizing_velocity, cfg_.region.velocity_threshold);
        else
            k = 2.0;

        out.predicted_center = apply_safe(h, center_ref);

        MotionState next = prior;
        try {
            SearchRegion region;
            region.center = apply_homography(h, center_ref);
            region.side = region_size(template_w_, template_h_, k);
            region.out_resolution = cfg_.region.out_resolution;

            auto [patch, xform] = extract_patch(frame, region, cfg_.region);

            // (5) appearance matching at patch scale.
            const double zoom = static_cast<double>(region.out_resolution) / region.side;
            const int tw = std::max(2, static_cast<int>(std::lround(template_.width * zoom)));
            const int th = std::max(2, static_cast<int>(std::lround(template_.height * zoom)));
            const Image tmpl_scaled = resize_image(template_, tw, th);
            const MatchResult mr = matcher_->match(tmpl_scaled, patch);
            out.score = mr.score;

            if (mr.mask.empty() || mr.score < cfg_.objectness_threshold) {
                out.status = TrackStatus::Failed;
                out.box = degenerate_box(region.center);
            } else {
                out.status = TrackStatus::Tracked;
                out.mask = mask_to_frame(mr.mask, xform, frame);
                out.box = box_to_frame(mr.box, xform);

                // (6)-(7) measure and correct in reference coordinates.
                const Point2 center_patch = center_of_mass(mr.mask);
                const Point2 center_frame = xform.to_frame(center_patch);
                const Point2 z_ref = apply_homography(invert_homography(h), center_frame);
                next = kalman_correct(prior, z_ref, cfg_.kalman);
                if (!bootstrapped_) {
                    next.set_velocity(bootstrap_velocity(init_position_, z_ref));
                    bootstrapped_ = true;
                }
                last_measured_ref_ = z_ref;
            }
        } catch (const Error&) {
            out.status = TrackStatus::Failed;
            out.box = degenerate_box(out.predicted_center);
            out.score = 0.0;
        }
        state_ = next;

        // (8) slice a new reference every n frames; remap the refined state.
        if (t - ref_index_ >= cfg_.reference_interval) {
            try {
                state_ = advance_reference(state_, h);
                last_measured_ref_ = apply_homography(h, last_measured_ref_);
                init_position_ = apply_homography(h, init_position_);
            } catch (const Error&) {
                // Keep the old reference on a pathological map.
            }
            ref_index_ = t;
        }
        return out;
    }

private:
    bool uses_homography() const {
        return mode_ == TrackMode::Pts || mode_ == TrackMode::PtsNoRegion;
    }
    bool uses_prediction() const {
        return mode_ == TrackMode::Pts || mode_ == TrackMode::PtsNoRegion;
    }
    bool uses_adaptive_region() const {
        return mode_ == TrackMode::Pts || mode_ == TrackMode::PtsNoPrediction;
    }

    static RotatedBox degenerate_box(Point2 p) {
        return {{p, p, p, p}};
    }

    static Point2 apply_safe(const Homography& h, Point2 p) {
        try {
            return apply_homography(h, p);
        } catch (const Error&) {
            return p;
        }
    }

    /// Resamples a patch-space mask onto the integer frame grid.
    static BinaryMask mask_to_frame(const BinaryMask& mask, const PatchTransform& xf,
                                    const Image& frame) {
        const Point2 lo = xf.to_frame({mask.origin.x - 0.5, mask.origin.y - 0.5});
        const Point2 hi = xf.to_frame({mask.origin.x + mask.width - 0.5,
                                       mask.origin.y + mask.height - 0.5});
        int x0 = std::max(0, static_cast<int>(std::floor(lo.x)));
        int y0 = std::max(0, static_cast<int>(std::floor(lo.y)));
        int x1 = std::min(frame.width - 1, static_cast<int>(std::ceil(hi.x)));
        int y1 = std::min(frame.height - 1, static_cast<int>(std::ceil(hi.y)));
        if (x1 < x0 || y1 < y0)
            return BinaryMask{};

        BinaryMask out(x1 - x0 + 1, y1 - y0 + 1,
                       Point2{static_cast<double>(x0), static_cast<double>(y0)});
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const Point2 p = xf.to_patch({static_cast<double>(x), static_cast<double>(y)});
                const int mx = static_cast<int>(std::lround(p.x - mask.origin.x));
                const int my = static_cast<int>(std::lround(p.y - mask.origin.y));
                if (mx >= 0 && mx < mask.width && my >= 0 && my < mask.height && mask.get(mx, my))
                    out.set(x - x0, y - y0);
            }
        }
        return out;
    }

    static RotatedBox box_to_frame(const RotatedBox& box, const PatchTransform& xf) {
        RotatedBox out;
        for (std::size_t i = 0; i < 4; ++i)
            out.corners[i] = xf.to_frame(box.corners[i]);
        return out;
    }

    TrackerConfig cfg_;
    TrackMode mode_ = TrackMode::Pts;
    std::unique_ptr<Matcher> matcher_;
    Image template_;
    double template_w_ = 0, template_h_ = 0;
    MotionState state_;
    int frame_index_ = 0;
    int ref_index_ = 0;
    Point2 init_position_;
    Point2 last_measured_ref_;
    bool bootstrapped_ = false;
    bool initialized_ = false;
};

/// Output emitted for initialization frames (frame 0 and post-failure
/// re-inits): the ground-truth box stands in for the tracker output.
inline TrackOutput init_frame_output(int frame_index, const RotatedBox& gt_box) {
    TrackOutput out;
    out.frame_index = frame_index;
    out.predicted_center = gt_box.center();
    out.predicted_velocity = {0.0, 0.0};
    out.box = gt_box;
    const auto hull = gt_box.hull();
    const int x0 = static_cast<int>(std::lround(hull[0]));
    const int y0 = static_cast<int>(std::lround(hull[1]));
    const int x1 = static_cast<int>(std::lround(hull[2]));
    const int y1 = static_cast<int>(std::lround(hull[3]));
    BinaryMask mask(std::max(1, x1 - x0 + 1), std::max(1, y1 - y0 + 1),
                    Point2{static_cast<double>(x0), static_cast<double>(y0)});
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (point_in_box(gt_box, {static_cast<double>(x0 + x), static_cast<double>(y0 + y)}))
                mask.set(x, y);
    out.mask = std::move(mask);
    out.score = 1.0;
    out.status = TrackStatus::Tracked;
    return out;
}

/// Runs a whole sequence under the VOT protocol: on zero mask-vs-gt overlap
/// a failure is recorded, reinit_gap frames are skipped, and the tracker is
/// re-initialized from ground truth. `use_reinit_protocol=false` gives a raw
/// continuous run (no failures recorded, no re-initialization).
inline TrackRecord run_sequence(const std::vector<Image>& frames,
                                const std::vector<RotatedBox>& gt,
                                const std::vector<std::vector<PointMatch>>& matches,
                                const TrackerConfig& cfg,
                                TrackMode mode = TrackMode::Pts,
                                bool use_reinit_protocol = true) {
    if (frames.size() != gt.size() || frames.size() != matches.size())
        throw LengthMismatch("run_sequence: frames/gt/matches lengths differ");
    if (frames.empty())
        throw LengthMismatch("run_sequence: empty sequence");

    TrackRecord record;
    Session session;
    session.init(frames[0], gt[0], cfg, mode, 0);
    record.frames.push_back(init_frame_output(0, gt[0]));

    const bool uses_h = mode == TrackMode::Pts || mode == TrackMode::PtsNoRegion;
    const int n = cfg.reference_interval;

    int resume_at = -1;
    for (std::size_t t = 1; t < frames.size(); ++t) {
        const int ti = static_cast<int>(t);
        if (resume_at >= 0) {
            if (ti < resume_at) {
                TrackOutput skip;
                skip.frame_index = ti;
                skip.status = TrackStatus::Reinitializing;
                record.frames.push_back(std::move(skip));
                continue;
            }
            session.init(frames[t], gt[t], cfg, mode, ti);
            // Correspondence files follow the global schedule r(t); map the
            // fresh state back into the reference that upcoming frames use.
            const int global_ref = n * (ti / n);
            if (uses_h && global_ref != ti) {
                try {
                    const Homography h_ref_to_here =
                        ransac_homography(matches[t], cfg.ransac).first;
                    session.rebase(invert_homography(h_ref_to_here), global_ref);
                } catch (const Error&) {
                    // Keep frame-local coordinates; jitter-sized error only.
                }
            }
            record.frames.push_back(init_frame_output(ti, gt[t]));
            resume_at = -1;
            continue;
        }

        TrackOutput out = session.step(frames[t], matches[t]);
        if (use_reinit_protocol) {
            const double ov = overlap(out.mask, gt[t]);
            if (ov <= 0.0) {
                out.status = TrackStatus::Failed;
                record.failure_count += 1;
                record.reinit_events.push_back(ti);
                resume_at = ti + cfg.reinit_gap + 1;
            }
        }
        record.frames.push_back(std::move(out));
    }
    return record;
}

} // namespace pts
