#include <catch2/catch_amalgamated.hpp>

#include "pts/metrics.hpp"
#include "pts/random.hpp"

using namespace pts;

TEST_CASE("position_error") {
    CHECK(position_error({0, 0}, {3, 4}) == Catch::Approx(5.0));
    CHECK(position_error({2, 2}, {2, 2}) == Catch::Approx(0.0));
    CHECK(position_error({1, 1}, {-2, 5}) == Catch::Approx(5.0));
}

TEST_CASE("velocity_errors") {
    SECTION("orthogonal unit vectors") {
        const auto e = velocity_errors({1, 0}, {0, 1});
        CHECK(e.cosine == Catch::Approx(0.0).margin(1e-12));
        CHECK(e.euclidean == Catch::Approx(std::sqrt(2.0)));
        CHECK(e.magnitude == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("parallel vectors") {
        const auto e = velocity_errors({3, 4}, {6, 8});
        CHECK(e.cosine == Catch::Approx(1.0));
        CHECK(e.magnitude == Catch::Approx(5.0));
        CHECK(e.euclidean == Catch::Approx(5.0));
    }
    SECTION("degenerate zero vectors") {
        const auto e = velocity_errors({0, 0}, {0, 0});
        CHECK(e.cosine == 0.0);
        CHECK(e.euclidean == 0.0);
        CHECK(e.magnitude == 0.0);
    }
}

TEST_CASE("overlap of rotated boxes") {
    const RotatedBox a = RotatedBox::axis_aligned(0, 0, 10, 10);
    CHECK(overlap(a, a) == Catch::Approx(1.0));

    const RotatedBox far = RotatedBox::axis_aligned(100, 100, 10, 10);
    CHECK(overlap(a, far) == Catch::Approx(0.0));

    // 10x10 squares offset by 5: IoU = 50 / 150 = 1/3 exactly at 1-px raster
    const RotatedBox b = RotatedBox::axis_aligned(5, 0, 10, 10);
    CHECK(overlap(a, b) == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("overlap is symmetric") {
    Rng rng(7);
    for (int i = 0; i < 30; ++i) {
        const RotatedBox a = RotatedBox::axis_aligned(uniform_range(rng, 0, 50), uniform_range(rng, 0, 50),
                                                      uniform_range(rng, 2, 30), uniform_range(rng, 2, 30));
        const RotatedBox b = RotatedBox::axis_aligned(uniform_range(rng, 0, 50), uniform_range(rng, 0, 50),
                                                      uniform_range(rng, 2, 30), uniform_range(rng, 2, 30));
        REQUIRE(overlap(a, b) == Catch::Approx(overlap(b, a)).margin(1e-12));
    }
}

TEST_CASE("overlap of mask against box") {
    BinaryMask m(10, 10, {0, 0});
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x)
            m.set(x, y);
    const RotatedBox hit = RotatedBox::axis_aligned(0, 0, 10, 10);
    CHECK(overlap(m, hit) > 0.8);
    const RotatedBox miss = RotatedBox::axis_aligned(50, 50, 10, 10);
    CHECK(overlap(m, miss) == Catch::Approx(0.0));
    CHECK(overlap(BinaryMask{}, hit) == 0.0);
}

namespace {

TrackRecord make_record(const std::vector<TrackOutput>& frames, int failures = 0) {
    TrackRecord r;
    r.frames = frames;
    r.failure_count = failures;
    return r;
}

TrackOutput tracked_frame(int t, Point2 pred, Vec2 vel, RotatedBox box) {
    TrackOutput o;
    o.frame_index = t;
    o.predicted_center = pred;
    o.predicted_velocity = vel;
    o.box = box;
    o.status = TrackStatus::Tracked;
    return o;
}

} // namespace

TEST_CASE("summarize on a perfect record") {
    std::vector<TrackOutput> frames;
    std::vector<FrameTruth> gt;
    for (int t = 0; t < 10; ++t) {
        const RotatedBox box = RotatedBox::axis_aligned(10.0 + 2 * t, 5.0 + t, 8, 8);
        frames.push_back(tracked_frame(t, box.center(), {2, 1}, box));
        gt.push_back({box.center(), {2, 1}, box});
    }
    const SummaryReport rep = summarize(make_record(frames), gt);
    CHECK(rep.mean_position_error == Catch::Approx(0.0).margin(1e-12));
    CHECK(rep.mean_velocity_errors.cosine == Catch::Approx(1.0));
    CHECK(rep.accuracy == Catch::Approx(1.0));
    CHECK(rep.failure_count == 0);
    CHECK(rep.tracked_frames == 10);
}

TEST_CASE("summarize with a constant prediction offset") {
    std::vector<TrackOutput> frames;
    std::vector<FrameTruth> gt;
    for (int t = 0; t < 8; ++t) {
        const RotatedBox box = RotatedBox::axis_aligned(20.0 + t, 30.0, 6, 6);
        const Point2 c = box.center();
        frames.push_back(tracked_frame(t, {c.x + 2, c.y}, {1, 0}, box));
        gt.push_back({c, {1, 0}, box});
    }
    const SummaryReport rep = summarize(make_record(frames), gt);
    CHECK(rep.mean_position_error == Catch::Approx(2.0));
}

TEST_CASE("summarize hand-computed three-frame record") {
    // frame 0: err 5 (3-4-5), cosine 1; frame 1: reinitializing (excluded);
    // frame 2: err 1, cosine 0.
    std::vector<TrackOutput> frames;
    std::vector<FrameTruth> gt;

    const RotatedBox b0 = RotatedBox::axis_aligned(0, 0, 10, 10);
    frames.push_back(tracked_frame(0, {8, 9}, {2, 0}, b0));
    gt.push_back({{5, 5}, {4, 0}, b0});

    TrackOutput skip;
    skip.frame_index = 1;
    skip.status = TrackStatus::Reinitializing;
    frames.push_back(skip);
    gt.push_back({{0, 0}, {0, 0}, b0});

    const RotatedBox b2 = RotatedBox::axis_aligned(5, 0, 10, 10);
    frames.push_back(tracked_frame(2, {11, 5}, {0, 3}, b2));
    gt.push_back({{10, 5}, {2, 0}, RotatedBox::axis_aligned(0, 0, 10, 10)});

    const SummaryReport rep = summarize(make_record(frames, 1), gt);
    CHECK(rep.tracked_frames == 2);
    CHECK(rep.mean_position_error == Catch::Approx((5.0 + 1.0) / 2));
    CHECK(rep.mean_velocity_errors.cosine == Catch::Approx((1.0 + 0.0) / 2));
    CHECK(rep.mean_velocity_errors.magnitude == Catch::Approx((2.0 + 1.0) / 2));
    CHECK(rep.mean_velocity_errors.euclidean == Catch::Approx((2.0 + std::sqrt(13.0)) / 2));
    CHECK(rep.accuracy == Catch::Approx((1.0 + 1.0 / 3.0) / 2));
    CHECK(rep.failure_count == 1);
}

TEST_CASE("summarize equals naive recomputation on random records") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(uniform_index(rng, 12));
        std::vector<TrackOutput> frames;
        std::vector<FrameTruth> gt;
        for (int t = 0; t < n; ++t) {
            TrackOutput o;
            o.frame_index = t;
            const int st = static_cast<int>(uniform_index(rng, 3));
            o.status = st == 0 ? TrackStatus::Tracked
                     : st == 1 ? TrackStatus::Failed
                               : TrackStatus::Reinitializing;
            o.predicted_center = {uniform_range(rng, 0, 50), uniform_range(rng, 0, 50)};
            o.predicted_velocity = {uniform_range(rng, -5, 5), uniform_range(rng, -5, 5)};
            o.box = RotatedBox::axis_aligned(uniform_range(rng, 0, 40), uniform_range(rng, 0, 40),
                                             uniform_range(rng, 2, 12), uniform_range(rng, 2, 12));
            frames.push_back(o);
            gt.push_back({{uniform_range(rng, 0, 50), uniform_range(rng, 0, 50)},
                          {uniform_range(rng, -5, 5), uniform_range(rng, -5, 5)},
                          RotatedBox::axis_aligned(uniform_range(rng, 0, 40), uniform_range(rng, 0, 40),
                                                   uniform_range(rng, 2, 12), uniform_range(rng, 2, 12))});
        }
        const SummaryReport rep = summarize(make_record(frames), gt);

        // independent per-frame accumulation
        double pos = 0, eu = 0, cosv = 0, mag = 0, ov = 0;
        int tracked = 0;
        for (int t = 0; t < n; ++t) {
            if (frames[static_cast<std::size_t>(t)].status != TrackStatus::Tracked) continue;
            ++tracked;
            const auto& f = frames[static_cast<std::size_t>(t)];
            const auto& g = gt[static_cast<std::size_t>(t)];
            pos += std::hypot(f.predicted_center.x - g.center.x, f.predicted_center.y - g.center.y);
            const double np = f.predicted_velocity.norm(), ng = g.velocity.norm();
            eu += std::hypot(f.predicted_velocity.x - g.velocity.x, f.predicted_velocity.y - g.velocity.y);
            cosv += (np < 1e-12 || ng < 1e-12)
                        ? 0.0
                        : (f.predicted_velocity.x * g.velocity.x + f.predicted_velocity.y * g.velocity.y) / (np * ng);
            mag += std::abs(np - ng);
            ov += overlap(f.box, g.box);
        }
        REQUIRE(rep.tracked_frames == tracked);
        if (tracked > 0) {
            REQUIRE(rep.mean_position_error == Catch::Approx(pos / tracked).margin(1e-12));
            REQUIRE(rep.mean_velocity_errors.euclidean == Catch::Approx(eu / tracked).margin(1e-12));
            REQUIRE(rep.mean_velocity_errors.cosine == Catch::Approx(cosv / tracked).margin(1e-12));
            REQUIRE(rep.mean_velocity_errors.magnitude == Catch::Approx(mag / tracked).margin(1e-12));
            REQUIRE(rep.accuracy == Catch::Approx(ov / tracked).margin(1e-12));
        }
    }
}

TEST_CASE("summarize length mismatch") {
    TrackRecord r;
    r.frames.resize(3);
    std::vector<FrameTruth> gt(2);
    CHECK_THROWS_AS(summarize(r, gt), LengthMismatch);
}
