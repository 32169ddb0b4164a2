#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pts/box.hpp"
#include "pts/errors.hpp"
#include "pts/geometry.hpp"
#include "pts/image.hpp"
#include "pts/io.hpp"
#include "pts/random.hpp"

namespace pts {

struct TrajectorySegment {
    int frames = 0;
    Vec2 velocity;
};

struct ObjectSpec {
    double width = 40, height = 40;
    std::uint64_t texture_seed = 11;
    Point2 start;
    std::vector<TrajectorySegment> segments;
};

struct DistractorSpec {
    bool identical_texture = true;
    std::uint64_t texture_seed = 23;   // used when identical_texture is false
    double width = 36, height = 36;
    Point2 start;
    std::vector<TrajectorySegment> segments;
};

struct OccluderSpec {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;   // world rect
    int first_frame = 0, last_frame = -1;    // active interval, inclusive
    double intensity = 0.05;
};

struct CameraSpec {
    double translation_sigma = 0.0;   // px, independent per frame
    double rotation_sigma_deg = 0.0;  // about the image center
};

struct ScenarioSpec {
    int width = 480, height = 360;
    int frame_count = 60;
    ObjectSpec object;
    CameraSpec camera;
    std::vector<DistractorSpec> distractors;
    std::vector<OccluderSpec> occluders;
    std::uint64_t background_seed = 7;
    double match_noise_sigma = 0.0;
    double outlier_fraction = 0.0;
    int match_count = 200;
    int reference_interval = 10;   // schedule the emitted matches follow
};

/// Ground truth emitted alongside the rendered frames.
struct SyntheticTruth {
    int reference_interval = 10;
    std::vector<Point2> centers;           // object center, frame coords
    std::vector<Point2> world_positions;   // object center, world coords
    std::vector<Vec2> velocities;          // world coords, p(t) - p(t-1)
    std::vector<Homography> camera;        // world -> frame t (identity at t=0)
    std::vector<Homography> ref_to_frame;  // r(t) -> t
    std::vector<RotatedBox> boxes;         // frame coords
    std::vector<std::vector<PointMatch>> true_matches;  // noise-free
};

struct SyntheticSequence {
    std::vector<Image> frames;
    SyntheticTruth truth;
    std::vector<std::vector<PointMatch>> matches;  // as emitted (noise+outliers)
};

namespace detail {

inline std::vector<Point2> trajectory_positions(Point2 start,
                                                const std::vector<TrajectorySegment>& segments,
                                                int frame_count) {
    std::vector<Point2> pos(static_cast<std::size_t>(frame_count));
    pos[0] = start;
    std::size_t seg = 0;
    int left = segments.empty() ? 0 : segments[0].frames;
    Vec2 v = segments.empty() ? Vec2{0, 0} : segments[0].velocity;
    for (int t = 1; t < frame_count; ++t) {
        while (left <= 0 && seg + 1 < segments.size()) {
            ++seg;
            left = segments[seg].frames;
            v = segments[seg].velocity;
        }
        // Past the last segment the trajectory keeps its final velocity.
        if (left <= 0 && !segments.empty()) v = segments.back().velocity;
        pos[static_cast<std::size_t>(t)] = pos[static_cast<std::size_t>(t - 1)] + v;
        --left;
    }
    return pos;
}

struct EntityFrame {
    Point2 center;
    double half_w, half_h;
    std::uint64_t seed;
    bool lookalike = false;   // blend with a companion pattern (see below)
};

inline bool in_rect(Point2 p, Point2 c, double hw, double hh) {
    return std::abs(p.x - c.x) <= hw && std::abs(p.y - c.y) <= hh;
}

/// Pixel-footprint coverage of an axis-aligned world rect with a 1 px linear
/// feather: hard edges alias under sub-pixel motion and resampling,
/// destabilizing correlation scores.
inline double rect_coverage(Point2 p, double x0, double y0, double x1, double y1) {
    const double fx = std::clamp(std::min(p.x - x0, x1 - p.x) + 0.5, 0.0, 1.0);
    const double fy = std::clamp(std::min(p.y - y0, y1 - p.y) + 0.5, 0.0, 1.0);
    return fx * fy;
}

/// Entity intensity at object-local coordinates. A lookalike distractor
/// shares the object's pattern at a fixed ~0.8 correlation: two pixel-equal
/// textures would produce exact response-map ties that argmax resolves by
/// scan order rather than by any meaningful identity decision.
inline double entity_intensity(Point2 local, const EntityFrame& e) {
    double n = texture_noise(local.x, local.y, e.seed);
    if (e.lookalike) {
        const double companion = texture_noise(local.x, local.y, e.seed ^ 0x7E57AB1EULL);
        n = 0.5 + 0.8 * (n - 0.5) + 0.6 * (companion - 0.5);
        n = std::clamp(n, 0.0, 1.0);
    }
    return 0.5 + 0.5 * n;
}

} // namespace detail

/// Renders a deterministic synthetic sequence: a textured planar background
/// warped by per-frame camera jitter, with textured objects, distractors and
/// occluders composited on top. Emitted matches are true background
/// correspondences under the reference schedule, with optional Gaussian noise
/// and a fraction replaced by uniform random outliers.
inline SyntheticSequence generate(const ScenarioSpec& spec, std::uint64_t seed) {
    const int w = spec.width, h = spec.height, frames = spec.frame_count;
    if (w < 32 || h < 32 || frames < 1)
        throw SpecError("scenario canvas/frame count too small");

    const auto obj_pos = detail::trajectory_positions(spec.object.start,
                                                      spec.object.segments, frames);
    const double ohw = spec.object.width / 2.0, ohh = spec.object.height / 2.0;
    for (const auto& p : obj_pos) {
        if (p.x - ohw < 1 || p.y - ohh < 1 || p.x + ohw > w - 2 || p.y + ohh > h - 2)
            throw SpecError("object trajectory leaves the canvas");
    }
    std::vector<std::vector<Point2>> dis_pos;
    for (const auto& d : spec.distractors) {
        dis_pos.push_back(detail::trajectory_positions(d.start, d.segments, frames));
        for (const auto& p : dis_pos.back())
            if (p.x - d.width / 2 < 1 || p.y - d.height / 2 < 1 ||
                p.x + d.width / 2 > w - 2 || p.y + d.height / 2 > h - 2)
                throw SpecError("distractor trajectory leaves the canvas");
    }

    // Per-frame camera maps (world -> frame); frame 0 is the world anchor.
    Rng cam_rng(detail::mix64(seed ^ 0xCA11AB1EULL));
    std::vector<Homography> camera(static_cast<std::size_t>(frames));
    const Point2 img_center{(w - 1) / 2.0, (h - 1) / 2.0};
    for (int t = 1; t < frames; ++t) {
        const double dx = spec.camera.translation_sigma * normal01(cam_rng);
        const double dy = spec.camera.translation_sigma * normal01(cam_rng);
        const double th = spec.camera.rotation_sigma_deg * (3.14159265358979323846 / 180.0) *
                          normal01(cam_rng);
        Homography g;
        g.m = (Homography::translation(dx, dy).m * Homography::rotation(th, img_center).m).eval();
        camera[static_cast<std::size_t>(t)] = Homography::from_matrix(g.m);
    }

    const std::uint64_t obj_seed = detail::mix64(spec.object.texture_seed);
    const std::uint64_t bg_seed = detail::mix64(spec.background_seed ^ 0xB06F00DULL);

    SyntheticSequence out;
    out.truth.reference_interval = spec.reference_interval;
    out.frames.reserve(static_cast<std::size_t>(frames));

    for (int t = 0; t < frames; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        const Homography& g = camera[ti];
        const Homography g_inv = invert_homography(g);

        std::vector<detail::EntityFrame> layers;   // distractors first, object on top
        for (std::size_t d = 0; d < spec.distractors.size(); ++d) {
            const auto& ds = spec.distractors[d];
            layers.push_back({dis_pos[d][ti], ds.width / 2.0, ds.height / 2.0,
                              ds.identical_texture ? obj_seed : detail::mix64(ds.texture_seed),
                              ds.identical_texture});
        }
        layers.push_back({obj_pos[ti], ohw, ohh, obj_seed, false});

        Image frame(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const Point2 wp = apply_homography(g_inv, {static_cast<double>(x), static_cast<double>(y)});
                double v = 0.2 + 0.35 * texture_noise(wp.x, wp.y, bg_seed);
                for (const auto& e : layers) {
                    const double cv = detail::rect_coverage(wp, e.center.x - e.half_w,
                                                            e.center.y - e.half_h,
                                                            e.center.x + e.half_w,
                                                            e.center.y + e.half_h);
                    if (cv > 0.0)
                        v += cv * (detail::entity_intensity({wp.x - e.center.x, wp.y - e.center.y}, e) - v);
                }
                for (const auto& occ : spec.occluders) {
                    if (t < occ.first_frame || t > occ.last_frame) continue;
                    const double cv = detail::rect_coverage(wp, occ.x0, occ.y0, occ.x1, occ.y1);
                    if (cv > 0.0)
                        v += cv * (occ.intensity - v);
                }
                // Quantize like the PGM writer so in-memory and on-disk agree.
                frame.at(x, y) = std::lround(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
            }
        }
        out.frames.push_back(std::move(frame));

        // Truth.
        out.truth.world_positions.push_back(obj_pos[ti]);
        out.truth.centers.push_back(apply_homography(g, obj_pos[ti]));
        out.truth.velocities.push_back(
            t == 0 ? (spec.object.segments.empty() ? Vec2{0, 0} : spec.object.segments[0].velocity)
                   : obj_pos[ti] - obj_pos[ti - 1]);
        out.truth.camera.push_back(g);

        RotatedBox box;
        const Point2 c = obj_pos[ti];
        const Point2 corners_world[4] = {{c.x - ohw, c.y - ohh},
                                         {c.x + ohw, c.y - ohh},
                                         {c.x + ohw, c.y + ohh},
                                         {c.x - ohw, c.y + ohh}};
        for (int i = 0; i < 4; ++i)
            box.corners[static_cast<std::size_t>(i)] = apply_homography(g, corners_world[i]);
        out.truth.boxes.push_back(box);
    }

    // Correspondences under the reference schedule r(t) = n*floor((t-1)/n).
    const int n = spec.reference_interval;
    out.truth.ref_to_frame.push_back(Homography::identity());
    out.matches.emplace_back();
    out.truth.true_matches.emplace_back();
    for (int t = 1; t < frames; ++t) {
        const int r = n * ((t - 1) / n);
        const auto ti = static_cast<std::size_t>(t);
        const auto ri = static_cast<std::size_t>(r);
        const Homography h_ref_to_t = Homography::from_matrix(
            (camera[ti].m * invert_homography(camera[ri]).m).eval());
        out.truth.ref_to_frame.push_back(h_ref_to_t);

        const Homography ref_inv = invert_homography(camera[ri]);
        Rng mrng(detail::mix64(seed ^ (0x4D47ULL + static_cast<std::uint64_t>(t) * 0x9E3779B97F4A7C15ULL)));

        auto on_foreground = [&](Point2 world, int frame_idx) {
            const auto fi = static_cast<std::size_t>(frame_idx);
            if (detail::in_rect(world, obj_pos[fi], ohw + 2, ohh + 2)) return true;
            for (std::size_t d = 0; d < dis_pos.size(); ++d)
                if (detail::in_rect(world, dis_pos[d][fi], spec.distractors[d].width / 2 + 2,
                                    spec.distractors[d].height / 2 + 2))
                    return true;
            for (const auto& occ : spec.occluders)
                if (frame_idx >= occ.first_frame && frame_idx <= occ.last_frame &&
                    world.x >= occ.x0 - 2 && world.x <= occ.x1 + 2 &&
                    world.y >= occ.y0 - 2 && world.y <= occ.y1 + 2)
                    return true;
            return false;
        };

        std::vector<PointMatch> truth_m, emitted;
        const int inlier_count =
            spec.match_count - static_cast<int>(std::floor(spec.match_count * spec.outlier_fraction));
        int attempts = 0;
        while (static_cast<int>(truth_m.size()) < spec.match_count) {
            if (++attempts > spec.match_count * 200)
                throw SpecError("cannot place background matches (foreground too large?)");
            const Point2 u{uniform_range(mrng, 4.0, w - 5.0), uniform_range(mrng, 4.0, h - 5.0)};
            const Point2 world = apply_homography(ref_inv, u);
            if (on_foreground(world, r) || on_foreground(world, t)) continue;
            const Point2 dst = apply_homography(h_ref_to_t, u);
            if (dst.x < 0 || dst.x > w - 1 || dst.y < 0 || dst.y > h - 1) continue;

            truth_m.push_back({u, dst});
            PointMatch em{u, dst};
            if (static_cast<int>(emitted.size()) < inlier_count) {
                em.dst.x += spec.match_noise_sigma * normal01(mrng);
                em.dst.y += spec.match_noise_sigma * normal01(mrng);
            } else {
                em.dst = {uniform_range(mrng, 0.0, w - 1.0), uniform_range(mrng, 0.0, h - 1.0)};
            }
            emitted.push_back(em);
        }
        out.truth.true_matches.push_back(std::move(truth_m));
        out.matches.push_back(std::move(emitted));
    }
    return out;
}

namespace detail {

inline nlohmann::json homography_json(const Homography& h) {
    return nlohmann::json::array({h.m(0, 0), h.m(0, 1), h.m(0, 2), h.m(1, 0), h.m(1, 1),
                                  h.m(1, 2), h.m(2, 0), h.m(2, 1), h.m(2, 2)});
}

inline Homography homography_from_json(const nlohmann::json& j) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 9; ++i)
        m(i / 3, i % 3) = j.at(static_cast<std::size_t>(i)).get<double>();
    return Homography::from_matrix(m);
}

} // namespace detail

/// Writes the sequence directory: %06d.pgm frames, groundtruth.txt,
/// matches_%06d.txt (from frame 1 on), truth.json.
inline void write_sequence(const std::filesystem::path& dir, const SyntheticSequence& seq) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir))
        throw IoError("cannot create sequence dir " + dir.string());

    char name[64];
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        std::snprintf(name, sizeof(name), "%06zu.pgm", t);
        save_pgm(dir / name, seq.frames[t]);
        if (t >= 1) {
            std::snprintf(name, sizeof(name), "matches_%06zu.txt", t);
            save_matches(dir / name, seq.matches[t]);
        }
    }
    std::ofstream gt(dir / "groundtruth.txt");
    if (!gt)
        throw IoError("cannot write groundtruth.txt");
    for (const auto& b : seq.truth.boxes)
        gt << format_vot_line(b) << "\n";

    nlohmann::json j;
    j["reference_interval"] = seq.truth.reference_interval;
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        j["centers"].push_back({seq.truth.centers[t].x, seq.truth.centers[t].y});
        j["world_positions"].push_back({seq.truth.world_positions[t].x, seq.truth.world_positions[t].y});
        j["velocities"].push_back({seq.truth.velocities[t].x, seq.truth.velocities[t].y});
        j["camera"].push_back(detail::homography_json(seq.truth.camera[t]));
        j["ref_to_frame"].push_back(detail::homography_json(seq.truth.ref_to_frame[t]));
    }
    std::ofstream tf(dir / "truth.json");
    tf << j.dump(1) << "\n";
    if (!tf)
        throw IoError("cannot write truth.json");
}

/// Partial truth loaded back from a sequence directory (camera maps and
/// matches are not needed downstream of tracking).
struct LoadedTruth {
    int reference_interval = 10;
    std::vector<Point2> centers;
    std::vector<Vec2> velocities;
};

inline LoadedTruth load_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("truth.json: ") + e.what());
    }
    LoadedTruth t;
    t.reference_interval = j.value("reference_interval", 10);
    for (const auto& c : j.at("centers"))
        t.centers.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    for (const auto& v : j.at("velocities"))
        t.velocities.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    return t;
}

/// The fixed scenario library mirroring the benchmark's challenge factors.
inline std::vector<std::pair<std::string, ScenarioSpec>> standard_suite() {
    std::vector<std::pair<std::string, ScenarioSpec>> suite;

    {
        ScenarioSpec s;
        s.frame_count = 60;
        s.object.start = {240, 180};
        s.object.segments = {{59, {0, 0}}};
        suite.emplace_back("static", s);
    }
    {
        ScenarioSpec s;
        s.frame_count = 100;
        s.object.start = {90, 150};
        s.object.segments = {{99, {3, 1}}};
        suite.emplace_back("constant-velocity", s);
    }
    {
        // Ends fast enough that a fixed last-position window keeps clipping
        // the target while a velocity-sized predicted window does not.
        ScenarioSpec s;
        s.width = 640;
        s.frame_count = 41;
        s.object.start = {30, 120};
        s.object.segments = {{15, {2, 0}}, {12, {4, 1}}, {8, {8, 2}}, {5, {65, 3}}};
        suite.emplace_back("acceleration", s);
    }
    {
        ScenarioSpec s;
        s.frame_count = 80;
        s.object.start = {240, 180};
        s.object.segments = {{79, {0, 0}}};
        s.camera.translation_sigma = 3.0;
        s.camera.rotation_sigma_deg = 0.3;
        suite.emplace_back("camera-shake", s);
    }
    {
        ScenarioSpec s;
        s.width = 400;
        s.height = 300;
        s.frame_count = 100;
        s.object.width = s.object.height = 36;
        s.object.start = {30, 90};
        s.object.segments = {{99, {3.4, 0.9}}};
        s.camera.translation_sigma = 3.0;
        s.camera.rotation_sigma_deg = 0.3;
        s.match_noise_sigma = 1.0;
        s.outlier_fraction = 0.2;
        s.match_count = 150;
        suite.emplace_back("camera-shake+motion", s);
    }
    {
        // Identical-texture companion; a one-frame burst exits the stale
        // fixed window while staying inside the velocity-predicted one.
        ScenarioSpec s;
        s.frame_count = 26;
        s.object.start = {80, 200};
        s.object.segments = {{12, {9.7, 0.2}}, {1, {105, 0.2}}, {12, {9.7, 0.2}}};
        DistractorSpec d;
        d.identical_texture = true;
        d.width = d.height = 40;
        d.start = {25, 212};
        d.segments = {{25, {9.7, 0.2}}};
        s.distractors.push_back(d);
        suite.emplace_back("distractor-cross", s);
    }
    {
        // A ledge hiding the lower third of the object as it passes: partial
        // occlusion the matcher should survive without a reinit. Covering one
        // side keeps the visible part a single connected component.
        ScenarioSpec s;
        s.frame_count = 60;
        s.object.start = {100, 180};
        s.object.segments = {{59, {5, 0}}};
        s.occluders.push_back({205, 188, 315, 240, 26, 38, 0.05});
        suite.emplace_back("occlusion-5-frame", s);
    }
    {
        ScenarioSpec s;
        s.frame_count = 60;
        s.object.start = {100, 180};
        s.object.segments = {{59, {4.6, 0.4}}};
        s.occluders.push_back({255, 140, 330, 250, 40, 43, 0.05});
        suite.emplace_back("occlusion-full", s);
    }
    return suite;
}

inline ScenarioSpec scenario_by_name(const std::string& name) {
    for (auto& [n, s] : standard_suite())
        if (n == name)
            return s;
    throw ConfigError("unknown scenario: " + name);
}

namespace detail {

inline std::vector<TrajectorySegment> segments_from_json(const nlohmann::json& j) {
    std::vector<TrajectorySegment> out;
    for (const auto& s : j)
        out.push_back({s.at("frames").get<int>(),
                       {s.at("velocity").at(0).get<double>(), s.at("velocity").at(1).get<double>()}});
    return out;
}

} // namespace detail

/// Custom scenario description, JSON form. Unspecified fields keep defaults.
inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec s;
    try {
        s.width = j.value("width", s.width);
        s.height = j.value("height", s.height);
        s.frame_count = j.value("frame_count", s.frame_count);
        s.background_seed = j.value("background_seed", s.background_seed);
        s.match_noise_sigma = j.value("match_noise_sigma", s.match_noise_sigma);
        s.outlier_fraction = j.value("outlier_fraction", s.outlier_fraction);
        s.match_count = j.value("match_count", s.match_count);
        s.reference_interval = j.value("reference_interval", s.reference_interval);
        if (j.contains("camera")) {
            s.camera.translation_sigma = j["camera"].value("translation_sigma", 0.0);
            s.camera.rotation_sigma_deg = j["camera"].value("rotation_sigma_deg", 0.0);
        }
        if (j.contains("object")) {
            const auto& o = j["object"];
            s.object.width = o.value("width", s.object.width);
            s.object.height = o.value("height", s.object.height);
            s.object.texture_seed = o.value("texture_seed", s.object.texture_seed);
            if (o.contains("start"))
                s.object.start = {o["start"].at(0).get<double>(), o["start"].at(1).get<double>()};
            if (o.contains("segments"))
                s.object.segments = detail::segments_from_json(o["segments"]);
        }
        for (const auto& d : j.value("distractors", nlohmann::json::array())) {
            DistractorSpec ds;
            ds.identical_texture = d.value("identical_texture", true);
            ds.texture_seed = d.value("texture_seed", ds.texture_seed);
            ds.width = d.value("width", ds.width);
            ds.height = d.value("height", ds.height);
            if (d.contains("start"))
                ds.start = {d["start"].at(0).get<double>(), d["start"].at(1).get<double>()};
            if (d.contains("segments"))
                ds.segments = detail::segments_from_json(d["segments"]);
            s.distractors.push_back(ds);
        }
        for (const auto& o : j.value("occluders", nlohmann::json::array())) {
            OccluderSpec os;
            os.x0 = o.at("rect").at(0).get<double>();
            os.y0 = o.at("rect").at(1).get<double>();
            os.x1 = o.at("rect").at(2).get<double>();
            os.y1 = o.at("rect").at(3).get<double>();
            os.first_frame = o.at("first_frame").get<int>();
            os.last_frame = o.at("last_frame").get<int>();
            os.intensity = o.value("intensity", os.intensity);
            s.occluders.push_back(os);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad scenario spec: ") + e.what());
    }
    return s;
}

} // namespace pts
