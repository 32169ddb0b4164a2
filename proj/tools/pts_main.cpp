// Command-line front end: generate synthetic benchmarks, run the tracker,
// evaluate results. Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pts/pts.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SynthOptions {
    std::string scenario;
    std::string spec_path;
    std::string out_dir;
    std::uint64_t seed = 1;
};

struct TrackOptions {
    std::vector<std::string> seq_dirs;
    std::string config_path;
    std::string mode = "pts";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool no_reinit = false;
    bool render_overlay = false;
    int jobs = 1;
};

struct EvalOptions {
    std::vector<std::string> seq_dirs;
    std::string results_name = "results.txt";
    int jobs = 1;
};

int run_synth(const SynthOptions& opt) {
    pts::ScenarioSpec spec;
    if (!opt.spec_path.empty()) {
        std::ifstream in(opt.spec_path);
        if (!in) {
            std::cerr << "error: cannot open spec " << opt.spec_path << "\n";
            return 1;
        }
        json j;
        try {
            in >> j;
            spec = pts::scenario_from_json(j);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    } else {
        try {
            spec = pts::scenario_by_name(opt.scenario);
        } catch (const pts::ConfigError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    try {
        const auto seq = pts::generate(spec, opt.seed);
        pts::write_sequence(opt.out_dir, seq);
        std::cout << "wrote " << seq.frames.size() << " frames to " << opt.out_dir << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

void draw_overlay(pts::Image& r, pts::Image& g, pts::Image& b, const pts::TrackOutput& out) {
    auto plot = [&](int x, int y, double cr, double cg, double cb) {
        if (x < 0 || y < 0 || x >= r.width || y >= r.height) return;
        r.at(x, y) = cr;
        g.at(x, y) = cg;
        b.at(x, y) = cb;
    };
    // mask tint
    for (int y = 0; y < out.mask.height; ++y)
        for (int x = 0; x < out.mask.width; ++x)
            if (out.mask.get(x, y)) {
                const int fx = static_cast<int>(out.mask.origin.x) + x;
                const int fy = static_cast<int>(out.mask.origin.y) + y;
                if (fx >= 0 && fy >= 0 && fx < r.width && fy < r.height) {
                    r.at(fx, fy) = 0.6 * r.at(fx, fy) + 0.4;
                    g.at(fx, fy) *= 0.6;
                    b.at(fx, fy) *= 0.6;
                }
            }
    // box edges
    for (int i = 0; i < 4; ++i) {
        const auto a = out.box.corners[static_cast<std::size_t>(i)];
        const auto c = out.box.corners[static_cast<std::size_t>((i + 1) % 4)];
        const int steps = std::max(2, static_cast<int>(std::hypot(c.x - a.x, c.y - a.y)));
        for (int s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            plot(static_cast<int>(std::lround(a.x + t * (c.x - a.x))),
                 static_cast<int>(std::lround(a.y + t * (c.y - a.y))), 0.0, 0.4, 1.0);
        }
    }
    // predicted center cross
    const int cx = static_cast<int>(std::lround(out.predicted_center.x));
    const int cy = static_cast<int>(std::lround(out.predicted_center.y));
    for (int d = -4; d <= 4; ++d) {
        plot(cx + d, cy, 1.0, 0.1, 0.1);
        plot(cx, cy + d, 1.0, 0.1, 0.1);
    }
}

void save_ppm(const fs::path& path, const pts::Image& r, const pts::Image& g, const pts::Image& b) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw pts::IoError("cannot write " + path.string());
    out << "P6\n" << r.width << " " << r.height << "\n255\n";
    std::vector<unsigned char> buf(static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height) * 3);
    for (std::size_t i = 0; i < r.data.size(); ++i) {
        buf[3 * i] = static_cast<unsigned char>(std::lround(std::clamp(r.data[i], 0.0, 1.0) * 255));
        buf[3 * i + 1] = static_cast<unsigned char>(std::lround(std::clamp(g.data[i], 0.0, 1.0) * 255));
        buf[3 * i + 2] = static_cast<unsigned char>(std::lround(std::clamp(b.data[i], 0.0, 1.0) * 255));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void track_one(const fs::path& dir, const TrackOptions& opt, const pts::TrackerConfig& base_cfg) {
    pts::TrackerConfig cfg = base_cfg;
    const auto bundle = pts::load_sequence(dir);

    if (fs::exists(dir / "truth.json")) {
        const auto truth = pts::load_truth(dir / "truth.json");
        if (truth.reference_interval != cfg.reference_interval)
            std::cerr << "warning: " << dir.string() << ": config n=" << cfg.reference_interval
                      << " but sequence was generated with n=" << truth.reference_interval
                      << "; correspondences may be misaligned\n";
    }

    std::vector<pts::Image> frames;
    frames.reserve(bundle.frame_paths.size());
    for (const auto& p : bundle.frame_paths)
        frames.push_back(pts::load_image(p));
    std::vector<std::vector<pts::PointMatch>> matches(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i)
        if (bundle.matches_paths[i])
            matches[i] = pts::load_matches(*bundle.matches_paths[i]);

    const pts::TrackMode mode = pts::parse_track_mode(opt.mode);
    const pts::TrackRecord record =
        pts::run_sequence(frames, bundle.gt, matches, cfg, mode, !opt.no_reinit);

    std::ofstream results(dir / "results.txt");
    std::ofstream predictions(dir / "predictions.txt");
    if (!results || !predictions)
        throw pts::IoError("cannot write outputs in " + dir.string());
    char line[256];
    for (const auto& f : record.frames) {
        results << pts::format_vot_line(f.box) << "\n";
        std::snprintf(line, sizeof(line), "%d %.4f %.4f %.4f %.4f %s\n", f.frame_index,
                      f.predicted_center.x, f.predicted_center.y, f.predicted_velocity.x,
                      f.predicted_velocity.y, pts::to_string(f.status));
        predictions << line;
    }

    json run;
    run["mode"] = opt.mode;
    run["failure_count"] = record.failure_count;
    run["reinit_events"] = record.reinit_events;
    for (const auto& f : record.frames) {
        run["statuses"].push_back(pts::to_string(f.status));
        run["scores"].push_back(f.score);
    }
    std::ofstream rj(dir / "run.json");
    rj << run.dump(1) << "\n";

    if (opt.render_overlay) {
        char name[64];
        for (std::size_t t = 0; t < frames.size(); ++t) {
            pts::Image r = frames[t], g = frames[t], b = frames[t];
            draw_overlay(r, g, b, record.frames[t]);
            std::snprintf(name, sizeof(name), "overlay_%06zu.ppm", t);
            save_ppm(dir / name, r, g, b);
        }
    }
}

template <typename Fn>
int parallel_over_dirs(const std::vector<std::string>& dirs, int jobs, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    std::mutex io_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= dirs.size()) return;
            try {
                fn(fs::path(dirs[i]));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << "error: " << dirs[i] << ": " << e.what() << "\n";
                failures.fetch_add(1);
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(dirs.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return failures.load() ? 1 : 0;
}

int run_track(const TrackOptions& opt) {
    pts::TrackerConfig cfg;
    if (!opt.config_path.empty()) {
        try {
            cfg = pts::load_config(opt.config_path);
        } catch (const pts::ConfigError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    if (opt.seed_set)
        cfg.ransac.rng_seed = opt.seed;
    try {
        pts::parse_track_mode(opt.mode);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return parallel_over_dirs(opt.seq_dirs, opt.jobs,
                              [&](const fs::path& dir) { track_one(dir, opt, cfg); });
}

json summary_to_json(const pts::SummaryReport& rep) {
    json j;
    j["mean_position_error"] = rep.mean_position_error;
    j["velocity"] = {{"euclidean", rep.mean_velocity_errors.euclidean},
                     {"cosine", rep.mean_velocity_errors.cosine},
                     {"magnitude", rep.mean_velocity_errors.magnitude}};
    j["accuracy"] = rep.accuracy;
    j["failure_count"] = rep.failure_count;
    j["total_frames"] = rep.total_frames;
    j["tracked_frames"] = rep.tracked_frames;
    return j;
}

void eval_one(const fs::path& dir, const EvalOptions& opt, std::mutex& io_mutex) {
    const auto bundle = pts::load_sequence(dir);

    std::ifstream results(dir / opt.results_name);
    if (!results)
        throw pts::IoError("missing " + (dir / opt.results_name).string());
    std::vector<pts::RotatedBox> boxes;
    std::string line;
    while (std::getline(results, line))
        if (!line.empty())
            boxes.push_back(pts::parse_vot_line(line));

    std::ifstream preds(dir / "predictions.txt");
    if (!preds)
        throw pts::IoError("missing " + (dir / "predictions.txt").string());
    pts::TrackRecord record;
    record.frames.resize(boxes.size());
    std::size_t i = 0;
    int frame_idx;
    double px, py, vx, vy;
    std::string status;
    while (preds >> frame_idx >> px >> py >> vx >> vy >> status) {
        if (i >= boxes.size())
            throw pts::LengthMismatch("predictions.txt longer than results.txt");
        auto& f = record.frames[i];
        f.frame_index = frame_idx;
        f.predicted_center = {px, py};
        f.predicted_velocity = {vx, vy};
        f.box = boxes[i];
        f.status = status == "tracked" ? pts::TrackStatus::Tracked
                 : status == "failed" ? pts::TrackStatus::Failed
                                      : pts::TrackStatus::Reinitializing;
        ++i;
    }
    if (i != boxes.size())
        throw pts::LengthMismatch("predictions.txt shorter than results.txt");
    if (boxes.size() != bundle.gt.size())
        throw pts::LengthMismatch("results has " + std::to_string(boxes.size()) +
                                  " lines, groundtruth has " + std::to_string(bundle.gt.size()));

    if (fs::exists(dir / "run.json")) {
        std::ifstream rj(dir / "run.json");
        json j;
        rj >> j;
        record.failure_count = j.value("failure_count", 0);
    }

    std::vector<pts::FrameTruth> gt(bundle.gt.size());
    for (std::size_t t = 0; t < bundle.gt.size(); ++t) {
        gt[t].box = bundle.gt[t];
        gt[t].center = bundle.gt[t].center();
    }
    if (fs::exists(dir / "truth.json")) {
        const auto truth = pts::load_truth(dir / "truth.json");
        if (truth.centers.size() == gt.size())
            for (std::size_t t = 0; t < gt.size(); ++t)
                gt[t].velocity = truth.velocities[t];
    } else {
        for (std::size_t t = 1; t < gt.size(); ++t)
            gt[t].velocity = gt[t].center - gt[t - 1].center;
    }

    const auto rep = pts::summarize(record, gt);
    const json j = summary_to_json(rep);
    {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << dir.string() << " " << j.dump() << "\n";
    }
    std::ofstream out(dir / "summary.json");
    out << j.dump(1) << "\n";
}

int run_eval(const EvalOptions& opt) {
    std::mutex io_mutex;
    return parallel_over_dirs(opt.seq_dirs, opt.jobs,
                              [&](const fs::path& dir) { eval_one(dir, opt, io_mutex); });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prediction-driven tracking toolkit"};
    app.require_subcommand(1);

    SynthOptions synth_opt;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark sequence");
    synth->add_option("--scenario", synth_opt.scenario, "Scenario name from the standard suite");
    synth->add_option("--spec", synth_opt.spec_path, "Path to a JSON scenario spec");
    synth->add_option("--out", synth_opt.out_dir, "Output sequence directory")->required();
    synth->add_option("--seed", synth_opt.seed, "Generator seed");

    TrackOptions track_opt;
    auto* track = app.add_subcommand("track", "Run the tracker over sequence directories");
    track->add_option("dirs", track_opt.seq_dirs, "Sequence directories")->required();
    track->add_option("--config", track_opt.config_path, "Tracker config (JSON)");
    track->add_option("--mode", track_opt.mode,
                      "pts | baseline | pts-no-region | pts-no-prediction");
    auto* seed_opt = track->add_option("--seed", track_opt.seed, "Override RANSAC seed");
    track->add_flag("--no-reinit", track_opt.no_reinit, "Disable the failure/reinit protocol");
    track->add_flag("--render-overlay", track_opt.render_overlay,
                    "Write annotated overlay_%06d.ppm frames");
    track->add_option("--jobs", track_opt.jobs, "Parallel sequences");

    EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "Evaluate results against ground truth");
    eval->add_option("dirs", eval_opt.seq_dirs, "Sequence directories")->required();
    eval->add_option("--results", eval_opt.results_name, "Results file name");
    eval->add_option("--jobs", eval_opt.jobs, "Parallel sequences");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (synth->parsed()) {
        if (synth_opt.scenario.empty() == synth_opt.spec_path.empty()) {
            std::cerr << "error: exactly one of --scenario / --spec is required\n";
            return 2;
        }
        return run_synth(synth_opt);
    }
    if (track->parsed()) {
        track_opt.seed_set = seed_opt->count() > 0;
        return run_track(track_opt);
    }
    if (eval->parsed())
        return run_eval(eval_opt);
    return 2;
}
