#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pts/box.hpp"
#include "pts/errors.hpp"
#include "pts/geometry.hpp"
#include "pts/image.hpp"

namespace pts {

/// Parses one VOT annotation line: 8 comma-separated numbers -> 4 corners in
/// the given order; 4 numbers (x, y, w, h) -> axis-aligned rectangle.
inline RotatedBox parse_vot_line(const std::string& line) {
    std::vector<double> vals;
    std::string tok;
    std::stringstream ss(line);
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
            if (used != tok.size())
                throw ParseError("trailing junk in VOT value: '" + tok + "'");
            vals.push_back(v);
        } catch (const ParseError&) {
            throw;
        } catch (...) {
            throw ParseError("non-numeric VOT value: '" + tok + "'");
        }
    }
    if (vals.size() == 8) {
        RotatedBox b;
        for (int i = 0; i < 4; ++i)
            b.corners[static_cast<std::size_t>(i)] = {vals[static_cast<std::size_t>(2 * i)], vals[static_cast<std::size_t>(2 * i + 1)]};
        return b;
    }
    if (vals.size() == 4)
        return RotatedBox::axis_aligned(vals[0], vals[1], vals[2], vals[3]);
    throw ParseError("VOT line must have 4 or 8 values, got " + std::to_string(vals.size()));
}

/// 8 comma-separated values, 4 decimal places. parse(format(b)) round-trips
/// within 1e-4 per coordinate.
inline std::string format_vot_line(const RotatedBox& box) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f",
                  box.corners[0].x, box.corners[0].y, box.corners[1].x, box.corners[1].y,
                  box.corners[2].x, box.corners[2].y, box.corners[3].x, box.corners[3].y);
    return buf;
}

namespace detail {

inline int pnm_next_int(std::istream& in) {
    // Skips whitespace and '#' comments between header tokens.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF) throw IoError("truncated netpbm header");
    std::string tok;
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    try {
        return std::stoi(tok);
    } catch (...) {
        throw ParseError("bad netpbm header token: '" + tok + "'");
    }
}

} // namespace detail

/// Loads a netpbm image (P2/P5 grayscale, P3/P6 color). Intensities are
/// scaled to [0,1]; color collapses to the channel mean.
inline Image load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6")
        throw UnsupportedFormat("not a supported netpbm type: " + magic);
    const bool color = magic == "P3" || magic == "P6";
    const bool binary = magic == "P5" || magic == "P6";
    const int w = detail::pnm_next_int(in);
    const int h = detail::pnm_next_int(in);
    const int maxval = detail::pnm_next_int(in);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw UnsupportedFormat("unsupported netpbm dimensions/maxval");

    const std::size_t samples = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * (color ? 3u : 1u);
    std::vector<double> raw(samples);
    if (binary) {
        std::vector<unsigned char> buf(samples);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(samples));
        if (static_cast<std::size_t>(in.gcount()) != samples)
            throw IoError("truncated pixel data in " + path.string());
        for (std::size_t i = 0; i < samples; ++i)
            raw[i] = buf[i] / static_cast<double>(maxval);
    } else {
        for (std::size_t i = 0; i < samples; ++i) {
            int v;
            if (!(in >> v))
                throw IoError("truncated pixel data in " + path.string());
            raw[i] = v / static_cast<double>(maxval);
        }
    }

    Image img(w, h);
    if (color) {
        for (std::size_t i = 0; i < img.data.size(); ++i)
            img.data[i] = (raw[3 * i] + raw[3 * i + 1] + raw[3 * i + 2]) / 3.0;
    } else {
        img.data = std::move(raw);
    }
    for (double& v : img.data)
        v = std::clamp(v, 0.0, 1.0);
    return img;
}

/// Writes 8-bit binary PGM (P5).
inline void save_pgm(const std::filesystem::path& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> buf(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i)
        buf[i] = static_cast<unsigned char>(std::lround(std::clamp(img.data[i], 0.0, 1.0) * 255.0));
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw IoError("short write to " + path.string());
}

/// Correspondence file: one `sx sy dx dy` line per match, '#' comments allowed.
inline std::vector<PointMatch> load_matches(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<PointMatch> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::stringstream ss(line);
        PointMatch m;
        if (ss >> m.src.x >> m.src.y >> m.dst.x >> m.dst.y) {
            double extra;
            if (ss >> extra)
                throw ParseError("too many values on match line: '" + line + "'");
            out.push_back(m);
        } else if (!line.empty() && line.find_first_not_of(" \t\r\n") != std::string::npos) {
            throw ParseError("bad match line: '" + line + "'");
        }
    }
    return out;
}

inline void save_matches(const std::filesystem::path& path, const std::vector<PointMatch>& matches) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    char buf[256];
    for (const auto& m : matches) {
        std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f\n", m.src.x, m.src.y, m.dst.x, m.dst.y);
        out << buf;
    }
}

/// An on-disk sequence: ordered frames, per-frame gt boxes, optional
/// per-frame correspondence files.
struct SequenceBundle {
    std::vector<std::filesystem::path> frame_paths;
    std::vector<RotatedBox> gt;
    std::vector<std::optional<std::filesystem::path>> matches_paths;
};

/// Loads a sequence directory: lexicographically ordered *.pgm/*.ppm frames,
/// groundtruth.txt, matches_%06d.txt when present.
inline SequenceBundle load_sequence(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw IoError("not a directory: " + dir.string());

    SequenceBundle bundle;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".pgm" || ext == ".ppm" || ext == ".pnm"))
            bundle.frame_paths.push_back(e.path());
    }
    std::sort(bundle.frame_paths.begin(), bundle.frame_paths.end());
    if (bundle.frame_paths.empty())
        throw IoError("no frames in " + dir.string());

    const fs::path gt_path = dir / "groundtruth.txt";
    std::ifstream in(gt_path);
    if (!in)
        throw IoError("missing " + gt_path.string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        bundle.gt.push_back(parse_vot_line(line));
    }
    if (bundle.gt.size() != bundle.frame_paths.size())
        throw LengthMismatch("groundtruth.txt has " + std::to_string(bundle.gt.size()) +
                             " lines for " + std::to_string(bundle.frame_paths.size()) + " frames");

    char name[64];
    for (std::size_t i = 0; i < bundle.frame_paths.size(); ++i) {
        std::snprintf(name, sizeof(name), "matches_%06zu.txt", i);
        const fs::path p = dir / name;
        bundle.matches_paths.push_back(fs::exists(p) ? std::optional<fs::path>(p) : std::nullopt);
    }
    return bundle;
}

} // namespace pts
