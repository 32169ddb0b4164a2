#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "pts/config.hpp"
#include "pts/io.hpp"
#include "pts/random.hpp"

using namespace pts;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("pts_test_" + std::to_string(Rng(std::random_device{}())()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("parse_vot_line") {
    const RotatedBox b8 = parse_vot_line("100,100,200,100,200,150,100,150");
    CHECK(b8.corners[0].x == Catch::Approx(100));
    CHECK(b8.corners[2].x == Catch::Approx(200));
    CHECK(b8.corners[2].y == Catch::Approx(150));

    const RotatedBox b4 = parse_vot_line("10,20,30,40");
    CHECK(b4.corners[0].x == Catch::Approx(10));
    CHECK(b4.corners[0].y == Catch::Approx(20));
    CHECK(b4.corners[1].x == Catch::Approx(40));
    CHECK(b4.corners[2].y == Catch::Approx(60));

    CHECK_THROWS_AS(parse_vot_line("1,2,3"), ParseError);
    CHECK_THROWS_AS(parse_vot_line("a,b,c,d"), ParseError);
    CHECK_THROWS_AS(parse_vot_line("1,2,3,4x"), ParseError);
}

TEST_CASE("format_vot_line") {
    const RotatedBox unit = RotatedBox::axis_aligned(0, 0, 1, 1);
    CHECK(format_vot_line(unit) == "0.0000,0.0000,1.0000,0.0000,1.0000,1.0000,0.0000,1.0000");

    const RotatedBox degen{{Point2{3.5, 2.5}, Point2{3.5, 2.5}, Point2{3.5, 2.5}, Point2{3.5, 2.5}}};
    CHECK(format_vot_line(degen) == "3.5000,2.5000,3.5000,2.5000,3.5000,2.5000,3.5000,2.5000");
}

TEST_CASE("vot line round trip") {
    Rng rng(77);
    for (int i = 0; i < 50; ++i) {
        RotatedBox b;
        for (auto& c : b.corners)
            c = {uniform_range(rng, -100, 500), uniform_range(rng, -100, 500)};
        const RotatedBox back = parse_vot_line(format_vot_line(b));
        for (int k = 0; k < 4; ++k) {
            REQUIRE(std::abs(back.corners[static_cast<std::size_t>(k)].x - b.corners[static_cast<std::size_t>(k)].x) <= 1e-4);
            REQUIRE(std::abs(back.corners[static_cast<std::size_t>(k)].y - b.corners[static_cast<std::size_t>(k)].y) <= 1e-4);
        }
    }
}

TEST_CASE("load_image P5") {
    TempDir tmp;
    const fs::path p = tmp.path / "a.pgm";
    {
        std::ofstream out(p, std::ios::binary);
        out << "P5\n2 2\n255\n";
        const unsigned char px[4] = {255, 0, 128, 64};
        out.write(reinterpret_cast<const char*>(px), 4);
    }
    const Image img = load_image(p);
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 2);
    CHECK(img.at(0, 0) == Catch::Approx(1.0));
    CHECK(img.at(1, 0) == Catch::Approx(0.0));
    CHECK(img.at(0, 1) == Catch::Approx(128.0 / 255.0));
}

TEST_CASE("load_image P6 collapses color by channel mean") {
    TempDir tmp;
    const fs::path p = tmp.path / "c.ppm";
    {
        std::ofstream out(p, std::ios::binary);
        out << "P6\n1 1\n255\n";
        const unsigned char px[3] = {30, 60, 90};
        out.write(reinterpret_cast<const char*>(px), 3);
    }
    const Image img = load_image(p);
    CHECK(img.at(0, 0) == Catch::Approx(60.0 / 255.0));
}

TEST_CASE("load_image P2 ascii with comments") {
    TempDir tmp;
    const fs::path p = tmp.path / "a.pgm";
    {
        std::ofstream out(p);
        out << "P2\n# comment line\n2 1\n100\n100 0\n";
    }
    const Image img = load_image(p);
    CHECK(img.at(0, 0) == Catch::Approx(1.0));
    CHECK(img.at(1, 0) == Catch::Approx(0.0));
}

TEST_CASE("load_image errors") {
    TempDir tmp;
    CHECK_THROWS_AS(load_image(tmp.path / "missing.pgm"), IoError);

    const fs::path trunc = tmp.path / "t.pgm";
    {
        std::ofstream out(trunc, std::ios::binary);
        out << "P5\n4 4\n255\n";
        const unsigned char px[3] = {1, 2, 3};   // 13 bytes short
        out.write(reinterpret_cast<const char*>(px), 3);
    }
    CHECK_THROWS_AS(load_image(trunc), IoError);

    const fs::path bad = tmp.path / "b.img";
    {
        std::ofstream out(bad);
        out << "BM123456";
    }
    CHECK_THROWS_AS(load_image(bad), UnsupportedFormat);
}

TEST_CASE("save_pgm / load_image round trip") {
    TempDir tmp;
    Rng rng(9);
    Image img(17, 13);
    for (double& v : img.data)
        v = std::lround(uniform01(rng) * 255.0) / 255.0;   // already quantized
    const fs::path p = tmp.path / "rt.pgm";
    save_pgm(p, img);
    const Image back = load_image(p);
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        REQUIRE(back.data[i] == Catch::Approx(img.data[i]).margin(1e-12));
}

TEST_CASE("matches file round trip with comments") {
    TempDir tmp;
    const fs::path p = tmp.path / "m.txt";
    {
        std::ofstream out(p);
        out << "# header comment\n";
        out << "1.5 2.5 3.25 4.75\n";
        out << "\n";
        out << "10 20 30 40 # trailing comment\n";
    }
    const auto m = load_matches(p);
    REQUIRE(m.size() == 2);
    CHECK(m[0].src.x == Catch::Approx(1.5));
    CHECK(m[1].dst.y == Catch::Approx(40.0));

    save_matches(tmp.path / "w.txt", m);
    const auto back = load_matches(tmp.path / "w.txt");
    REQUIRE(back.size() == 2);
    CHECK(back[1].dst.x == Catch::Approx(30.0));

    {
        std::ofstream out(tmp.path / "bad.txt");
        out << "1 2 3\n";
    }
    CHECK_THROWS_AS(load_matches(tmp.path / "bad.txt"), ParseError);
}

TEST_CASE("config defaults and overrides") {
    const TrackerConfig def = parse_config(nlohmann::json::object());
    CHECK(def.reference_interval == 10);
    CHECK(def.region.velocity_threshold == Catch::Approx(5.0));
    CHECK(def.reinit_gap == 5);
    CHECK(def.region.out_resolution == 255);
    CHECK(def.matcher_key == "ncc");

    const TrackerConfig t = parse_config(nlohmann::json{{"velocity_threshold", 8}});
    CHECK(t.region.velocity_threshold == Catch::Approx(8.0));
    CHECK(t.reference_interval == 10);   // untouched

    try {
        parse_config(nlohmann::json{{"foo", 1}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
}

TEST_CASE("load_config from file") {
    TempDir tmp;
    const fs::path p = tmp.path / "cfg.json";
    {
        std::ofstream out(p);
        out << R"({"n": 4, "q_velocity": 9.0, "rng_seed": 77})";
    }
    const TrackerConfig cfg = load_config(p);
    CHECK(cfg.reference_interval == 4);
    CHECK(cfg.kalman.Q(2, 2) == Catch::Approx(9.0));
    CHECK(cfg.ransac.rng_seed == 77);

    {
        std::ofstream out(p);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_config(p), ConfigError);
    CHECK_THROWS_AS(load_config(tmp.path / "nope.json"), IoError);
}

TEST_CASE("load_sequence validates and orders") {
    TempDir tmp;
    Image img(8, 8, 0.5);
    save_pgm(tmp.path / "000002.pgm", img);
    save_pgm(tmp.path / "000000.pgm", img);
    save_pgm(tmp.path / "000001.pgm", img);
    {
        std::ofstream gt(tmp.path / "groundtruth.txt");
        gt << "1,1,4,4\n1,1,4,4\n1,1,4,4\n";
    }
    save_matches(tmp.path / "matches_000001.txt", {{{0, 0}, {1, 1}}});

    const SequenceBundle b = load_sequence(tmp.path);
    REQUIRE(b.frame_paths.size() == 3);
    CHECK(b.frame_paths[0].filename() == "000000.pgm");
    CHECK(b.frame_paths[2].filename() == "000002.pgm");
    CHECK(b.gt.size() == 3);
    CHECK_FALSE(b.matches_paths[0].has_value());
    CHECK(b.matches_paths[1].has_value());

    {
        std::ofstream gt(tmp.path / "groundtruth.txt");
        gt << "1,1,4,4\n";
    }
    CHECK_THROWS_AS(load_sequence(tmp.path), LengthMismatch);

    fs::remove(tmp.path / "groundtruth.txt");
    CHECK_THROWS_AS(load_sequence(tmp.path), IoError);
}
