#include <catch2/catch_amalgamated.hpp>

#include "pts/motion.hpp"
#include "pts/random.hpp"

using namespace pts;

TEST_CASE("center_of_mass") {
    BinaryMask full(10, 10);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x)
            full.set(x, y);
    const Point2 c = center_of_mass(full);
    CHECK(c.x == Catch::Approx(4.5));
    CHECK(c.y == Catch::Approx(4.5));

    BinaryMask single(1, 1, {3, 7});
    single.set(0, 0);
    const Point2 s = center_of_mass(single);
    CHECK(s.x == Catch::Approx(3.0));
    CHECK(s.y == Catch::Approx(7.0));

    // L-shape {(0,0),(0,1),(1,0)} -> (1/3, 1/3)
    BinaryMask ell(2, 2);
    ell.set(0, 0);
    ell.set(0, 1);
    ell.set(1, 0);
    const Point2 l = center_of_mass(ell);
    CHECK(l.x == Catch::Approx(1.0 / 3.0));
    CHECK(l.y == Catch::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(center_of_mass(BinaryMask(4, 4)), EmptyMask);
}

TEST_CASE("center_of_mass is translation-equivariant") {
    Rng rng(5);
    BinaryMask m(8, 6);
    for (int i = 0; i < 20; ++i)
        m.set(static_cast<int>(uniform_index(rng, 8)), static_cast<int>(uniform_index(rng, 6)));
    const Point2 base = center_of_mass(m);
    BinaryMask shifted = m;
    shifted.origin = {11.0, -4.0};
    const Point2 moved = center_of_mass(shifted);
    CHECK(moved.x == Catch::Approx(base.x + 11.0));
    CHECK(moved.y == Catch::Approx(base.y - 4.0));
}

TEST_CASE("kalman_predict constant-velocity step") {
    KalmanConfig cfg;
    MotionState s;
    s.x_hat << 0, 0, 1, 2;
    const MotionState p = kalman_predict(s, cfg);
    CHECK(p.position().x == Catch::Approx(1.0));
    CHECK(p.position().y == Catch::Approx(2.0));
    CHECK(p.velocity().x == Catch::Approx(1.0));
    CHECK(p.velocity().y == Catch::Approx(2.0));
    CHECK(p.frame_index == s.frame_index + 1);

    MotionState still;
    still.x_hat << 5, 5, 0, 0;
    const MotionState q = kalman_predict(still, cfg);
    CHECK(q.position().x == Catch::Approx(5.0));
    CHECK(q.position().y == Catch::Approx(5.0));
}

TEST_CASE("kalman_predict covariance: P=I, Q=0 gives F*F^T") {
    KalmanConfig cfg;
    cfg.Q.setZero();
    MotionState s;
    s.P = Eigen::Matrix4d::Identity();
    const MotionState p = kalman_predict(s, cfg);
    Eigen::Matrix4d expect;
    expect << 2, 0, 1, 0,
              0, 2, 0, 1,
              1, 0, 1, 0,
              0, 1, 0, 1;
    CHECK((p.P - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kalman_correct limiting cases") {
    KalmanConfig cfg;
    MotionState prior;
    prior.x_hat << 10, 20, 1, 1;
    prior.P = Eigen::Matrix4d::Identity();

    SECTION("measurement-trusting limit") {
        cfg.R = 1e-12 * Eigen::Matrix2d::Identity();
        const MotionState post = kalman_correct(prior, {13, 17}, cfg);
        CHECK(std::abs(post.position().x - 13.0) < 1e-6);
        CHECK(std::abs(post.position().y - 17.0) < 1e-6);
    }
    SECTION("prior-trusting limit") {
        cfg.R = 1e12 * Eigen::Matrix2d::Identity();
        const MotionState post = kalman_correct(prior, {13, 17}, cfg);
        CHECK(std::abs(post.position().x - 10.0) < 1e-6);
        CHECK(std::abs(post.position().y - 20.0) < 1e-6);
    }
    SECTION("P=I, R=I gives gain 0.5 on measured coordinates") {
        cfg.R = Eigen::Matrix2d::Identity();
        const MotionState post = kalman_correct(prior, {14, 26}, cfg);
        CHECK(post.position().x == Catch::Approx(10 + 0.5 * 4));
        CHECK(post.position().y == Catch::Approx(20 + 0.5 * 6));
        CHECK(post.velocity().x == Catch::Approx(1.0));   // no pos-vel coupling in P=I
        CHECK(post.velocity().y == Catch::Approx(1.0));
    }
}

TEST_CASE("kalman_correct rejects singular innovation") {
    KalmanConfig cfg;
    cfg.R.setZero();
    MotionState prior;
    prior.P.setZero();
    CHECK_THROWS_AS(kalman_correct(prior, {0, 0}, cfg), SingularInnovation);
}

TEST_CASE("bootstrap_velocity") {
    const Vec2 a = bootstrap_velocity({0, 0}, {3, 4});
    CHECK(a.x == Catch::Approx(3.0));
    CHECK(a.y == Catch::Approx(4.0));
    const Vec2 b = bootstrap_velocity({5, 5}, {5, 5});
    CHECK(b.x == 0.0);
    CHECK(b.y == 0.0);
    const Vec2 c = bootstrap_velocity({10, 2}, {7, 6});
    CHECK(c.x == Catch::Approx(-3.0));
    CHECK(c.y == Catch::Approx(4.0));
}

TEST_CASE("advance_reference") {
    MotionState s;
    s.x_hat << 4, 5, 1, 0;
    s.P = Eigen::Vector4d(2, 2, 3, 3).asDiagonal();

    SECTION("identity leaves the state unchanged") {
        const MotionState out = advance_reference(s, Homography::identity());
        CHECK((out.x_hat - s.x_hat).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((out.P - s.P).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("translation shifts position, keeps velocity") {
        const MotionState out = advance_reference(s, Homography::translation(10, -2));
        CHECK(out.position().x == Catch::Approx(14.0));
        CHECK(out.position().y == Catch::Approx(3.0));
        CHECK(out.velocity().x == Catch::Approx(1.0));
        CHECK(out.velocity().y == Catch::Approx(0.0));
        CHECK((out.P - s.P).cwiseAbs().maxCoeff() < 1e-9);
    }
    SECTION("90-degree rotation rotates the velocity") {
        MotionState at_origin;
        at_origin.x_hat << 0, 0, 1, 0;
        const Homography rot = Homography::rotation(3.14159265358979323846 / 2.0);
        const MotionState out = advance_reference(at_origin, rot);
        CHECK(std::abs(out.position().x) < 1e-12);
        CHECK(std::abs(out.position().y) < 1e-12);
        CHECK(out.velocity().x == Catch::Approx(0.0).margin(1e-9));
        CHECK(out.velocity().y == Catch::Approx(1.0));
    }
}

TEST_CASE("kalman exactness on its own model") {
    // Noiseless constant-velocity track, R -> 0, Q = 0: after the bootstrap,
    // every prior position matches the true position.
    KalmanConfig cfg;
    cfg.Q.setZero();
    cfg.R = 1e-12 * Eigen::Matrix2d::Identity();

    const Point2 p0{100, 50};
    const Vec2 v{2.5, -1.0};

    MotionState s;
    s.set_position(p0);
    s.set_velocity({0, 0});
    s.P = cfg.P0;

    for (int t = 1; t <= 50; ++t) {
        const Point2 truth{p0.x + v.x * t, p0.y + v.y * t};
        const MotionState prior = kalman_predict(s, cfg);
        if (t >= 2) {
            CHECK(std::abs(prior.position().x - truth.x) < 1e-6);
            CHECK(std::abs(prior.position().y - truth.y) < 1e-6);
        }
        s = kalman_correct(prior, truth, cfg);
        if (t == 1)
            s.set_velocity(bootstrap_velocity(p0, truth));
    }
}

TEST_CASE("covariance stays symmetric PSD over long runs") {
    KalmanConfig cfg;
    Rng rng(99);
    MotionState s;
    s.P = cfg.P0;
    for (int i = 0; i < 1000; ++i) {
        s = kalman_predict(s, cfg);
        s = kalman_correct(s, {uniform_range(rng, -100, 100), uniform_range(rng, -100, 100)}, cfg);
        REQUIRE((s.P - s.P.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(s.P);
        REQUIRE(eig.eigenvalues().minCoeff() >= -1e-9);
    }
}

TEST_CASE("predict/correct are deterministic") {
    KalmanConfig cfg;
    MotionState s;
    s.x_hat << 1, 2, 3, 4;
    s.P = cfg.P0;
    const MotionState a = kalman_correct(kalman_predict(s, cfg), {7, 7}, cfg);
    const MotionState b = kalman_correct(kalman_predict(s, cfg), {7, 7}, cfg);
    CHECK((a.x_hat.array() == b.x_hat.array()).all());
    CHECK((a.P.array() == b.P.array()).all());
}
