#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spmc/localization.hpp"
#include "spmc/rng.hpp"
#include "spmc/scene.hpp"

using namespace spmc;

namespace {

AnchorSet square_anchors(double r) {
    AnchorSet a;
    a.positions = {{r, 0.0}, {0.0, r}, {-r, 0.0}, {0.0, -r}};
    a.schedule = {0, 1, 2, 3};
    return a;
}

std::vector<BearingMeasurement> noiseless_measurements(const AnchorSet& anchors, Vec2 p,
                                                       double variance) {
    std::vector<BearingMeasurement> out;
    for (std::size_t k : anchors.schedule) {
        out.push_back({bearing(p, anchors.positions[k]), variance, k});
    }
    return out;
}

} // namespace

TEST_CASE("bearing quadrants", "[localization]") {
    CHECK(bearing({1.0, 0.0}, {0.0, 0.0}).value() == 0.0);
    CHECK(bearing({0.0, 1.0}, {0.0, 0.0}).value() == Catch::Approx(pi / 2.0));
    CHECK(bearing({-1.0, -1.0}, {0.0, 0.0}).value() == Catch::Approx(-3.0 * pi / 4.0));
    CHECK_THROWS_AS(bearing({2.0, 3.0}, {2.0, 3.0}), DegenerateGeometryError);
}

TEST_CASE("bearing_gradient closed form and magnitude", "[localization]") {
    const Vec2 g = bearing_gradient({1.0, 0.0}, {0.0, 0.0});
    CHECK(g.x == 0.0);
    CHECK(g.y == 1.0);
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const Vec2 p{rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
        const Vec2 a{rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
        const double r = (p - a).norm();
        if (r < 1.0) continue;
        CHECK(bearing_gradient(p, a).norm() == Catch::Approx(1.0 / r).epsilon(1e-12));
    }
    CHECK_THROWS_AS(bearing_gradient({1.0, 1.0}, {1.0, 1.0}), DegenerateGeometryError);
}

TEST_CASE("bearing_gradient matches central finite differences", "[localization]") {
    Rng rng(17);
    const double h = 1e-6;
    for (int i = 0; i < 1000; ++i) {
        const Vec2 p{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0)};
        const Vec2 a{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0)};
        if ((p - a).norm() < 0.5) continue;
        const Vec2 g = bearing_gradient(p, a);
        const double fd_x = oracle::central_difference(
            [&](double x) { return bearing({x, p.y}, a).value(); }, p.x, h);
        const double fd_y = oracle::central_difference(
            [&](double y) { return bearing({p.x, y}, a).value(); }, p.y, h);
        CHECK(g.x == Catch::Approx(fd_x).margin(1e-6).epsilon(1e-6));
        CHECK(g.y == Catch::Approx(fd_y).margin(1e-6).epsilon(1e-6));
    }
}

TEST_CASE("single-anchor FIM is rank one", "[localization]") {
    AnchorSet a;
    a.positions = {{10.0, 5.0}};
    a.schedule = {0};
    const Mat2Sym j = position_fim({0.0, 0.0}, a, {1e-4});
    CHECK(j.det() == Catch::Approx(0.0).margin(1e-12));
    CHECK(j.is_singular());
    CHECK(std::isinf(peb(j)));
}

TEST_CASE("orthogonal anchors give a scaled identity FIM", "[localization]") {
    AnchorSet a;
    a.positions = {{30.0, 0.0}, {0.0, 30.0}};
    a.schedule = {0, 1};
    const double sigma2 = 1e-4;
    const Mat2Sym j = position_fim({0.0, 0.0}, a, {sigma2, sigma2});
    const double expected = 1.0 / (sigma2 * 30.0 * 30.0);
    CHECK(j.xx == Catch::Approx(expected).epsilon(1e-12));
    CHECK(j.yy == Catch::Approx(expected).epsilon(1e-12));
    CHECK(j.xy == Catch::Approx(0.0).margin(1e-18));
    // PEB = sigma r sqrt(2).
    CHECK(peb(j) == Catch::Approx(std::sqrt(sigma2) * 30.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("anchor FIM contribution scales as 1/r^2 at fixed bearing", "[localization]") {
    AnchorSet near;
    near.positions = {{20.0, 15.0}};
    near.schedule = {0};
    AnchorSet far;
    far.positions = {{40.0, 30.0}}; // same bearing, double range
    far.schedule = {0};
    const Mat2Sym jn = position_fim({0.0, 0.0}, near, {1e-4});
    const Mat2Sym jf = position_fim({0.0, 0.0}, far, {1e-4});
    CHECK(jn.xx == Catch::Approx(4.0 * jf.xx).epsilon(1e-12));
    CHECK(jn.yy == Catch::Approx(4.0 * jf.yy).epsilon(1e-12));
    CHECK(jn.xy == Catch::Approx(4.0 * jf.xy).epsilon(1e-12));
}

TEST_CASE("variance scaling moves the PEB by sqrt(c)", "[localization]") {
    const AnchorSet a = square_anchors(40.0);
    const std::vector<double> v1(4, 2.5e-5);
    std::vector<double> v4(4, 1e-4);
    const double p1 = peb(position_fim({7.0, -3.0}, a, v1));
    const double p4 = peb(position_fim({7.0, -3.0}, a, v4));
    CHECK(p4 == Catch::Approx(2.0 * p1).epsilon(1e-12));
}

TEST_CASE("adding a measurement never shrinks the information", "[localization]") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        AnchorSet a;
        const int n = 2 + static_cast<int>(rng.uniform_index(5));
        for (int i = 0; i < n; ++i) {
            a.positions.push_back({rng.uniform(-60.0, 60.0), rng.uniform(-60.0, 60.0)});
        }
        const Vec2 p{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
        Mat2Sym prev;
        for (int i = 0; i < n; ++i) {
            a.schedule.push_back(static_cast<std::size_t>(i));
            std::vector<double> vars(a.schedule.size(), 1e-4);
            if ((p - a.positions[static_cast<std::size_t>(i)]).norm() < 0.5) {
                a.schedule.pop_back();
                continue;
            }
            const Mat2Sym j = position_fim(p, a, vars);
            const auto [lo_prev, hi_prev] = prev.eigenvalues();
            const auto [lo, hi] = j.eigenvalues();
            CHECK(lo >= lo_prev - 1e-12);
            CHECK(hi >= hi_prev - 1e-12);
            prev = j;
        }
    }
}

TEST_CASE("solve_wls recovers the position from noiseless bearings", "[localization]") {
    AnchorSet a;
    a.positions = {{50.0, 0.0}, {0.0, 50.0}, {-30.0, -40.0}};
    a.schedule = {0, 1, 2};
    const Vec2 truth{3.0, 4.0};
    const auto meas = noiseless_measurements(a, truth, 1e-6);
    const PositionEstimate est = solve_wls(meas, a);
    CHECK(est.converged);
    CHECK((est.p_hat - truth).norm() < 1e-7);
}

TEST_CASE("two orthogonal bearings solve in one step from auto-init", "[localization]") {
    AnchorSet a;
    a.positions = {{20.0, 0.0}, {0.0, 20.0}};
    a.schedule = {0, 1};
    const Vec2 truth{-2.0, 6.0};
    const auto meas = noiseless_measurements(a, truth, 1e-6);
    const PositionEstimate est = solve_wls(meas, a);
    CHECK(est.converged);
    CHECK(est.iterations <= 2);
    CHECK((est.p_hat - truth).norm() < 1e-9);
}

TEST_CASE("collinear bearings raise the ill-conditioned error", "[localization]") {
    AnchorSet a;
    a.positions = {{10.0, 0.0}, {20.0, 0.0}, {30.0, 0.0}};
    a.schedule = {0, 1, 2};
    std::vector<BearingMeasurement> meas;
    for (std::size_t k = 0; k < 3; ++k) {
        meas.push_back({WrappedAngle(pi), 1e-6, k}); // all rays along -x
    }
    try {
        solve_wls(meas, a, nullptr);
        FAIL("expected IllConditionedError");
    } catch (const IllConditionedError& e) {
        CHECK(e.fim().is_singular());
    }
}

TEST_CASE("solver statistics are translation and rotation equivariant", "[localization]") {
    Rng rng(47);
    const AnchorSet base = square_anchors(35.0);
    const Vec2 truth{6.0, 2.0};
    const double sigma = 0.004;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<BearingMeasurement> meas;
        std::vector<double> noises;
        for (std::size_t k : base.schedule) {
            const double w = sigma * rng.normal();
            noises.push_back(w);
            meas.push_back(
                {WrappedAngle(bearing(truth, base.positions[k]).value() + w), sigma * sigma, k});
        }
        const PositionEstimate est = solve_wls(meas, base);

        // Translation by t.
        const Vec2 t{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0)};
        AnchorSet moved = base;
        for (auto& p : moved.positions) p = p + t;
        std::vector<BearingMeasurement> meas_t;
        for (std::size_t k = 0; k < meas.size(); ++k) {
            meas_t.push_back({WrappedAngle(bearing(truth + t, moved.positions[k]).value() +
                                           noises[k]),
                              sigma * sigma, k});
        }
        const PositionEstimate est_t = solve_wls(meas_t, moved);
        CHECK(((est_t.p_hat - t) - est.p_hat).norm() < 1e-7);
        CHECK(est_t.peb == Catch::Approx(est.peb).margin(1e-9));

        // Rotation by beta about the origin.
        const double beta = rng.uniform(-pi, pi);
        const double cb = std::cos(beta), sb = std::sin(beta);
        auto rot = [&](Vec2 v) { return Vec2{cb * v.x - sb * v.y, sb * v.x + cb * v.y}; };
        AnchorSet spun = base;
        for (auto& p : spun.positions) p = rot(p);
        std::vector<BearingMeasurement> meas_r;
        for (std::size_t k = 0; k < meas.size(); ++k) {
            meas_r.push_back({WrappedAngle(bearing(rot(truth), spun.positions[k]).value() +
                                           noises[k]),
                              sigma * sigma, k});
        }
        const PositionEstimate est_r = solve_wls(meas_r, spun);
        CHECK((est_r.p_hat - rot(est.p_hat)).norm() < 1e-7);
        CHECK(est_r.peb == Catch::Approx(est.peb).margin(1e-9));
    }
}

TEST_CASE("wrap-boundary bearings behave like the rotated scene", "[localization]") {
    // Device west of all anchors: bearings cluster near +-pi.
    AnchorSet a;
    a.positions = {{100.0, 10.0}, {100.0, -10.0}, {120.0, 0.0}};
    a.schedule = {0, 1, 2};
    const Vec2 truth{-5.0, 0.0};
    Rng rng(91);
    const double sigma = 0.003;
    std::vector<double> noises;
    std::vector<BearingMeasurement> meas;
    for (std::size_t k : a.schedule) {
        const double w = sigma * rng.normal();
        noises.push_back(w);
        meas.push_back(
            {WrappedAngle(bearing(truth, a.positions[k]).value() + w), sigma * sigma, k});
    }
    const PositionEstimate near_wrap = solve_wls(meas, a);

    // Rotate everything 90 degrees away from the boundary.
    auto rot = [](Vec2 v) { return Vec2{-v.y, v.x}; };
    AnchorSet spun = a;
    for (auto& p : spun.positions) p = rot(p);
    std::vector<BearingMeasurement> meas_r;
    for (std::size_t k = 0; k < meas.size(); ++k) {
        meas_r.push_back({WrappedAngle(bearing(rot(truth), spun.positions[k]).value() + noises[k]),
                          sigma * sigma, k});
    }
    const PositionEstimate rotated = solve_wls(meas_r, spun);
    CHECK((rotated.p_hat - rot(near_wrap.p_hat)).norm() < 1e-7);
}

TEST_CASE("WLS RMSE matches the PEB on the square scene", "[localization][slow]") {
    const AnchorSet a = square_anchors(60.0);
    const Vec2 truth{8.0, -5.0};
    const double sigma = 0.005;
    const std::vector<double> vars(4, sigma * sigma);
    const double bound = peb(position_fim(truth, a, vars));

    Rng rng(2718);
    double sum_sq = 0.0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        std::vector<BearingMeasurement> meas;
        for (std::size_t k : a.schedule) {
            meas.push_back({WrappedAngle(bearing(truth, a.positions[k]).value() +
                                         sigma * rng.normal()),
                            sigma * sigma, k});
        }
        const PositionEstimate est = solve_wls(meas, a);
        sum_sq += (est.p_hat - truth).norm() * (est.p_hat - truth).norm();
    }
    const double rmse = std::sqrt(sum_sq / trials);
    INFO("rmse " << rmse << " peb " << bound);
    CHECK(rmse == Catch::Approx(bound).epsilon(0.10));
}

TEST_CASE("sigma_phi_from_crlb delegates to the DoA bound", "[localization]") {
    ArrayGeometry geom;
    geom.num_rx = 8;
    const std::vector<Concentration> kappas(7, Concentration(50.0));
    CHECK(sigma_phi_from_crlb(kappas, geom, 0.25) ==
          crlb_doa(kappas, geom, 0.25).var_phi);
    // Endfire: diverging variance means near-zero WLS weight.
    const double near_end = sigma_phi_from_crlb(kappas, geom, pi / 2.0 - 1e-8);
    CHECK(1.0 / near_end < 1e-6);
    // Aperture ratio between M = 16 and M = 2 at equal large kappa.
    ArrayGeometry g16;
    g16.num_rx = 16;
    ArrayGeometry g2;
    g2.num_rx = 2;
    const std::vector<Concentration> k16(15, Concentration(1e5));
    const std::vector<Concentration> k2(1, Concentration(1e5));
    CHECK(sigma_phi_from_crlb(k2, g2, 0.1) / sigma_phi_from_crlb(k16, g16, 0.1) ==
          Catch::Approx(1240.0).epsilon(1e-6));
}

TEST_CASE("scene files parse with validation", "[localization][scene]") {
    const Scene s = load_scene(std::string(SPMC_TEST_SCENE_DIR) + "/square4.json");
    CHECK(s.anchors.positions.size() == 4);
    CHECK(s.anchors.schedule.size() == 4);
    CHECK(s.true_position.x == 8.0);
    CHECK(s.sigma_phi_variances[0] == Catch::Approx(2.5e-5));
    CHECK_FALSE(s.variances_from_crlb);

    const Scene demo = load_scene(std::string(SPMC_TEST_SCENE_DIR) + "/peb_demo.json");
    CHECK(demo.variances_from_crlb);
    ArrayGeometry geom;
    geom.num_rx = 8;
    const std::vector<Concentration> kappas(7, Concentration(100.0));
    CHECK(demo.sigma_phi_variances[0] ==
          Catch::Approx(sigma_phi_from_crlb(kappas, geom, 0.0)).epsilon(1e-12));

    CHECK_THROWS_AS(parse_scene(nlohmann::json{{"anchors", {{0.0, 1.0}}}}), SceneParseError);
    CHECK_THROWS_AS(parse_scene(nlohmann::json{{"bogus_key", 1}}), SceneParseError);
}
