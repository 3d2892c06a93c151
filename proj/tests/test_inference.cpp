#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "spmc/alphabet.hpp"
#include "spmc/channel.hpp"
#include "spmc/detection.hpp"
#include "spmc/fusion.hpp"
#include "spmc/geometry.hpp"
#include "spmc/observation.hpp"
#include "spmc/rng.hpp"
#include "spmc/von_mises.hpp"

using namespace spmc;

namespace {

SymbolObservation noiseless_obs(int num_rx, double delta_theta) {
    SymbolObservation obs;
    for (int b = 1; b < num_rx; ++b) {
        obs.baselines.push_back(ManifoldPoint::from_angle(WrappedAngle(b * delta_theta)));
        obs.raw_magnitudes.push_back(0.5);
        obs.reliable.push_back(true);
    }
    return obs;
}

SymbolObservation obs_from_angles(const std::vector<double>& angles) {
    SymbolObservation obs;
    for (double a : angles) {
        obs.baselines.push_back(ManifoldPoint::from_angle(WrappedAngle(a)));
        obs.raw_magnitudes.push_back(0.5);
        obs.reliable.push_back(true);
    }
    return obs;
}

std::vector<Concentration> equal_kappas(int num_baselines, double kappa) {
    return std::vector<Concentration>(static_cast<std::size_t>(num_baselines),
                                      Concentration(kappa));
}

ArrayGeometry half_lambda_geom(int m) {
    ArrayGeometry g;
    g.num_rx = m;
    return g;
}

} // namespace

TEST_CASE("build_uniform_alphabet spacing and bit map", "[alphabet]") {
    const ArrayGeometry geom = half_lambda_geom(2);
    const SpatialAlphabet two = build_uniform_alphabet(2, geom);
    CHECK(two.increments[0].value() == Catch::Approx(-pi / 2.0));
    CHECK(two.increments[1].value() == Catch::Approx(pi / 2.0));

    const SpatialAlphabet sixteen = build_uniform_alphabet(16, geom);
    CHECK(sixteen.min_separation() == Catch::Approx(two_pi / 16.0));
    CHECK(sixteen.bits_per_symbol() == 4);
    // Adjacent codewords differ in exactly one bit.
    for (std::size_t i = 0; i + 1 < sixteen.size(); ++i) {
        CHECK(std::popcount(sixteen.codewords[i] ^ sixteen.codewords[i + 1]) == 1);
    }
    // Implied DoA of the pi/2 increment at d/lambda = 0.5 is 30 degrees.
    for (std::size_t i = 0; i < sixteen.size(); ++i) {
        if (std::abs(sixteen.increments[i].value() - pi / 2.0) < 1e-12) {
            CHECK(sixteen.implied_doa_rad[i] == Catch::Approx(pi / 6.0).margin(1e-12));
        }
        CHECK(sixteen.geometry_feasible[i]);
    }
    CHECK_THROWS_AS(build_uniform_alphabet(12, geom, true), std::invalid_argument);
    CHECK_NOTHROW(build_uniform_alphabet(12, geom, false));
}

TEST_CASE("fuse_ml recovers noiseless increments", "[fusion]") {
    const auto kappas = equal_kappas(7, 4.0);
    const auto obs = noiseless_obs(8, 0.7);
    const EstimateResult est = fuse_ml(obs, kappas);
    CHECK(est.delta_theta_hat.value() == Catch::Approx(0.7).margin(1e-9));
    for (double r : est.per_baseline_residuals) CHECK(std::abs(r) < 1e-8);
    // Objective value matches a direct evaluation at the estimate.
    const double direct =
        fusion_objective(obs, std::vector<double>(7, 4.0), est.delta_theta_hat.value());
    CHECK(est.objective_value == Catch::Approx(direct).margin(0.0));
}

TEST_CASE("fuse_ml with a single baseline returns its angle exactly", "[fusion]") {
    const auto obs = obs_from_angles({1.234});
    const EstimateResult est = fuse_ml(obs, equal_kappas(1, 2.0));
    CHECK(est.delta_theta_hat.value() == 1.234);
}

TEST_CASE("fuse_ml finds the global maximum, not a sidelobe", "[fusion]") {
    const auto obs = noiseless_obs(5, 2.9);
    const std::vector<double> w(4, 1.0);
    const double oracle_max = oracle::grid_argmax(
        [&](double t) { return fusion_objective(obs, w, t); }, 1000000);
    CHECK(oracle_max == Catch::Approx(2.9).margin(1e-4));
    const EstimateResult est = fuse_ml(obs, equal_kappas(4, 1.0), 4096);
    CHECK(est.delta_theta_hat.value() == Catch::Approx(2.9).margin(1e-9));
}

TEST_CASE("fuse_ml estimate dominates every grid point", "[fusion]") {
    Rng rng(404);
    const auto kappas = equal_kappas(5, 3.0);
    const std::vector<double> w(5, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> angles;
        for (int b = 0; b < 5; ++b) angles.push_back(rng.uniform(-pi, pi));
        const auto obs = obs_from_angles(angles);
        const EstimateResult est = fuse_ml(obs, kappas, 1024);
        for (int g = 0; g < 1024; ++g) {
            const double theta = -pi + two_pi * (g + 1.0) / 1024.0;
            REQUIRE(est.objective_value >= fusion_objective(obs, w, theta) - 1e-9);
        }
    }
}

TEST_CASE("global-rotation covariance on noiseless observations", "[fusion]") {
    Rng rng(7);
    const auto kappas = equal_kappas(3, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double base = rng.uniform(-pi, pi);
        const double shift = rng.uniform(-pi, pi);
        const auto obs_a = noiseless_obs(4, base);
        const auto obs_b = noiseless_obs(4, wrap_angle(base + shift));
        const double est_a = fuse_ml(obs_a, kappas).delta_theta_hat.value();
        const double est_b = fuse_ml(obs_b, kappas).delta_theta_hat.value();
        CHECK(angular_difference(est_b, est_a) ==
              Catch::Approx(angular_difference(wrap_angle(base + shift), base)).margin(1e-8));
    }
}

TEST_CASE("fuse_ml validates inputs", "[fusion]") {
    const auto obs = noiseless_obs(4, 0.3);
    CHECK_THROWS_AS(fuse_ml(obs, equal_kappas(2, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(fuse_ml(obs, equal_kappas(3, 1.0), 8), std::invalid_argument);

    SymbolObservation dead = obs;
    dead.reliable = {false, false, false};
    CHECK_THROWS_AS(fuse_ml(dead, equal_kappas(3, 1.0)), NoSignalError);
    CHECK_THROWS_AS(fuse_ml(obs, equal_kappas(3, 0.0)), NoSignalError);
}

TEST_CASE("unreliable baselines are down-weighted, not fatal", "[fusion]") {
    auto obs = noiseless_obs(4, 0.5);
    obs.baselines[1] = ManifoldPoint::zero();
    obs.reliable[1] = false;
    const EstimateResult est = fuse_ml(obs, equal_kappas(3, 5.0));
    CHECK(est.delta_theta_hat.value() == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("fuse_wls closed form on a three-element array", "[fusion]") {
    const auto obs = obs_from_angles({0.1, 0.2});
    const EstimateResult est = fuse_wls(obs, equal_kappas(2, 1.0));
    CHECK(est.delta_theta_hat.value() == Catch::Approx(0.1).margin(1e-15));
}

TEST_CASE("fuse_wls equals fuse_ml for a single baseline", "[fusion]") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const auto obs = obs_from_angles({rng.uniform(-pi, pi)});
        const auto kappas = equal_kappas(1, 3.0);
        CHECK(fuse_wls(obs, kappas).delta_theta_hat.value() ==
              fuse_ml(obs, kappas).delta_theta_hat.value());
    }
}

TEST_CASE("fuse_wls tracks fuse_ml at high concentration", "[fusion]") {
    const ArrayGeometry geom = half_lambda_geom(8);
    ChannelConfig ch;
    const auto kappas = equal_kappas(7, 200.0);
    Rng rng(2025);
    int agree = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        const WrappedAngle truth(rng.uniform(-pi, pi));
        const auto obs = generate_observation_statistical(geom, ch, truth, kappas, rng);
        const double ml = fuse_ml(obs, kappas).delta_theta_hat.value();
        const double wls = fuse_wls(obs, kappas).delta_theta_hat.value();
        if (std::abs(angular_difference(wls, ml)) < 0.01) ++agree;
    }
    CHECK(agree >= trials * 99 / 100);
}

TEST_CASE("detect_ml picks the aligned hypothesis with perfect likelihood", "[detection]") {
    const ArrayGeometry geom = half_lambda_geom(4);
    const SpatialAlphabet alphabet = build_uniform_alphabet(16, geom);
    const auto kappas = equal_kappas(3, 2.5);
    const auto obs = noiseless_obs(4, alphabet.increments[4].value());
    const DetectionResult det = detect_ml(obs, alphabet, kappas);
    CHECK(det.index == 4);
    CHECK(det.log_likelihoods[4] == Catch::Approx(3 * 2.5).margin(1e-12));
}

TEST_CASE("detect_ml breaks midway ties toward the lower index", "[detection]") {
    // Observation exactly midway between the hypotheses; the symmetric
    // construction makes the two likelihoods equal bit-for-bit.
    SpatialAlphabet alphabet;
    alphabet.increments = {WrappedAngle(-0.4), WrappedAngle(0.4)};
    const auto obs = obs_from_angles({0.0});
    const DetectionResult det = detect_ml(obs, alphabet, equal_kappas(1, 1.0));
    CHECK(det.log_likelihoods[0] == det.log_likelihoods[1]);
    CHECK(det.index == 0);
}

TEST_CASE("detection is invariant to positive magnitude scaling", "[detection]") {
    const ArrayGeometry geom = half_lambda_geom(4);
    const SpatialAlphabet alphabet = build_uniform_alphabet(16, geom);
    const auto kappas = equal_kappas(3, 6.0);
    ChannelConfig ch;
    Rng rng(88);
    for (int i = 0; i < 500; ++i) {
        const std::size_t tx = rng.uniform_index(16);
        auto obs = generate_observation_statistical(geom, ch, alphabet.increments[tx], kappas, rng);
        auto scaled = obs;
        for (auto& m : scaled.raw_magnitudes) m *= rng.uniform(0.1, 9.0);
        const auto a = detect_ml(obs, alphabet, kappas);
        const auto b = detect_ml(scaled, alphabet, kappas);
        REQUIRE(a.index == b.index);
    }
}

TEST_CASE("pairwise_error_probability closed form", "[detection]") {
    CHECK(pairwise_error_probability(WrappedAngle(0.0), 0.1, equal_kappas(1, 1.0)) == 0.5);
    const double p =
        pairwise_error_probability(WrappedAngle(two_pi / 16.0), 0.1, equal_kappas(1, 1.0));
    CHECK(p == Catch::Approx(0.02478).epsilon(2e-3));
    CHECK(p == Catch::Approx(oracle::q_integral((pi / 8.0) / 0.2)).margin(1e-12));
    CHECK_THROWS_AS(pairwise_error_probability(WrappedAngle(0.1), 0.0, equal_kappas(1, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("doubling the kappas scales the Q argument by sqrt(2)", "[detection]") {
    const WrappedAngle delta(0.35);
    const double sigma = 0.07;
    const auto k1 = equal_kappas(4, 3.0);
    const auto k2 = equal_kappas(4, 6.0);
    double aperture = 0.0;
    for (int b = 1; b <= 4; ++b) aperture += 3.0 * b * b;
    const double arg1 = std::abs(delta.value()) / (2.0 * sigma) * std::sqrt(aperture);
    CHECK(pairwise_error_probability(delta, sigma, k1) ==
          Catch::Approx(q_function(arg1)).margin(1e-15));
    CHECK(pairwise_error_probability(delta, sigma, k2) ==
          Catch::Approx(q_function(arg1 * std::sqrt(2.0))).margin(1e-15));
}

TEST_CASE("detector SER is consistent with the pairwise union bound", "[detection][slow]") {
    const ArrayGeometry geom = half_lambda_geom(2);
    const SpatialAlphabet alphabet = build_uniform_alphabet(16, geom);
    ChannelConfig ch;
    for (double kappa : {50.0, 200.0, 400.0}) {
        const auto kappas = equal_kappas(1, kappa);
        const double sigma_eps = 1.0 / std::sqrt(kappa);
        // Two nearest neighbours at the uniform spacing; weight 1 per the
        // small-noise identification sigma_eps^2 = 1/kappa.
        const double pep = pairwise_error_probability(WrappedAngle(two_pi / 16.0), sigma_eps,
                                                      equal_kappas(1, 1.0));
        const double union_bound = 2.0 * pep;

        Rng rng(static_cast<std::uint64_t>(kappa) * 31 + 7);
        std::int64_t errors = 0;
        std::int64_t trials = 0;
        while (errors < 200 && trials < 4000000) {
            const std::size_t tx = rng.uniform_index(16);
            const auto obs =
                generate_observation_statistical(geom, ch, alphabet.increments[tx], kappas, rng);
            errors += detect_ml(obs, alphabet, kappas).index != tx;
            ++trials;
        }
        const double ser = static_cast<double>(errors) / static_cast<double>(trials);
        INFO("kappa " << kappa << " ser " << ser << " union " << union_bound);
        CHECK(ser < 2.0 * union_bound);
        CHECK(ser > 0.5 * union_bound);
    }
}

TEST_CASE("SER decreases with concentration", "[detection][slow]") {
    const ArrayGeometry geom = half_lambda_geom(4);
    const SpatialAlphabet alphabet = build_uniform_alphabet(16, geom);
    ChannelConfig ch;
    double prev = 1.0;
    for (double kappa : {1.0, 5.0, 20.0, 100.0}) {
        const auto kappas = equal_kappas(3, kappa);
        Rng rng(static_cast<std::uint64_t>(kappa) + 1);
        std::int64_t errors = 0;
        const int trials = 100000;
        for (int i = 0; i < trials; ++i) {
            const std::size_t tx = rng.uniform_index(16);
            const auto obs =
                generate_observation_statistical(geom, ch, alphabet.increments[tx], kappas, rng);
            errors += detect_ml(obs, alphabet, kappas).index != tx;
        }
        const double ser = static_cast<double>(errors) / trials;
        INFO("kappa " << kappa << " ser " << ser);
        CHECK(ser <= prev + 3.0 * std::sqrt(prev / trials));
        prev = std::max(ser, 1e-12);
    }
}

TEST_CASE("detect_ml refuses an all-unreliable observation", "[detection]") {
    const ArrayGeometry geom = half_lambda_geom(3);
    const SpatialAlphabet alphabet = build_uniform_alphabet(4, geom);
    SymbolObservation dead;
    dead.baselines = {ManifoldPoint::zero(), ManifoldPoint::zero()};
    dead.raw_magnitudes = {0.0, 0.0};
    dead.reliable = {false, false};
    CHECK_THROWS_AS(detect_ml(dead, alphabet, equal_kappas(2, 5.0)), NoSignalError);
}
