#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spmc/bessel.hpp"
#include "spmc/rng.hpp"
#include "spmc/von_mises.hpp"

using namespace spmc;

namespace {

std::vector<double> draw(double mean, double kappa, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    const WrappedAngle mu(mean);
    const Concentration k(kappa);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(sample_von_mises(mu, k, rng).value());
    }
    return out;
}

} // namespace

TEST_CASE("kappa = 0 degenerates to circular uniform", "[von_mises]") {
    const auto xs = draw(0.0, 0.0, 1000000, 2024);
    const auto s = oracle::circular_summary(xs);
    CHECK(s.resultant_length < 0.01);
    for (double x : xs) {
        CHECK(x > -pi);
        CHECK(x <= pi);
    }
}

TEST_CASE("circular mean sits at the mode", "[von_mises]") {
    const auto xs = draw(0.5, 10.0, 1000000, 99);
    const auto s = oracle::circular_summary(xs);
    CHECK(s.mean == Catch::Approx(0.5).margin(0.005));
}

TEST_CASE("empirical resultant length equals rho(kappa)", "[von_mises]") {
    const auto xs = draw(0.0, 2.0, 1000000, 7);
    const auto s = oracle::circular_summary(xs);
    CHECK(s.resultant_length == Catch::Approx(0.6977746579).margin(0.005));
}

TEST_CASE("moment identity E[cos(phi - mu)] = rho(kappa) within 3 MC sigma", "[von_mises]") {
    for (double kappa : {0.3, 1.0, 2.0, 5.0, 25.0}) {
        const std::size_t n = 1000000;
        Rng rng(static_cast<std::uint64_t>(kappa * 1000) + 5);
        const WrappedAngle mu(0.7);
        const Concentration k(kappa);
        std::vector<double> cosines;
        cosines.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            cosines.push_back(std::cos(sample_von_mises(mu, k, rng).value() - mu.value()));
        }
        const auto m = oracle::moments(cosines);
        const double rho = bessel_ratio_rho(kappa);
        INFO("kappa = " << kappa);
        CHECK(std::abs(m.mean - rho) < 3.0 * m.mean_stderr);
    }
}

TEST_CASE("sampler is deterministic for a fixed seed", "[von_mises]") {
    const auto a = draw(0.3, 4.0, 1000, 42);
    const auto b = draw(0.3, 4.0, 1000, 42);
    CHECK(a == b);
}

TEST_CASE("infinite concentration returns the mean", "[von_mises]") {
    Rng rng(1);
    const WrappedAngle mu(1.234);
    CHECK(sample_von_mises(mu, Concentration::infinite(), rng).value() == mu.value());
}

TEST_CASE("samples land in the canonical interval at extreme kappa", "[von_mises]") {
    const auto xs = draw(pi, 1e6, 10000, 11);
    const auto s = oracle::circular_summary(xs);
    // Mean pi is the wrap boundary; samples cluster around it on both sides.
    CHECK(std::abs(oracle::circular_summary(xs).resultant_length) > 0.999);
    CHECK(std::abs(angular_difference(s.mean, pi)) < 1e-3);
}
