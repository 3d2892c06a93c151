#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "spmc/angles.hpp"
#include "spmc/errors.hpp"
#include "spmc/observation.hpp"

namespace spmc {

/// Output of the per-symbol phase-increment estimators.
struct EstimateResult {
    WrappedAngle delta_theta_hat;
    double objective_value = 0.0;               // fusion objective at the estimate
    std::vector<double> per_baseline_residuals; // wrap(angle_m - (m-1) estimate)
};

namespace detail {

// Effective fusion weight for baseline b: zero when flagged unreliable,
// clamped when the concentration is infinite so the arithmetic stays finite.
inline std::vector<double> fusion_weights(const SymbolObservation& obs,
                                          const std::vector<Concentration>& kappas) {
    if (kappas.size() != obs.num_baselines()) {
        throw std::invalid_argument("fusion: kappas size must match baseline count");
    }
    std::vector<double> w(kappas.size(), 0.0);
    for (std::size_t b = 0; b < kappas.size(); ++b) {
        if (!obs.reliable[b]) continue;
        w[b] = kappas[b].is_infinite() ? 1e12 : kappas[b].kappa();
    }
    return w;
}

// Shared unit-circle grids: grid[g] = exp(j theta_g), theta_g uniform over
// (-pi, pi].
inline const std::vector<std::complex<double>>& unit_grid(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<std::complex<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<std::complex<double>> g(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double theta = -pi + two_pi * (i + 1.0) / n;
            g[static_cast<std::size_t>(i)] = std::polar(1.0, theta);
        }
        it = cache.emplace(n, std::move(g)).first;
    }
    return it->second;
}

} // namespace detail

/// The fusion objective l(delta) = sum_m kappa_m Re{q_m exp(-j(m-1) delta)}.
inline double fusion_objective(const SymbolObservation& obs, const std::vector<double>& weights,
                               double delta_theta) {
    double acc = 0.0;
    for (std::size_t b = 0; b < obs.num_baselines(); ++b) {
        if (weights[b] == 0.0) continue;
        const double n = static_cast<double>(b + 1);
        acc += weights[b] * (obs.baselines[b].re() * std::cos(n * delta_theta) +
                             obs.baselines[b].im() * std::sin(n * delta_theta));
    }
    return acc;
}

/// d l / d delta = sum_m kappa_m (m-1) sin(angle_m - (m-1) delta).
inline double fusion_score(const SymbolObservation& obs, const std::vector<double>& weights,
                           double delta_theta) {
    double acc = 0.0;
    for (std::size_t b = 0; b < obs.num_baselines(); ++b) {
        if (weights[b] == 0.0) continue;
        const double n = static_cast<double>(b + 1);
        acc += weights[b] * n *
               (obs.baselines[b].im() * std::cos(n * delta_theta) -
                obs.baselines[b].re() * std::sin(n * delta_theta));
    }
    return acc;
}

/// d^2 l / d delta^2 = -sum_m kappa_m (m-1)^2 cos(angle_m - (m-1) delta).
inline double fusion_curvature(const SymbolObservation& obs, const std::vector<double>& weights,
                               double delta_theta) {
    double acc = 0.0;
    for (std::size_t b = 0; b < obs.num_baselines(); ++b) {
        if (weights[b] == 0.0) continue;
        const double n = static_cast<double>(b + 1);
        acc -= weights[b] * n * n *
               (obs.baselines[b].re() * std::cos(n * delta_theta) +
                obs.baselines[b].im() * std::sin(n * delta_theta));
    }
    return acc;
}

/// Default grid density for the global search: the objective carries
/// harmonics up to order M-1, so 64 points per harmonic period keeps the
/// global basin sampled with a sidelobe-safe margin.
inline int default_fusion_grid_points(int num_rx) { return std::max(4096, 64 * (num_rx - 1)); }

/// ML fusion of one symbol's baselines into a phase-increment estimate:
/// exhaustive evaluation of the fusion objective on a uniform grid over
/// (-pi, pi] followed by Newton refinement on the analytic score/curvature
/// (convergence at |score| < 1e-10 or 20 iterations).
inline EstimateResult fuse_ml(const SymbolObservation& obs, const std::vector<Concentration>& kappas,
                              int grid_points = 0) {
    const std::vector<double> weights = detail::fusion_weights(obs, kappas);
    const int num_rx = static_cast<int>(obs.num_baselines()) + 1;
    if (grid_points == 0) grid_points = default_fusion_grid_points(num_rx);
    if (grid_points < 8 * (num_rx - 1)) {
        throw std::invalid_argument("fuse_ml: grid_points must be >= 8 (M - 1)");
    }

    std::size_t usable = 0;
    std::size_t last_usable = 0;
    for (std::size_t b = 0; b < weights.size(); ++b) {
        if (weights[b] > 0.0) {
            ++usable;
            last_usable = b;
        }
    }
    if (usable == 0) throw NoSignalError("fuse_ml: no reliable baseline with positive weight");

    auto finish = [&](WrappedAngle est) {
        EstimateResult r;
        r.delta_theta_hat = est;
        r.objective_value = fusion_objective(obs, weights, est.value());
        r.per_baseline_residuals.reserve(obs.num_baselines());
        for (std::size_t b = 0; b < obs.num_baselines(); ++b) {
            r.per_baseline_residuals.push_back(angular_difference(
                obs.baselines[b].angle().value(), static_cast<double>(b + 1) * est.value()));
        }
        return r;
    };

    // A lone m = 2 baseline identifies the increment as its own angle.
    if (usable == 1 && last_usable == 0) {
        return finish(obs.baselines[0].angle());
    }

    // Grid pass. The objective at theta_g is Re sum_b c_b v^(b+1) with
    // v = conj(grid[g]); Horner evaluation avoids per-point trig.
    std::vector<std::complex<double>> coeff(weights.size());
    for (std::size_t b = 0; b < weights.size(); ++b) {
        coeff[b] = weights[b] * obs.baselines[b].as_complex();
    }
    const auto& grid = detail::unit_grid(grid_points);
    double best_val = -std::numeric_limits<double>::infinity();
    double best_theta = std::arg(grid[0]);
    for (int g = 0; g < grid_points; ++g) {
        const std::complex<double> v = std::conj(grid[static_cast<std::size_t>(g)]);
        std::complex<double> p{0.0, 0.0};
        for (std::size_t b = weights.size(); b-- > 0;) {
            p = (p + coeff[b]) * v;
        }
        if (p.real() > best_val) {
            best_val = p.real();
            best_theta = std::arg(grid[static_cast<std::size_t>(g)]);
        }
    }

    // Newton refinement within the located basin.
    double theta = best_theta;
    const double max_step = two_pi / grid_points * 4.0;
    for (int it = 0; it < 20; ++it) {
        const double score = fusion_score(obs, weights, theta);
        if (std::abs(score) < 1e-10) break;
        const double curv = fusion_curvature(obs, weights, theta);
        if (!(curv < 0.0)) break;
        double step = -score / curv;
        step = std::clamp(step, -max_step, max_step);
        theta = wrap_angle(theta + step);
        if (std::abs(step) < 1e-15) break;
    }
    if (fusion_objective(obs, weights, theta) < best_val) {
        theta = best_theta; // refinement may not leave the grid maximum behind
    }
    return finish(WrappedAngle(theta));
}

/// Closed-form weighted least-squares approximation in the phase domain:
///   wrap( sum kappa_m (m-1) phase_m / sum kappa_m (m-1)^2 ),
/// where each baseline angle is unwrapped against the progression predicted
/// by the running estimate built from the shorter baselines (m = 2 upward).
inline EstimateResult fuse_wls(const SymbolObservation& obs,
                               const std::vector<Concentration>& kappas) {
    const std::vector<double> weights = detail::fusion_weights(obs, kappas);

    std::size_t usable = 0;
    std::size_t last_usable = 0;
    for (std::size_t b = 0; b < weights.size(); ++b) {
        if (weights[b] > 0.0) {
            ++usable;
            last_usable = b;
        }
    }
    if (usable == 1 && last_usable == 0) {
        // Lone m = 2 baseline: the estimate is the raw angle, bit-for-bit the
        // same value fuse_ml returns.
        EstimateResult r;
        r.delta_theta_hat = obs.baselines[0].angle();
        r.objective_value = fusion_objective(obs, weights, r.delta_theta_hat.value());
        r.per_baseline_residuals.assign(obs.num_baselines(), 0.0);
        for (std::size_t b = 0; b < obs.num_baselines(); ++b) {
            r.per_baseline_residuals[b] = angular_difference(
                obs.baselines[b].angle().value(),
                static_cast<double>(b + 1) * r.delta_theta_hat.value());
        }
        return r;
    }

    double s1 = 0.0, s2 = 0.0;
    bool have_estimate = false;
    double running = 0.0;
    for (std::size_t b = 0; b < weights.size(); ++b) {
        if (weights[b] == 0.0) continue;
        const double n = static_cast<double>(b + 1);
        const double raw = obs.baselines[b].angle().value();
        double phase;
        if (!have_estimate) {
            phase = raw;
        } else {
            const double predicted = n * running;
            phase = predicted + angular_difference(raw, predicted);
        }
        s1 += weights[b] * n * phase;
        s2 += weights[b] * n * n;
        running = s1 / s2;
        have_estimate = true;
    }
    if (!have_estimate) throw NoSignalError("fuse_wls: no reliable baseline with positive weight");

    EstimateResult r;
    r.delta_theta_hat = WrappedAngle(s1 / s2);
    r.objective_value = fusion_objective(obs, weights, r.delta_theta_hat.value());
    r.per_baseline_residuals.reserve(obs.num_baselines());
    for (std::size_t b = 0; b < obs.num_baselines(); ++b) {
        r.per_baseline_residuals.push_back(
            angular_difference(obs.baselines[b].angle().value(),
                               static_cast<double>(b + 1) * r.delta_theta_hat.value()));
    }
    return r;
}

} // namespace spmc
