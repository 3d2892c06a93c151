#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spmc/alphabet.hpp"
#include "spmc/angles.hpp"
#include "spmc/bessel.hpp"
#include "spmc/fusion.hpp"
#include "spmc/qfunc.hpp"

namespace spmc {

/// Hard decision over the spatial alphabet plus the per-hypothesis
/// (unnormalized) log-likelihoods it was taken from.
struct DetectionResult {
    std::size_t index = 0; // 0-based alphabet index
    std::vector<double> log_likelihoods;
};

/// N_tx-ary ML detector: evaluates the fusion objective at every hypothesis
/// increment and returns the argmax. Ties break to the lowest index so BER
/// runs are reproducible.
inline DetectionResult detect_ml(const SymbolObservation& obs, const SpatialAlphabet& alphabet,
                                 const std::vector<Concentration>& kappas) {
    alphabet.validate();
    const std::vector<double> weights = detail::fusion_weights(obs, kappas);
    bool any = false;
    for (double w : weights) any = any || w > 0.0;
    if (!any) throw NoSignalError("detect_ml: no reliable baseline with positive weight");

    DetectionResult out;
    out.log_likelihoods.reserve(alphabet.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        const std::complex<double> w = std::polar(1.0, -alphabet.increments[i].value());
        std::complex<double> rot = w;
        double ll = 0.0;
        for (std::size_t b = 0; b < weights.size(); ++b) {
            if (weights[b] != 0.0) {
                ll += weights[b] * (obs.baselines[b].as_complex() * rot).real();
            }
            rot *= w;
        }
        out.log_likelihoods.push_back(ll);
        if (ll > best) {
            best = ll;
            out.index = i;
        }
    }
    return out;
}

/// Pairwise error probability of the ML test under the small-noise
/// phase-domain approximation:
///   P(i -> j) ~= Q( |Delta_ij| / (2 sigma_eps) * sqrt(sum kappa_m (m-1)^2) ).
/// sigma_eps is the per-baseline Gaussian phase-noise std; the kappas act as
/// the detector's reliability weights (the small-noise identification
/// sigma_eps^2 ~= 1/kappa links the two; see the README).
inline double pairwise_error_probability(WrappedAngle delta_ij, double sigma_eps,
                                         const std::vector<Concentration>& kappas) {
    if (!(sigma_eps > 0.0)) {
        throw std::invalid_argument("pairwise_error_probability: sigma_eps must be > 0");
    }
    if (delta_ij.value() == 0.0) return 0.5;
    double aperture = 0.0;
    for (std::size_t b = 0; b < kappas.size(); ++b) {
        const double n = static_cast<double>(b + 1);
        aperture += kappas[b].kappa() * n * n;
    }
    if (std::isinf(aperture)) return 0.0;
    return q_function(std::abs(delta_ij.value()) / (2.0 * sigma_eps) * std::sqrt(aperture));
}

} // namespace spmc
