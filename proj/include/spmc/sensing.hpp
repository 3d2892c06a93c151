#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spmc/angles.hpp"
#include "spmc/bessel.hpp"
#include "spmc/errors.hpp"
#include "spmc/geometry.hpp"

namespace spmc {

/// Per-baseline and total Fisher information about the phase increment.
struct FisherBudget {
    std::vector<double> per_baseline; // entry b is baseline m = b + 2
    double total = 0.0;
};

/// Fisher information contributed by baseline m about the phase increment:
/// kappa_m (m-1)^2 rho(kappa_m). Independent of the increment itself.
inline double fisher_per_baseline(int m, Concentration kappa) {
    if (m < 2) throw std::invalid_argument("fisher_per_baseline: baseline index m must be >= 2");
    if (kappa.is_infinite()) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(m - 1);
    return kappa.kappa() * n * n * bessel_ratio_rho(kappa.kappa());
}

/// Sums the per-baseline contributions; kappas[b] belongs to baseline m = b+2.
inline FisherBudget fisher_budget(const std::vector<Concentration>& kappas) {
    FisherBudget fb;
    fb.per_baseline.reserve(kappas.size());
    for (std::size_t b = 0; b < kappas.size(); ++b) {
        fb.per_baseline.push_back(fisher_per_baseline(static_cast<int>(b) + 2, kappas[b]));
        fb.total += fb.per_baseline.back();
    }
    return fb;
}

/// CRLB on the phase increment: the exact bound 1 / sum kappa (m-1)^2 rho(kappa)
/// next to its high-concentration simplification (rho -> 1). A zero-information
/// budget yields the infinite-bound sentinel rather than overflowing.
struct DeltaThetaBound {
    double var_exact = std::numeric_limits<double>::infinity();
    double var_high_concentration = std::numeric_limits<double>::infinity();

    bool is_infinite() const { return std::isinf(var_exact); }
};

inline DeltaThetaBound crlb_delta_theta(const std::vector<Concentration>& kappas) {
    if (kappas.empty()) throw std::invalid_argument("crlb_delta_theta: no baselines");
    double info_exact = 0.0;
    double info_simple = 0.0;
    for (std::size_t b = 0; b < kappas.size(); ++b) {
        const double n = static_cast<double>(b + 1);
        const double k = kappas[b].kappa();
        if (std::isinf(k)) {
            info_exact = info_simple = std::numeric_limits<double>::infinity();
            break;
        }
        info_exact += k * n * n * bessel_ratio_rho(k);
        info_simple += k * n * n;
    }
    DeltaThetaBound out;
    if (info_exact > 0.0) out.var_exact = 1.0 / info_exact;
    if (info_simple > 0.0) out.var_high_concentration = 1.0 / info_simple;
    if (std::isinf(info_exact)) out.var_exact = 0.0;
    if (std::isinf(info_simple)) out.var_high_concentration = 0.0;
    return out;
}

/// DoA bound report at an evaluation angle phi: the increment bound mapped
/// through the scalar transformation rule with slope (2 pi d/lambda) cos(phi).
struct CrlbReport {
    double var_delta_theta = 0.0;        // exact bound, rad^2
    double var_delta_theta_simple = 0.0; // high-concentration form, rad^2
    double var_phi = 0.0;                // exact bound on the DoA, rad^2
    double var_phi_simple = 0.0;
    double doa = 0.0;                    // evaluation point, radians
};

inline CrlbReport crlb_doa(const std::vector<Concentration>& kappas, const ArrayGeometry& geom,
                           double phi_rad) {
    geom.validate();
    if (!(std::abs(phi_rad) < pi / 2.0)) {
        throw OutOfSectorError("crlb_doa: |phi| must be < pi/2");
    }
    if (kappas.size() != static_cast<std::size_t>(geom.num_baselines())) {
        throw std::invalid_argument("crlb_doa: kappas size must be M - 1");
    }
    const DeltaThetaBound base = crlb_delta_theta(kappas);
    const double slope = two_pi * geom.spacing_over_lambda * std::cos(phi_rad);
    CrlbReport out;
    out.var_delta_theta = base.var_exact;
    out.var_delta_theta_simple = base.var_high_concentration;
    out.var_phi = base.var_exact / (slope * slope);
    out.var_phi_simple = base.var_high_concentration / (slope * slope);
    out.doa = phi_rad;
    return out;
}

} // namespace spmc
