#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spmc/angles.hpp"
#include "spmc/geometry.hpp"

namespace spmc {

/// The set of transmit-selectable phase increments and the bit labelling.
///
/// Entry i carries the per-element increment delta_theta^(i); when the
/// geometry admits it, the implied transmit DoA is recorded too. Gray
/// codewords make adjacent-increment confusions cost a single bit.
struct SpatialAlphabet {
    std::vector<WrappedAngle> increments;
    std::vector<std::uint32_t> codewords;   // Gray word per index; empty if unlabelled
    std::vector<double> implied_doa_rad;    // NaN where geometry-infeasible
    std::vector<bool> geometry_feasible;

    std::size_t size() const { return increments.size(); }

    int bits_per_symbol() const {
        if (codewords.empty()) return 0;
        int b = 0;
        while ((std::size_t{1} << b) < increments.size()) ++b;
        return b;
    }

    /// Smallest wrapped separation over all hypothesis pairs.
    double min_separation() const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < increments.size(); ++i) {
            for (std::size_t j = i + 1; j < increments.size(); ++j) {
                const double d =
                    std::abs(angular_difference(increments[i].value(), increments[j].value()));
                if (d < best) best = d;
            }
        }
        return best;
    }

    void validate() const {
        if (increments.empty()) throw std::invalid_argument("SpatialAlphabet: empty");
        if (!(min_separation() > 0.0)) {
            throw std::invalid_argument("SpatialAlphabet: increments must be distinct");
        }
        if (!codewords.empty() && codewords.size() != increments.size()) {
            throw std::invalid_argument("SpatialAlphabet: codeword count mismatch");
        }
    }
};

inline bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

inline std::uint32_t gray_encode(std::uint32_t x) { return x ^ (x >> 1); }

/// Uniformly spaced alphabet on (-pi, pi]:
///   delta_theta^(i) = -pi + (2i - 1) pi / n_tx,  i = 1..n_tx,
/// with a Gray bit map when n_tx is a power of two. Entries whose increment
/// exceeds the geometric range |delta| <= 2 pi d/lambda are marked
/// geometry-infeasible (no physical DoA realizes them).
inline SpatialAlphabet build_uniform_alphabet(int n_tx, const ArrayGeometry& geom,
                                              bool with_bit_map = true) {
    geom.validate();
    if (n_tx < 2) throw std::invalid_argument("build_uniform_alphabet: n_tx must be >= 2");
    if (with_bit_map && !is_power_of_two(static_cast<std::size_t>(n_tx))) {
        throw std::invalid_argument("build_uniform_alphabet: bit map requires power-of-two n_tx");
    }

    SpatialAlphabet a;
    a.increments.reserve(static_cast<std::size_t>(n_tx));
    for (int i = 1; i <= n_tx; ++i) {
        a.increments.emplace_back(-pi + (2.0 * i - 1.0) * pi / n_tx);
    }
    for (const auto& inc : a.increments) {
        const double s = inc.value() / (two_pi * geom.spacing_over_lambda);
        if (std::abs(s) <= 1.0) {
            a.implied_doa_rad.push_back(std::asin(s));
            a.geometry_feasible.push_back(true);
        } else {
            a.implied_doa_rad.push_back(std::numeric_limits<double>::quiet_NaN());
            a.geometry_feasible.push_back(false);
        }
    }
    if (with_bit_map) {
        a.codewords.reserve(static_cast<std::size_t>(n_tx));
        for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n_tx); ++i) {
            a.codewords.push_back(gray_encode(i));
        }
    }
    return a;
}

} // namespace spmc
