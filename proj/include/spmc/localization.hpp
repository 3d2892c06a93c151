#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spmc/angles.hpp"
#include "spmc/errors.hpp"
#include "spmc/geometry.hpp"
#include "spmc/sensing.hpp"

namespace spmc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

/// Symmetric 2x2 matrix, enough linear algebra for the position FIM.
struct Mat2Sym {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    Mat2Sym operator+(const Mat2Sym& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
    double det() const { return xx * yy - xy * xy; }
    double trace() const { return xx + yy; }

    bool is_singular() const {
        const double scale = 0.5 * trace();
        return !(det() > 1e-12 * scale * scale);
    }

    /// Solves A v = b; caller must check is_singular() first.
    Vec2 solve(Vec2 b) const {
        const double d = det();
        return {(yy * b.x - xy * b.y) / d, (xx * b.y - xy * b.x) / d};
    }

    std::pair<double, double> eigenvalues() const {
        const double mean = 0.5 * trace();
        const double disc = std::sqrt(std::max(0.0, mean * mean - det()));
        return {mean - disc, mean + disc};
    }
};

/// A fusion solver failure on degenerate geometry; carries the singular
/// normal matrix (the FIM up to weighting) for diagnosis.
class IllConditionedError : public std::runtime_error {
public:
    IllConditionedError(const std::string& what, Mat2Sym fim)
        : std::runtime_error(what), fim_(fim) {}
    const Mat2Sym& fim() const { return fim_; }

private:
    Mat2Sym fim_;
};

/// Known radiator positions and the active-anchor schedule.
struct AnchorSet {
    std::vector<Vec2> positions;
    std::vector<std::size_t> schedule; // anchor index per measurement slot k

    void validate() const {
        if (schedule.empty()) throw std::invalid_argument("AnchorSet: schedule must be nonempty");
        for (std::size_t idx : schedule) {
            if (idx >= positions.size()) {
                throw std::invalid_argument("AnchorSet: schedule references unknown anchor");
            }
        }
    }
};

/// A bearing observation with its variance weight.
struct BearingMeasurement {
    WrappedAngle phi_hat;
    double variance = 0.0; // rad^2, > 0
    std::size_t anchor_index = 0;
};

/// Four-quadrant bearing of p as seen against anchor i:
/// atan2(y - y_i, x - x_i), in (-pi, pi].
inline WrappedAngle bearing(Vec2 p, Vec2 anchor) {
    const Vec2 d = p - anchor;
    if (d.x == 0.0 && d.y == 0.0) {
        throw DegenerateGeometryError("bearing: point coincides with anchor");
    }
    return WrappedAngle(std::atan2(d.y, d.x));
}

/// Gradient of the bearing with respect to p: (1/r^2) (-dy, dx).
/// Its magnitude is 1/r, so bearing sensitivity falls off linearly in range.
inline Vec2 bearing_gradient(Vec2 p, Vec2 anchor) {
    const Vec2 d = p - anchor;
    const double r2 = d.x * d.x + d.y * d.y;
    if (r2 == 0.0) {
        throw DegenerateGeometryError("bearing_gradient: point coincides with anchor");
    }
    return {-d.y / r2, d.x / r2};
}

/// Position Fisher information at p: the variance-weighted sum of bearing
/// gradient outer products over the schedule. Symmetric PSD by construction.
inline Mat2Sym position_fim(Vec2 p, const AnchorSet& anchors, const std::vector<double>& variances) {
    anchors.validate();
    if (variances.size() != anchors.schedule.size()) {
        throw std::invalid_argument("position_fim: variances must align with the schedule");
    }
    Mat2Sym j;
    for (std::size_t k = 0; k < anchors.schedule.size(); ++k) {
        if (!(variances[k] > 0.0)) {
            throw std::invalid_argument("position_fim: variances must be > 0");
        }
        const Vec2 g = bearing_gradient(p, anchors.positions[anchors.schedule[k]]);
        const double w = 1.0 / variances[k];
        j.xx += w * g.x * g.x;
        j.xy += w * g.x * g.y;
        j.yy += w * g.y * g.y;
    }
    return j;
}

/// Position error bound sqrt(tr(J^-1)); singular information yields the
/// infinite-PEB sentinel (a lone bearing cannot localize).
inline double peb(const Mat2Sym& fim) {
    if (fim.is_singular()) return std::numeric_limits<double>::infinity();
    return std::sqrt(fim.trace() / fim.det());
}

/// Output of the bearing-only WLS solver.
struct PositionEstimate {
    Vec2 p_hat;
    Mat2Sym fim;     // evaluated at p_hat with the measurement variances
    double peb = 0.0;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

// Intersection of the two highest-weight bearing rays; falls back to the
// anchor centroid when the rays are near parallel.
inline Vec2 initial_position(const std::vector<BearingMeasurement>& meas, const AnchorSet& anchors) {
    std::size_t i0 = 0, i1 = 1;
    if (meas.size() > 2) {
        std::vector<std::size_t> order(meas.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return meas[a].variance < meas[b].variance;
        });
        i0 = order[0];
        i1 = order[1];
    }
    const Vec2 a0 = anchors.positions[meas[i0].anchor_index];
    const Vec2 a1 = anchors.positions[meas[i1].anchor_index];
    const Vec2 d0{std::cos(meas[i0].phi_hat.value()), std::sin(meas[i0].phi_hat.value())};
    const Vec2 d1{std::cos(meas[i1].phi_hat.value()), std::sin(meas[i1].phi_hat.value())};
    const double cross = d0.x * d1.y - d0.y * d1.x;
    if (std::abs(cross) > 1e-9) {
        const Vec2 rhs = a1 - a0;
        const double t0 = (rhs.x * d1.y - rhs.y * d1.x) / cross;
        return a0 + d0 * t0;
    }
    Vec2 centroid;
    for (const auto& a : anchors.positions) centroid = centroid + a;
    return centroid * (1.0 / static_cast<double>(anchors.positions.size()));
}

} // namespace detail

/// Gauss-Newton solver for the wrapped-residual bearing WLS problem
///   min_p sum_k w_k |wrap(phi_hat_k - bearing_k(p))|^2,  w_k = 1/variance_k.
/// Residuals are re-wrapped every iteration; convergence at step norm
/// < 1e-9 m or 50 iterations. Collinear bearings raise IllConditionedError
/// carrying the singular FIM.
inline PositionEstimate solve_wls(const std::vector<BearingMeasurement>& measurements,
                                  const AnchorSet& anchors,
                                  const Vec2* init = nullptr) {
    anchors.validate();
    if (measurements.size() < 2) {
        throw std::invalid_argument("solve_wls: need at least 2 bearing measurements");
    }
    for (const auto& m : measurements) {
        if (!(m.variance > 0.0)) throw std::invalid_argument("solve_wls: variance must be > 0");
        if (m.anchor_index >= anchors.positions.size()) {
            throw std::invalid_argument("solve_wls: measurement references unknown anchor");
        }
    }

    Vec2 p = init ? *init : detail::initial_position(measurements, anchors);

    // A start point sitting exactly on an anchor has no bearing there; nudge
    // it off by a scene-scale epsilon before iterating.
    double scene_scale = 1.0;
    for (const auto& a : anchors.positions) {
        scene_scale = std::max({scene_scale, std::abs(a.x), std::abs(a.y)});
    }
    for (const auto& m : measurements) {
        if ((p - anchors.positions[m.anchor_index]).norm() < 1e-12 * scene_scale) {
            p.x += 1e-6 * scene_scale;
            p.y += 1e-6 * scene_scale;
            break;
        }
    }

    PositionEstimate out;
    for (int it = 0; it < 50; ++it) {
        Mat2Sym normal;
        Vec2 rhs;
        for (const auto& m : measurements) {
            const Vec2 anchor = anchors.positions[m.anchor_index];
            const Vec2 g = bearing_gradient(p, anchor);
            const double e = angular_difference(m.phi_hat.value(), bearing(p, anchor).value());
            const double w = 1.0 / m.variance;
            normal.xx += w * g.x * g.x;
            normal.xy += w * g.x * g.y;
            normal.yy += w * g.y * g.y;
            rhs.x += w * e * g.x;
            rhs.y += w * e * g.y;
        }
        if (normal.is_singular()) {
            throw IllConditionedError("solve_wls: bearings are collinear", normal);
        }
        const Vec2 step = normal.solve(rhs);
        p = p + step;
        out.iterations = it + 1;
        if (step.norm() < 1e-9) {
            out.converged = true;
            break;
        }
    }

    out.p_hat = p;
    std::vector<double> variances;
    variances.reserve(measurements.size());
    AnchorSet used = anchors;
    used.schedule.clear();
    for (const auto& m : measurements) {
        used.schedule.push_back(m.anchor_index);
        variances.push_back(m.variance);
    }
    out.fim = position_fim(p, used, variances);
    out.peb = peb(out.fim);
    return out;
}

/// Bearing-measurement variance implied by the DoA CRLB: the bridge that
/// couples sensing precision to localization weights.
inline double sigma_phi_from_crlb(const std::vector<Concentration>& kappas,
                                  const ArrayGeometry& geom, double phi_rad) {
    return crlb_doa(kappas, geom, phi_rad).var_phi;
}

} // namespace spmc
