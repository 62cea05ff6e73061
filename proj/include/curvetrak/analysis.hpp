#pragma once

// Numerical diagnostics along trajectories: the level-curve frame, the
// frame angle gamma, angular velocity (measured and approximated), the
// alpha/beta/sigma decomposition of the center velocity, the Lyapunov
// function and its rate, the lemma/theorem condition monitors, and the
// per-run convergence metrics.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvetrak/controller.hpp"
#include "curvetrak/errors.hpp"
#include "curvetrak/field.hpp"
#include "curvetrak/record.hpp"

namespace curvetrak {

/// Frenet frame of the level curve through a point: y0 the unit normal
/// (anti-parallel to the gradient), x0 = y0 rotated +90 degrees CCW the
/// unit tangent.
struct LevelFrame {
    Vec2 y0;
    Vec2 x0;
    double kappa = 0.0;
};

struct MonitorParams {
    double b = 0.99;      // in (0, 1)
    double z_max = 502.0; // field bound fed to the theorem condition
};

inline void validate(const MonitorParams& m) {
    if (!(m.b > 0.0 && m.b < 1.0)) throw std::invalid_argument("monitor.b must be in (0,1)");
    if (!std::isfinite(m.z_max)) throw std::invalid_argument("monitor.z_max must be finite");
}

struct RunSummary {
    bool converged = false;
    std::optional<std::int64_t> convergence_step;
    std::optional<double> convergence_time;
    std::optional<double> mean_abs_error_post;  // mean |y_c - z_d| after convergence
    std::optional<double> max_abs_error_post;
    double loops_completed = 0.0;       // signed cumulative winding of rc / 2pi
    double arc_length_traveled = 0.0;   // integrated sigma * dt
    std::int64_t lemma_violations = 0;
    std::int64_t lemma_not_applicable = 0;
    std::int64_t theorem_violations = 0;
    bool aborted = false;
    std::string abort_reason;
    std::string rng_id;
};

inline LevelFrame level_frame(const FieldModel& field, Vec2 p) {
    const Vec2 g = field_grad(field, p);
    const double gn = norm(g);
    if (gn <= kGradFloor)
        throw CriticalPointError("level_frame: gradient norm below grad_floor");
    const Vec2 y0 = -g / gn;
    return {y0, rot90ccw(y0), level_curvature(field, p)};
}

/// Rotation angle from the level-curve frame to the body frame, in
/// (-pi, pi]. Satisfies n.x0 = cos(gamma), n.y0 = -sin(gamma),
/// q.x0 = sin(gamma), q.y0 = cos(gamma).
inline double gamma_angle(const FormationFrame& frame, const LevelFrame& lframe) {
    double g = std::atan2(dot(frame.q, lframe.x0), dot(frame.n, lframe.x0));
    if (g == -std::numbers::pi) g = std::numbers::pi;
    return g;
}

struct AlphaBeta {
    double alpha = 0.0;  // k2 * sgn((y1 - y2)(y_c - z_d))
    double beta = 0.0;   // C + a * y_c
};

inline AlphaBeta alpha_beta(double y1, double y2, double yc, const ControllerParams& p) {
    return {p.k2 * sgn((y1 - y2) * (yc - p.z_d), p.sgn_deadband), p.C + p.a * yc};
}

inline double center_speed(double alpha, double beta) { return std::hypot(alpha, beta); }

/// omega = (v_{2,n} - v_{1,n}) / ||r2 - r1||.
inline double omega_measured(double v1n, double v2n, Vec2 r1, Vec2 r2) {
    const double sep = norm(r2 - r1);
    if (!(sep > 0.0)) throw DegenerateFrameError("omega_measured: agents coincide");
    return (v2n - v1n) / sep;
}

/// First-order approximation omega ~ -a ||grad z(rc)|| cos(gamma); exact
/// on quadratic fields with symmetric agent placement.
inline double omega_approx(const FieldModel& field, Vec2 rc, const FormationFrame& frame,
                           double a) {
    const LevelFrame lf = level_frame(field, rc);
    const double gn = norm(field_grad(field, rc));
    return -a * gn * std::cos(gamma_angle(frame, lf));
}

inline double lyapunov(double zc, double z_d) {
    const double e = zc - z_d;
    return 0.5 * e * e;
}

/// dV/dt = -(z_c - z_d) ||grad z_c|| (alpha cos(gamma) - beta sin(gamma)),
/// with z_c the noise-free field value at rc.
inline double lyapunov_rate(const FieldModel& field, Vec2 rc, double alpha, double beta,
                            const FormationFrame& frame, double z_d) {
    const LevelFrame lf = level_frame(field, rc);
    const double g = gamma_angle(frame, lf);
    const double gn = norm(field_grad(field, rc));
    const double zc = field_eval(field, rc);
    return -(zc - z_d) * gn * (alpha * std::cos(g) - beta * std::sin(g));
}

/// Speed condition of the gamma lemma: sigma > a ||grad|| b / kappa.
/// Presumes kappa > 0; otherwise the condition is not applicable.
inline LemmaStatus lemma_condition(double sigma, double grad_norm, double kappa, double a,
                                   const MonitorParams& m) {
    if (!(kappa > 0.0)) return LemmaStatus::NotApplicable;
    return sigma > a * grad_norm * m.b / kappa ? LemmaStatus::Satisfied : LemmaStatus::Violated;
}

/// Gain condition for annulus-boundary descent: C + a z_max < k2 b / sqrt(1 - b^2).
inline bool theorem_condition(const ControllerParams& p, const MonitorParams& m) {
    if (!(m.b > 0.0 && m.b < 1.0))
        throw std::invalid_argument("theorem_condition: b must be in (0,1)");
    return p.C + p.a * m.z_max < p.k2 * m.b / std::sqrt(1.0 - m.b * m.b);
}

struct GammaEquilibrium {
    enum class Status { Ok, NoEquilibrium, NotApplicable };
    Status status = Status::Ok;
    double angle = 0.0;  // valid only when status == Ok
};

/// Instantaneous rest point of the gamma dynamics: arccos(kappa sigma / (a ||grad||)).
/// Ratio above 1 means gamma is decreasing everywhere (no equilibrium);
/// a negative ratio (kappa < 0) is outside the analyzed setting.
inline GammaEquilibrium gamma_equilibrium(double kappa, double sigma, double grad_norm,
                                          double a) {
    const double ratio = kappa * sigma / (a * grad_norm);
    if (ratio < 0.0) return {GammaEquilibrium::Status::NotApplicable, 0.0};
    if (ratio > 1.0) return {GammaEquilibrium::Status::NoEquilibrium, 0.0};
    return {GammaEquilibrium::Status::Ok, std::acos(ratio)};
}

/// Membership in the closed band of field values within epsilon of z_d.
inline bool annulus_contains(double zc, double z_d, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("annulus_contains: epsilon must be > 0");
    return std::abs(zc - z_d) <= epsilon;
}

struct MetricsOptions {
    int window = 100;            // confirmation window W
    Vec2 winding_ref{0.0, 0.0};  // reference point for the winding count
};

namespace detail {

inline double wrap_angle(double a) {
    while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
    while (a < -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

}  // namespace detail

/// Convergence step, post-convergence error statistics, winding count and
/// arc length for a finished trajectory. Convergence is the first step k
/// with |y_c - z_d| < epsilon whose next W records all stay inside 2*epsilon.
inline RunSummary convergence_metrics(std::span<const TrajectoryRecord> trajectory,
                                      const ControllerParams& params,
                                      const MetricsOptions& opts) {
    if (trajectory.empty())
        throw std::invalid_argument("convergence_metrics: empty trajectory");
    RunSummary s;

    const auto n = static_cast<std::int64_t>(trajectory.size());
    const std::int64_t w = opts.window;
    for (std::int64_t k = 0; k < n; ++k) {
        if (!(std::abs(trajectory[k].yc - params.z_d) < params.epsilon)) continue;
        if (k + w >= n) break;  // not enough records left to confirm
        bool confirmed = true;
        for (std::int64_t j = k + 1; j <= k + w; ++j) {
            if (!(std::abs(trajectory[j].yc - params.z_d) < 2.0 * params.epsilon)) {
                confirmed = false;
                break;
            }
        }
        if (confirmed) {
            s.converged = true;
            s.convergence_step = trajectory[k].step;
            s.convergence_time = trajectory[k].t;
            double sum = 0.0, maxe = 0.0;
            std::int64_t count = 0;
            for (std::int64_t j = k + 1; j < n; ++j) {
                const double e = std::abs(trajectory[j].yc - params.z_d);
                sum += e;
                maxe = std::max(maxe, e);
                ++count;
            }
            if (count > 0) {
                s.mean_abs_error_post = sum / static_cast<double>(count);
                s.max_abs_error_post = maxe;
            }
            break;
        }
    }

    double winding = 0.0;
    double arc = 0.0;
    for (std::int64_t k = 0; k + 1 < n; ++k) {
        const Vec2 d0 = trajectory[k].rc - opts.winding_ref;
        const Vec2 d1 = trajectory[k + 1].rc - opts.winding_ref;
        winding += detail::wrap_angle(std::atan2(d1.y, d1.x) - std::atan2(d0.y, d0.x));
        arc += trajectory[k].sigma_speed * (trajectory[k + 1].t - trajectory[k].t);
    }
    s.loops_completed = winding / (2.0 * std::numbers::pi);
    s.arc_length_traveled = arc;

    for (const auto& rec : trajectory) {
        if (rec.lemma == LemmaStatus::Violated) ++s.lemma_violations;
        if (rec.lemma == LemmaStatus::NotApplicable) ++s.lemma_not_applicable;
        if (!rec.theorem_ok) ++s.theorem_violations;
    }
    return s;
}

}  // namespace curvetrak
