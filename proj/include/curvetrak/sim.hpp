#pragma once

// Fixed-step simulation of the two-agent dynamics r_i' = v_i with noisy
// field measurements, plus per-step trajectory recording. The controller
// only ever sees the noisy measurements y_i; all recorded diagnostics are
// computed from the noise-free analytic field (observer-side).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "curvetrak/analysis.hpp"
#include "curvetrak/controller.hpp"
#include "curvetrak/errors.hpp"
#include "curvetrak/field.hpp"
#include "curvetrak/record.hpp"
#include "curvetrak/rng.hpp"

namespace curvetrak {

struct ExplicitInit {
    Vec2 r1;
    Vec2 r2;
};

/// Agents straddling `center` with the body frame rotated by gamma0 from
/// the local level-curve frame, gamma0 in (0, pi/2).
struct PlacedInit {
    Vec2 center;
    double gamma0 = std::numbers::pi / 4;
};

using InitSpec = std::variant<ExplicitInit, PlacedInit>;

enum class Integrator { Euler, Midpoint };

/// Positions diverging past this magnitude abort the run.
inline constexpr double kDivergenceLimit = 1e9;

struct SimConfig {
    FieldModel field;
    ControllerParams params;
    double dt = 0.01;
    std::int64_t steps = 30000;
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;
    InitSpec init = PlacedInit{};
    Integrator integrator = Integrator::Euler;
};

inline void validate(const SimConfig& cfg) {
    validate(cfg.params);
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (cfg.steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (!(cfg.noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
    if (const auto* placed = std::get_if<PlacedInit>(&cfg.init)) {
        if (!(placed->gamma0 > 0.0 && placed->gamma0 < std::numbers::pi / 2))
            throw std::invalid_argument("init.gamma0 must lie strictly in (0, pi/2)");
        if (!finite(placed->center))
            throw std::invalid_argument("init.center must be finite");
    } else {
        const auto& ex = std::get<ExplicitInit>(cfg.init);
        if (!finite(ex.r1) || !finite(ex.r2))
            throw std::invalid_argument("init.r1/init.r2 must be finite");
    }
}

struct SimState {
    double t = 0.0;
    Vec2 r1;
    Vec2 r2;
    double y1 = 0.0;  // measurements taken during the last step
    double y2 = 0.0;
    Vec2 v1;          // velocities applied during the last step
    Vec2 v2;
};

/// One noisy field measurement, y = z(p) + noise_sigma * g with g standard
/// normal. noise_sigma = 0 returns the exact value and draws nothing.
inline double measure(const FieldModel& field, Vec2 p, double noise_sigma, Rng& rng) {
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("measure: noise_sigma must be >= 0");
    const double z = field_eval(field, p);
    return noise_sigma > 0.0 ? z + noise_sigma * rng.normal() : z;
}

/// Initial placement straddling `center`: q = sin(gamma0) x0 + cos(gamma0) y0
/// in the local level-curve frame, agents at center -/+ (d0/2) q. The
/// resulting frame reproduces gamma_angle = gamma0, and agent 1 sits on the
/// higher-field side for small d0.
inline std::pair<Vec2, Vec2> place_agents(const FieldModel& field, Vec2 center, double d0,
                                          double gamma0) {
    if (!(gamma0 > 0.0 && gamma0 < std::numbers::pi / 2))
        throw std::invalid_argument("place_agents: gamma0 must lie strictly in (0, pi/2)");
    const Vec2 g = field_grad(field, center);
    const double gn = norm(g);
    if (gn <= kGradFloor)
        throw CriticalPointError("place_agents: center is a critical point of the field");
    const Vec2 y0 = -g / gn;
    const Vec2 x0 = rot90ccw(y0);
    const Vec2 q = std::sin(gamma0) * x0 + std::cos(gamma0) * y0;
    return {center - (d0 / 2.0) * q, center + (d0 / 2.0) * q};
}

/// One integration step: measure both agents, evaluate the control law on
/// the shared snapshot, advance the positions. The returned state carries
/// the measurements taken and the velocities applied.
inline SimState step(const SimState& state, const SimConfig& cfg, Rng& rng) {
    const double y1 = measure(cfg.field, state.r1, cfg.noise_sigma, rng);
    const double y2 = measure(cfg.field, state.r2, cfg.noise_sigma, rng);
    auto [v1, v2] = agent_velocities(state.r1, state.r2, y1, y2, cfg.params);

    if (cfg.integrator == Integrator::Midpoint) {
        // Re-evaluate at the half step; the applied velocity is the stage-2 one.
        const Vec2 h1 = state.r1 + v1 * (cfg.dt / 2.0);
        const Vec2 h2 = state.r2 + v2 * (cfg.dt / 2.0);
        const double m1 = measure(cfg.field, h1, cfg.noise_sigma, rng);
        const double m2 = measure(cfg.field, h2, cfg.noise_sigma, rng);
        auto [w1, w2] = agent_velocities(h1, h2, m1, m2, cfg.params);
        v1 = w1;
        v2 = w2;
    }

    SimState next;
    next.t = state.t + cfg.dt;
    next.r1 = state.r1 + v1 * cfg.dt;
    next.r2 = state.r2 + v2 * cfg.dt;
    next.y1 = y1;
    next.y2 = y2;
    next.v1 = v1;
    next.v2 = v2;
    return next;
}

struct RunResult {
    std::vector<TrajectoryRecord> trajectory;
    RunSummary summary;
};

namespace detail {

inline bool diverged(Vec2 p) {
    return !finite(p) || std::abs(p.x) > kDivergenceLimit || std::abs(p.y) > kDivergenceLimit;
}

}  // namespace detail

/// Execute a full run: `steps` records, one per step, then the summary.
/// Degenerate frames, critical points at the formation center, and state
/// divergence stop the run early; the summary reports the failing step.
inline RunResult run(const SimConfig& cfg, const MonitorParams& monitor,
                     const MetricsOptions& metrics) {
    validate(cfg);
    validate(monitor);

    RunResult out;
    out.summary.rng_id = kRngId;
    out.trajectory.reserve(static_cast<std::size_t>(cfg.steps));

    const auto abort_run = [&](std::int64_t step_index, const std::string& why) {
        out.summary.aborted = true;
        out.summary.abort_reason = why + " at step " + std::to_string(step_index);
    };

    SimState state;
    try {
        if (const auto* placed = std::get_if<PlacedInit>(&cfg.init)) {
            auto [r1, r2] = place_agents(cfg.field, placed->center, cfg.params.d0, placed->gamma0);
            state.r1 = r1;
            state.r2 = r2;
        } else {
            const auto& ex = std::get<ExplicitInit>(cfg.init);
            state.r1 = ex.r1;
            state.r2 = ex.r2;
        }
    } catch (const CriticalPointError&) {
        abort_run(0, "critical point at initial placement center");
        return out;
    }

    Rng rng(cfg.seed);
    const bool theorem_ok = theorem_condition(cfg.params, monitor);

    for (std::int64_t k = 0; k < cfg.steps; ++k) {
        SimState next;
        try {
            next = step(state, cfg, rng);
        } catch (const DegenerateFrameError&) {
            abort_run(k, "degenerate frame (agents coincide)");
            break;
        }

        TrajectoryRecord rec;
        rec.step = k;
        rec.t = state.t;
        rec.r1 = state.r1;
        rec.r2 = state.r2;
        rec.rc = (state.r1 + state.r2) / 2.0;
        rec.y1 = next.y1;
        rec.y2 = next.y2;
        rec.yc = measure_center(next.y1, next.y2);
        rec.separation = norm(state.r2 - state.r1);
        rec.gate_open = std::abs(rec.yc - cfg.params.z_d) < cfg.params.epsilon;
        rec.theorem_ok = theorem_ok;

        try {
            rec.zc_true = field_eval(cfg.field, rec.rc);
            const FormationFrame frame = formation_frame(state.r1, state.r2);
            const LevelFrame lf = level_frame(cfg.field, rec.rc);
            const double grad_norm = norm(field_grad(cfg.field, rec.rc));
            rec.gamma = gamma_angle(frame, lf);
            const AlphaBeta ab = alpha_beta(next.y1, next.y2, rec.yc, cfg.params);
            rec.alpha = ab.alpha;
            rec.beta = ab.beta;
            rec.omega_measured =
                omega_measured(dot(next.v1, frame.n), dot(next.v2, frame.n), state.r1, state.r2);
            rec.omega_approx = -cfg.params.a * grad_norm * std::cos(rec.gamma);
            rec.sigma_speed = norm((next.v1 + next.v2) / 2.0);
            rec.V = lyapunov(rec.zc_true, cfg.params.z_d);
            rec.lemma = lemma_condition(rec.sigma_speed, grad_norm, lf.kappa, cfg.params.a, monitor);
        } catch (const CriticalPointError&) {
            abort_run(k, "critical point at formation center");
            break;
        }
        out.trajectory.push_back(rec);

        if (detail::diverged(next.r1) || detail::diverged(next.r2)) {
            abort_run(k, "state divergence (coordinate beyond 1e9 or non-finite)");
            break;
        }
        state = next;
    }

    if (!out.trajectory.empty())
        out.summary = [&] {
            RunSummary s = convergence_metrics(out.trajectory, cfg.params, metrics);
            s.aborted = out.summary.aborted;
            s.abort_reason = out.summary.abort_reason;
            s.rng_id = out.summary.rng_id;
            return s;
        }();
    return out;
}

}  // namespace curvetrak
