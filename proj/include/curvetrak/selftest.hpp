#pragma once

// Built-in validation suite: derivative oracles, frame identities, the
// separation rate bound, angular-velocity exactness and order checks,
// Lyapunov descent at the annulus boundary, and determinism round trips.
// Every check is deterministic (fixed seeds) and cheap enough to run on
// every checkout.

#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "curvetrak/analysis.hpp"
#include "curvetrak/config.hpp"
#include "curvetrak/contour.hpp"
#include "curvetrak/controller.hpp"
#include "curvetrak/csv.hpp"
#include "curvetrak/field.hpp"
#include "curvetrak/rng.hpp"
#include "curvetrak/sim.hpp"
#include "curvetrak/sweep.hpp"

namespace curvetrak {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // populated on failure
};

namespace detail {

inline double uniform_in(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.uniform01();
}

inline std::string fail_num(const std::string& what, double value) {
    std::ostringstream os;
    os << what << " = " << value;
    return os.str();
}

/// Relative gradient deviation ||fd - analytic|| / max(1, ||analytic||).
inline double grad_oracle_worst(const FieldModel& field, Rng& rng, int points, Box sample_box) {
    double worst = 0.0;
    for (int k = 0; k < points; ++k) {
        const Vec2 p{uniform_in(rng, sample_box.lo.x, sample_box.hi.x),
                     uniform_in(rng, sample_box.lo.y, sample_box.hi.y)};
        const Vec2 g = field_grad(field, p);
        const Vec2 fd = field_grad_fd(field, p, 1e-5);
        worst = std::max(worst, norm(fd - g) / std::max(1.0, norm(g)));
    }
    return worst;
}

inline double hessian_oracle_worst(const FieldModel& field, Rng& rng, int points,
                                   Box sample_box) {
    const double h = 1e-5;
    double worst = 0.0;
    for (int k = 0; k < points; ++k) {
        const Vec2 p{uniform_in(rng, sample_box.lo.x, sample_box.hi.x),
                     uniform_in(rng, sample_box.lo.y, sample_box.hi.y)};
        const SymMat2 hess = field_hessian(field, p);
        const Vec2 dx = (field_grad(field, {p.x + h, p.y}) - field_grad(field, {p.x - h, p.y})) /
                        (2.0 * h);
        const Vec2 dy = (field_grad(field, {p.x, p.y + h}) - field_grad(field, {p.x, p.y - h})) /
                        (2.0 * h);
        const double scale = std::max({1.0, std::abs(hess.xx), std::abs(hess.xy),
                                       std::abs(hess.yy)});
        const double dev = std::max({std::abs(dx.x - hess.xx), std::abs(dx.y - hess.xy),
                                     std::abs(dy.x - hess.xy), std::abs(dy.y - hess.yy)});
        worst = std::max(worst, dev / scale);
    }
    return worst;
}

inline FieldModel cubic_test_field() {
    return make_polynomial({{2, 0, 1.0}, {0, 2, 1.0}, {3, 0, 0.1}},
                           Box{{-10.0, -10.0}, {10.0, 10.0}});
}

inline SimConfig reference_ellipse_config() {
    SimConfig cfg;
    cfg.field = make_ellipse({20.0, 20.0}, 1.0, 8.0);
    cfg.params = {1.0, 0.9, 1.0, 0.01, 2.0, 1.0, 500.0, 0.0};
    cfg.init = PlacedInit{{32.0, 20.0}, std::numbers::pi / 4};
    return cfg;
}

}  // namespace detail

inline std::vector<CheckResult> run_self_checks() {
    std::vector<CheckResult> results;
    const auto check = [&](const std::string& name, const std::function<std::string()>& body) {
        CheckResult r;
        r.name = name;
        try {
            r.detail = body();  // empty string means pass
            r.passed = r.detail.empty();
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    };

    const FieldModel ellipse = make_ellipse({20.0, 20.0}, 1.0, 8.0);
    const FieldModel matyas = make_matyas();
    const Box around_ellipse{{5.0, 5.0}, {35.0, 35.0}};
    const Box around_origin{{-5.0, -5.0}, {5.0, 5.0}};

    check("grad oracle: ellipse", [&] {
        Rng rng(101);
        const double worst = detail::grad_oracle_worst(ellipse, rng, 1000, around_ellipse);
        return worst <= 1e-6 ? "" : detail::fail_num("worst relative deviation", worst);
    });

    check("grad oracle: matyas", [&] {
        Rng rng(102);
        const double worst = detail::grad_oracle_worst(matyas, rng, 1000, around_origin);
        return worst <= 1e-6 ? "" : detail::fail_num("worst relative deviation", worst);
    });

    check("grad oracle: polynomial", [&] {
        Rng rng(103);
        double worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<MonomialTerm> terms;
            for (int i = 0; i <= 4; ++i)
                for (int j = 0; i + j <= 4; ++j)
                    terms.push_back({i, j, detail::uniform_in(rng, -1.0, 1.0)});
            const FieldModel poly = make_polynomial(std::move(terms), around_origin);
            worst = std::max(worst, detail::grad_oracle_worst(poly, rng, 400, around_origin));
        }
        return worst <= 1e-6 ? "" : detail::fail_num("worst relative deviation", worst);
    });

    check("hessian oracle: ellipse", [&] {
        Rng rng(104);
        const double worst = detail::hessian_oracle_worst(ellipse, rng, 300, around_ellipse);
        return worst <= 1e-6 ? "" : detail::fail_num("worst relative deviation", worst);
    });

    check("hessian oracle: matyas", [&] {
        Rng rng(105);
        const double worst = detail::hessian_oracle_worst(matyas, rng, 300, around_origin);
        return worst <= 1e-6 ? "" : detail::fail_num("worst relative deviation", worst);
    });

    check("hessian oracle: polynomial", [&] {
        Rng rng(106);
        const double worst =
            detail::hessian_oracle_worst(detail::cubic_test_field(), rng, 300, around_origin);
        return worst <= 1e-6 ? "" : detail::fail_num("worst relative deviation", worst);
    });

    check("curvature: circle levels", [&] {
        const FieldModel circle =
            make_polynomial({{2, 0, 1.0}, {0, 2, 1.0}}, Box{{-12.0, -12.0}, {12.0, 12.0}});
        Rng rng(107);
        for (const double r : {2.0, 5.0, 9.0}) {
            for (int k = 0; k < 32; ++k) {
                const double theta = detail::uniform_in(rng, 0.0, 2.0 * std::numbers::pi);
                const double kappa =
                    level_curvature(circle, {r * std::cos(theta), r * std::sin(theta)});
                if (std::abs(kappa - 1.0 / r) > 1e-12)
                    return detail::fail_num("curvature deviation at radius " + std::to_string(r),
                                            kappa - 1.0 / r);
            }
        }
        return std::string{};
    });

    check("frame identities", [&] {
        Rng rng(108);
        for (int k = 0; k < 200; ++k) {
            const FieldModel& field = (k % 2 == 0) ? ellipse : matyas;
            const Vec2 center = (k % 2 == 0)
                                    ? Vec2{detail::uniform_in(rng, 25.0, 40.0),
                                           detail::uniform_in(rng, 25.0, 40.0)}
                                    : Vec2{detail::uniform_in(rng, 2.0, 8.0),
                                           detail::uniform_in(rng, -8.0, -2.0)};
            const double gamma0 = detail::uniform_in(rng, 0.05, std::numbers::pi / 2 - 0.05);
            const auto [r1, r2] = place_agents(field, center, 1.0, gamma0);
            const FormationFrame frame = formation_frame(r1, r2);
            const LevelFrame lf = level_frame(field, center);
            const double s = std::sin(gamma0), c = std::cos(gamma0);
            if (std::abs(dot(frame.q, lf.x0) - s) > 1e-12 ||
                std::abs(dot(frame.q, lf.y0) - c) > 1e-12 ||
                std::abs(dot(frame.n, lf.x0) - c) > 1e-12 ||
                std::abs(dot(frame.n, lf.y0) + s) > 1e-12)
                return std::string("frame dot products drift past 1e-12");
            if (std::abs(gamma_angle(frame, lf) - gamma0) > 1e-12)
                return std::string("gamma_angle does not recover the placement angle");
        }
        return std::string{};
    });

    check("separation rate bound", [&] {
        Rng rng(109);
        for (int trial = 0; trial < 5; ++trial) {
            SimConfig cfg = detail::reference_ellipse_config();
            cfg.params.k1 = detail::uniform_in(rng, 0.3, 2.0);
            cfg.params.k2 = detail::uniform_in(rng, 0.1, 1.0);
            cfg.params.d0 = detail::uniform_in(rng, 0.6, 1.5);
            cfg.steps = 2000;
            const double s0 = cfg.params.d0 * detail::uniform_in(rng, 0.5, 2.0);
            const Vec2 base{detail::uniform_in(rng, 26.0, 34.0),
                            detail::uniform_in(rng, 16.0, 24.0)};
            cfg.init = ExplicitInit{base, base + Vec2{s0, 0.0}};
            const auto result = run(cfg, MonitorParams{0.99, 502.0}, MetricsOptions{});
            if (result.summary.aborted)
                return "run aborted: " + result.summary.abort_reason;
            const double dev0 = std::abs(s0 - cfg.params.d0);
            for (const auto& rec : result.trajectory) {
                const double bound = dev0 * std::exp(-2.0 * cfg.params.k1 * rec.t) +
                                     10.0 * cfg.params.k2 * cfg.dt;
                if (std::abs(rec.separation - cfg.params.d0) > bound)
                    return detail::fail_num("bound exceeded at t", rec.t);
            }
        }
        return std::string{};
    });

    check("omega exactness: quadratic", [&] {
        Rng rng(110);
        for (int k = 0; k < 200; ++k) {
            const FieldModel& field = (k % 2 == 0) ? ellipse : matyas;
            const Vec2 center = (k % 2 == 0)
                                    ? Vec2{detail::uniform_in(rng, 25.0, 40.0),
                                           detail::uniform_in(rng, 25.0, 40.0)}
                                    : Vec2{detail::uniform_in(rng, 2.0, 8.0),
                                           detail::uniform_in(rng, -8.0, -2.0)};
            const double gamma0 = detail::uniform_in(rng, 0.05, 1.5);
            const double d = detail::uniform_in(rng, 0.2, 2.0);
            const auto [r1, r2] = place_agents(field, center, d, gamma0);
            ControllerParams p = detail::reference_ellipse_config().params;
            p.a = detail::uniform_in(rng, 0.01, 1.0);
            p.d0 = d;
            const double y1 = field_eval(field, r1);
            const double y2 = field_eval(field, r2);
            const Vec2 rc = (r1 + r2) / 2.0;
            const double yc = measure_center(y1, y2);
            p.z_d = yc;  // gate open by construction
            const FormationFrame frame = formation_frame(r1, r2);
            const double w_meas =
                omega_measured(vel_n(y1, yc, p), vel_n(y2, yc, p), r1, r2);
            const double w_apx = omega_approx(field, rc, frame, p.a);
            if (std::abs(w_meas - w_apx) > 1e-9 * std::max(1.0, std::abs(w_meas)))
                return detail::fail_num("deviation", w_meas - w_apx);
        }
        return std::string{};
    });

    check("omega order: cubic", [&] {
        const FieldModel cubic = detail::cubic_test_field();
        Rng rng(111);
        int accepted = 0;
        for (int attempt = 0; attempt < 1000 && accepted < 100; ++attempt) {
            const Vec2 rc{detail::uniform_in(rng, -8.0, 8.0), detail::uniform_in(rng, -8.0, 8.0)};
            if (norm(field_grad(cubic, rc)) < 0.5) continue;
            const double gamma0 = detail::uniform_in(rng, 0.05, 1.5);
            ControllerParams p = detail::reference_ellipse_config().params;
            p.a = 1.0;
            const auto err_at = [&](double d) {
                const auto [r1, r2] = place_agents(cubic, rc, d, gamma0);
                const double y1 = field_eval(cubic, r1);
                const double y2 = field_eval(cubic, r2);
                const double yc = 0.5 * (y1 + y2);
                ControllerParams q = p;
                q.d0 = d;
                q.z_d = yc;
                const double w_meas =
                    omega_measured(vel_n(y1, yc, q), vel_n(y2, yc, q), r1, r2);
                return std::abs(w_meas - omega_approx(cubic, (r1 + r2) / 2.0,
                                                      formation_frame(r1, r2), q.a));
            };
            const double coarse = err_at(1.0);
            const double fine = err_at(0.5);
            if (fine < 1e-12) continue;  // third derivative vanishes along q
            const double ratio = coarse / fine;
            if (ratio < 3.5 || ratio > 4.5)
                return detail::fail_num("halving ratio", ratio);
            ++accepted;
        }
        return accepted >= 100 ? std::string{}
                               : detail::fail_num("usable states", accepted);
    });

    check("lyapunov descent: annulus boundary", [&] {
        const SimConfig ref = detail::reference_ellipse_config();
        const MonitorParams monitor{0.99, 502.0};
        if (!theorem_condition(ref.params, monitor))
            return std::string("gain condition unexpectedly false for the reference setup");
        Rng rng(112);
        for (int k = 0; k < 60; ++k) {
            const double level =
                ref.params.z_d +
                (k % 2 == 0 ? 1.0 : -1.0) * ref.params.epsilon * detail::uniform_in(rng, 0.95, 1.05);
            const double theta = detail::uniform_in(rng, 0.0, 2.0 * std::numbers::pi);
            const Vec2 rc{20.0 + std::sqrt(level) * std::cos(theta),
                          20.0 + std::sqrt(level / 8.0) * std::sin(theta)};
            const double gamma0 = detail::uniform_in(rng, 0.01, 0.14);
            const auto [r1, r2] = place_agents(ref.field, rc, 0.5, gamma0);
            const double y1 = field_eval(ref.field, r1);
            const double y2 = field_eval(ref.field, r2);
            const double yc = 0.5 * (y1 + y2);
            const auto ab = alpha_beta(y1, y2, yc, ref.params);
            const double rate = lyapunov_rate(ref.field, (r1 + r2) / 2.0, ab.alpha, ab.beta,
                                              formation_frame(r1, r2), ref.params.z_d);
            if (!(rate < 0.0)) return detail::fail_num("dV/dt", rate);
        }
        return std::string{};
    });

    check("rng known answers", [&] {
        Rng ints(42);
        const std::uint64_t expect_u64[4] = {0x15780b2e0c2ec716ULL, 0x6104d9866d113a7eULL,
                                             0xae17533239e499a1ULL, 0xecb8ad4703b360a1ULL};
        for (const std::uint64_t e : expect_u64)
            if (ints.next_u64() != e) return std::string("u64 stream mismatch for seed 42");
        Rng norms(42);
        const double expect_normal[4] = {-0.30326306467873798, 1.3438117634372806,
                                         0.38346179126769431, 0.93696242502589533};
        for (const double e : expect_normal)
            if (norms.normal() != e) return std::string("normal stream mismatch for seed 42");
        if (derive_sweep_seed(1, 0) != 0xe220a8397b1dcdaeULL)
            return std::string("sweep seed derivation mismatch");
        return std::string{};
    });

    check("run determinism", [&] {
        SimConfig cfg = detail::reference_ellipse_config();
        cfg.steps = 400;
        cfg.noise_sigma = 1.0;
        cfg.seed = 7;
        const MonitorParams monitor{0.99, 502.0};
        const MetricsOptions metrics{100, {20.0, 20.0}};
        std::ostringstream a, b;
        write_trajectory_csv(a, run(cfg, monitor, metrics).trajectory);
        write_trajectory_csv(b, run(cfg, monitor, metrics).trajectory);
        return a.str() == b.str() ? std::string{}
                                  : std::string("repeat run produced different bytes");
    });

    check("trajectory csv round trip", [&] {
        SimConfig cfg = detail::reference_ellipse_config();
        cfg.steps = 200;
        const auto result = run(cfg, MonitorParams{0.99, 502.0}, MetricsOptions{100, {20.0, 20.0}});
        std::ostringstream out;
        write_trajectory_csv(out, result.trajectory);
        std::istringstream in(out.str());
        const auto back = read_trajectory_csv(in);
        if (back.size() != result.trajectory.size())
            return std::string("row count changed across the round trip");
        std::ostringstream again;
        write_trajectory_csv(again, back);
        return again.str() == out.str() ? std::string{}
                                        : std::string("values changed across the round trip");
    });

    check("summary json round trip", [&] {
        SimConfig cfg = detail::reference_ellipse_config();
        cfg.steps = 3000;
        const auto result = run(cfg, MonitorParams{0.99, 502.0}, MetricsOptions{100, {20.0, 20.0}});
        const RunSummary& s = result.summary;
        const RunSummary t = summary_from_json(summary_to_json(s));
        const bool same = t.converged == s.converged && t.convergence_step == s.convergence_step &&
                          t.convergence_time == s.convergence_time &&
                          t.mean_abs_error_post == s.mean_abs_error_post &&
                          t.max_abs_error_post == s.max_abs_error_post &&
                          t.loops_completed == s.loops_completed &&
                          t.arc_length_traveled == s.arc_length_traveled &&
                          t.lemma_violations == s.lemma_violations &&
                          t.lemma_not_applicable == s.lemma_not_applicable &&
                          t.theorem_violations == s.theorem_violations &&
                          t.aborted == s.aborted && t.abort_reason == s.abort_reason &&
                          t.rng_id == s.rng_id;
        return same ? std::string{} : std::string("summary changed across the round trip");
    });

    check("sweep determinism", [&] {
        ExperimentConfig cfg;
        cfg.sim = detail::reference_ellipse_config();
        cfg.sim.steps = 300;
        cfg.sim.noise_sigma = 0.5;
        cfg.monitor = {0.99, 502.0};
        cfg.metrics = {100, {20.0, 20.0}};
        cfg.sweep = {{"params.k2", {0.5, 0.9, 0.99}}, {"params.a", {0.01, 0.02}}};
        std::ostringstream serial, threaded;
        write_sweep_csv(serial, run_sweep(cfg, 1));
        write_sweep_csv(threaded, run_sweep(cfg, 2));
        return serial.str() == threaded.str()
                   ? std::string{}
                   : std::string("worker count changed the aggregate bytes");
    });

    check("contour: circle level", [&] {
        const FieldModel circle =
            make_polynomial({{2, 0, 1.0}, {0, 2, 1.0}}, Box{{-10.0, -10.0}, {10.0, 10.0}});
        const auto segments = extract_contour(circle, circle.domain_box, 25.0, 401);
        if (segments.empty()) return std::string("no segments extracted");
        for (const auto& [a, b] : segments) {
            if (std::abs(norm(a) - 5.0) > 1e-2 || std::abs(norm(b) - 5.0) > 1e-2)
                return detail::fail_num("endpoint radius", norm(a));
        }
        return std::string{};
    });

    return results;
}

inline bool all_passed(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

inline void print_check_table(std::ostream& os, const std::vector<CheckResult>& checks) {
    std::size_t width = 0;
    for (const auto& c : checks) width = std::max(width, c.name.size());
    int passed = 0;
    for (const auto& c : checks) {
        os << (c.passed ? "  ok  " : " FAIL ") << c.name;
        if (!c.passed && !c.detail.empty())
            os << std::string(width - c.name.size() + 2, ' ') << c.detail;
        os << '\n';
        if (c.passed) ++passed;
    }
    os << passed << '/' << checks.size() << " checks passed\n";
}

}  // namespace curvetrak
