// Acceptance harness: ten end-to-end checks, one PASS/FAIL line each.
// Usage: acceptance <curvetrak-binary> <configs-dir>
// Exit code is the number of failing checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "curvetrak/analysis.hpp"
#include "curvetrak/config.hpp"
#include "curvetrak/csv.hpp"
#include "curvetrak/rng.hpp"
#include "curvetrak/sim.hpp"

using namespace curvetrak;
namespace fs = std::filesystem;

namespace {

std::string g_tool;
std::string g_configs;

std::string num(const char* label, double v) {
    std::ostringstream os;
    os << label << " = " << v;
    return os.str();
}

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

// Width of the tracking band reachable under forward Euler: the 2*epsilon
// monitor band plus the overshoot of a single step taken while the gate is
// open, sigma_max * ||grad z||_max * dt. The continuum flow of the reference
// ellipse holds |z_c - z_d| < 2*epsilon (checked at dt = 1e-4, where the
// post-entry maximum is 2.7 after transients); at dt = 0.01 each gate-open
// step can carry the center one overshoot width past the gate before the
// next measurement. ||grad z||_max sits at the steep-axis vertex.
double euler_band(const SimConfig& cfg) {
    const ControllerParams& p = cfg.params;
    const double beta_max = p.C + p.a * (p.z_d + 2.0 * p.epsilon);
    const double sigma_max = std::hypot(p.k2, beta_max);
    const double grad_max = 2.0 * std::sqrt(8.0 * (p.z_d + 3.0 * p.epsilon));
    return 2.0 * p.epsilon + cfg.dt * sigma_max * grad_max;
}

// ---- shared reference runs (computed once, reused by several checks) ----

ExperimentConfig load_config(const std::string& name) {
    return parse_config((fs::path(g_configs) / name).string());
}

const ExperimentConfig& ellipse_config() {
    static const ExperimentConfig cfg = load_config("ellipse.json");
    return cfg;
}

struct TimedRun {
    RunResult result;
    double seconds = 0.0;
};

const TimedRun& ellipse_run() {
    static const TimedRun tr = [] {
        const ExperimentConfig& cfg = ellipse_config();
        TimedRun out;
        const auto t0 = std::chrono::steady_clock::now();
        out.result = run(cfg.sim, cfg.monitor, cfg.metrics);
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }();
    return tr;
}

// ---- criterion bodies: empty string = pass ----

std::string ellipse_reproduction() {
    const ExperimentConfig& cfg = ellipse_config();
    if (cfg.sim.params.k1 != 1.0 || cfg.sim.params.k2 != 0.9 || cfg.sim.params.C != 1.0 ||
        cfg.sim.params.a != 0.01 || cfg.sim.params.epsilon != 2.0 || cfg.sim.params.d0 != 1.0 ||
        cfg.sim.params.z_d != 500.0)
        return "shipped config deviates from the reference gains";
    if (cfg.sim.dt != 0.01 || cfg.sim.steps != 30000 || cfg.sim.noise_sigma != 0.0)
        return "shipped config deviates from the reference integration settings";
    if (field_eval(cfg.sim.field, {21.0, 20.0}) != 1.0 ||
        field_eval(cfg.sim.field, {20.0, 21.0}) != 8.0)
        return "shipped config field is not the reference ellipse";

    const TimedRun& tr = ellipse_run();
    const auto& traj = tr.result.trajectory;
    if (tr.result.summary.aborted) return "run aborted: " + tr.result.summary.abort_reason;
    if (traj.size() != 30000) return num("records", static_cast<double>(traj.size()));

    std::int64_t entry = -1;
    for (const auto& rec : traj) {
        if (std::abs(rec.zc_true - 500.0) < 2.0) {
            entry = rec.step;
            break;
        }
    }
    if (entry < 0 || entry >= 5000) return num("band entry step", static_cast<double>(entry));
    if (static_cast<std::int64_t>(traj.size()) - entry < 25000)
        return num("steps after entry", static_cast<double>(traj.size()) - entry);

    const double band = euler_band(cfg.sim);
    double worst = 0.0;
    for (std::size_t k = static_cast<std::size_t>(entry); k < traj.size(); ++k)
        worst = std::max(worst, std::abs(traj[k].zc_true - 500.0));
    if (!(worst < band))
        return num("max |z_c - 500| after entry", worst) + num(", band", band);

    if (!(std::abs(tr.result.summary.loops_completed) >= 1.0))
        return num("loops about (20,20)", tr.result.summary.loops_completed);
    if (!(tr.seconds < 1.0)) return num("runtime seconds", tr.seconds);
    return {};
}

std::string matyas_reproduction() {
    const ExperimentConfig cfg = load_config("matyas.json");
    if (cfg.sim.params.k1 != 1.0 || cfg.sim.params.k2 != 0.99 || cfg.sim.params.C != 1.0 ||
        cfg.sim.params.a != 1.0 || cfg.sim.params.epsilon != 0.01 || cfg.sim.params.z_d != 2.0)
        return "shipped config deviates from the reference gains";

    const RunResult res = run(cfg.sim, cfg.monitor, cfg.metrics);
    if (res.summary.aborted) return "run aborted: " + res.summary.abort_reason;
    if (!res.summary.converged) return "run did not converge";

    const std::int64_t conv = *res.summary.convergence_step;
    double worst = 0.0;
    for (const auto& rec : res.trajectory)
        if (rec.step >= conv) worst = std::max(worst, std::abs(rec.zc_true - 2.0));
    if (!(worst < 0.05)) return num("max |z_c - 2| post convergence", worst);

    if (!(std::abs(res.summary.loops_completed) >= 1.0))
        return num("loops about (0,0)", res.summary.loops_completed);
    return {};
}

std::string separation_law() {
    Rng rng(404);
    for (int trial = 0; trial < 20; ++trial) {
        SimConfig cfg;
        cfg.field = make_ellipse({20.0, 20.0}, 1.0, 8.0);
        cfg.params.k1 = uniform_in(rng, 0.6, 2.0);
        cfg.params.k2 = uniform_in(rng, 0.3, 1.0);
        cfg.params.C = uniform_in(rng, 0.5, 1.5);
        cfg.params.a = uniform_in(rng, 0.005, 0.015);
        cfg.params.epsilon = uniform_in(rng, 1.0, 3.0);
        cfg.params.d0 = uniform_in(rng, 0.8, 1.2);
        cfg.params.z_d = uniform_in(rng, 250.0, 500.0);
        cfg.dt = 0.01;
        cfg.steps = 2000;

        const double angle = uniform_in(rng, 0.0, 2.0 * std::numbers::pi);
        const double radius = uniform_in(rng, 8.0, 12.0);
        const Vec2 center{20.0 + radius * std::cos(angle), 20.0 + radius * std::sin(angle)};
        const double s0 = cfg.params.d0 * uniform_in(rng, 0.5, 2.0);
        const double pair_angle = uniform_in(rng, 0.0, 2.0 * std::numbers::pi);
        const Vec2 half = 0.5 * s0 * Vec2{std::cos(pair_angle), std::sin(pair_angle)};
        cfg.init = ExplicitInit{center - half, center + half};

        const RunResult res = run(cfg, MonitorParams{0.99, cfg.params.z_d + cfg.params.epsilon},
                                  MetricsOptions{100, {20.0, 20.0}});
        if (res.trajectory.empty()) return "trial " + std::to_string(trial) + ": empty trajectory";

        const double dev0 = std::abs(res.trajectory.front().separation - cfg.params.d0);
        for (const auto& rec : res.trajectory) {
            const double bound = dev0 * std::exp(-2.0 * cfg.params.k1 * rec.t) +
                                 10.0 * cfg.params.k2 * cfg.dt;
            if (!(std::abs(rec.separation - cfg.params.d0) <= bound))
                return "trial " + std::to_string(trial) + ": " +
                       num("|s - d0| - bound",
                           std::abs(rec.separation - cfg.params.d0) - bound) +
                       num(" at t", rec.t);
        }
    }
    return {};
}

std::string omega_exactness() {
    const ExperimentConfig& cfg = ellipse_config();
    const TimedRun& tr = ellipse_run();
    double worst = 0.0;
    for (const auto& rec : tr.result.trajectory) {
        double expected = 0.0;
        if (rec.gate_open) {
            const LevelFrame lf = level_frame(cfg.sim.field, rec.rc);
            const FormationFrame frame = formation_frame(rec.r1, rec.r2);
            expected = -cfg.sim.params.a * norm(field_grad(cfg.sim.field, rec.rc)) *
                       dot(lf.y0, frame.q);
        }
        const double err = std::abs(rec.omega_measured - expected);
        const double tol = 1e-9 * std::max(1.0, std::abs(expected));
        worst = std::max(worst, err / tol);
    }
    if (!(worst <= 1.0)) return num("worst err / tol", worst);
    return {};
}

std::string omega_order() {
    const FieldModel cubic = make_polynomial({{2, 0, 1.0}, {0, 2, 1.0}, {3, 0, 0.1}},
                                             Box{{-10.0, -10.0}, {10.0, 10.0}});
    ControllerParams p;
    p.C = 1.0;
    p.a = 1.0;
    p.epsilon = 1.0;

    Rng rng(505);
    int accepted = 0;
    double ratio_sum = 0.0;
    for (int attempt = 0; attempt < 2000 && accepted < 100; ++attempt) {
        const double angle = uniform_in(rng, 0.0, 2.0 * std::numbers::pi);
        const double radius = uniform_in(rng, 2.0, 6.0);
        const Vec2 rc{radius * std::cos(angle), radius * std::sin(angle)};
        const double gamma0 = uniform_in(rng, 0.1, 1.4);

        const auto err_at = [&](double d) -> double {
            const auto [r1, r2] = place_agents(cubic, rc, d, gamma0);
            const double y1 = field_eval(cubic, r1);
            const double y2 = field_eval(cubic, r2);
            const double yc = measure_center(y1, y2);
            ControllerParams q = p;
            q.d0 = d;
            q.z_d = yc;  // gate open at this state
            const double w = omega_measured(vel_n(y1, yc, q), vel_n(y2, yc, q), r1, r2);
            return std::abs(w - omega_approx(cubic, (r1 + r2) / 2.0, formation_frame(r1, r2), q.a));
        };

        const double coarse = err_at(1.0);
        const double fine = err_at(0.5);
        if (fine < 1e-12) continue;  // cubic term vanishes along this q
        ratio_sum += coarse / fine;
        ++accepted;
    }
    if (accepted < 100) return num("usable sampled states", accepted);
    const double mean = ratio_sum / accepted;
    if (!(mean >= 3.5 && mean <= 4.5)) return num("mean error ratio", mean);
    return {};
}

std::string lyapunov_descent() {
    // Dedicated fine-step probe with the reference field and gains. The
    // center starts on the major axis just outside the open gate with a
    // nearly aligned frame; the signum pull then walks it through the
    // [0.95, 1.05]*epsilon boundary shell while cos(gamma) stays above b
    // (the axis is a symmetry line, so radial motion does not tilt the
    // frame), populating exactly the states the descent claim is about.
    SimConfig cfg = ellipse_config().sim;
    const double e0 = 1.025 * cfg.params.epsilon;
    cfg.init = PlacedInit{{20.0 + std::sqrt(cfg.params.z_d - e0), 20.0}, 0.01};
    cfg.dt = 1e-6;
    cfg.steps = 20000;
    const MonitorParams monitor{0.99, 502.0};
    if (!theorem_condition(cfg.params, monitor)) return "gain condition unexpectedly false";

    const RunResult res = run(cfg, monitor, MetricsOptions{100, {20.0, 20.0}});
    if (res.summary.aborted) return "probe run aborted: " + res.summary.abort_reason;

    int qualifying = 0;
    for (const auto& rec : res.trajectory) {
        const double band = std::abs(rec.zc_true - cfg.params.z_d) / cfg.params.epsilon;
        if (!(band >= 0.95 && band <= 1.05)) continue;
        if (!(std::cos(rec.gamma) > monitor.b)) continue;
        if (!rec.theorem_ok) continue;
        ++qualifying;
        const double rate = lyapunov_rate(cfg.field, rec.rc, rec.alpha, rec.beta,
                                          formation_frame(rec.r1, rec.r2), cfg.params.z_d);
        if (!(rate < 0.0))
            return num("dV/dt at a qualifying state", rate) + num(", step", rec.step);
    }
    if (qualifying < 100) return num("qualifying states", qualifying);
    return {};
}

std::string gamma_residual() {
    const ExperimentConfig& cfg = ellipse_config();
    const TimedRun& tr = ellipse_run();
    const auto& traj = tr.result.trajectory;
    if (!tr.result.summary.converged) return "reference run did not converge";
    const auto conv = static_cast<std::size_t>(*tr.result.summary.convergence_step);

    // Kinematic decomposition of the gamma dynamics: the recorded per-step
    // change of gamma must equal the measured formation rotation omega minus
    // the rotation of the level frame along the travelled path. The frame
    // rotation is recomputed from the analytic gradient, so this couples the
    // recorded gamma, omega and positions to the field geometry.
    std::size_t checked = 0, within = 0;
    for (std::size_t k = conv; k + 1 < traj.size(); ++k) {
        if (!(std::abs(std::sin(traj[k].gamma)) > 0.05)) continue;
        const double dt = traj[k + 1].t - traj[k].t;
        const double fd =
            std::remainder(traj[k + 1].gamma - traj[k].gamma, 2.0 * std::numbers::pi) / dt;
        const Vec2 x0a = level_frame(cfg.sim.field, traj[k].rc).x0;
        const Vec2 x0b = level_frame(cfg.sim.field, traj[k + 1].rc).x0;
        const double frame_rate = std::atan2(cross(x0a, x0b), dot(x0a, x0b)) / dt;
        const double pred = traj[k].omega_measured - frame_rate;
        ++checked;
        if (std::abs(fd - pred) <= 0.05 * std::max(std::abs(pred), 0.01)) ++within;
    }
    if (checked == 0) return "no post-convergence steps with |sin(gamma)| > 0.05";
    const double frac = static_cast<double>(within) / static_cast<double>(checked);
    if (!(frac >= 0.95)) return num("matching fraction", frac) + num(", checked", double(checked));

    // gamma statistics over the final full loop of the center
    double winding = 0.0;
    std::size_t start = traj.size() - 1;
    for (std::size_t k = traj.size() - 1; k > conv; --k) {
        const Vec2 d1 = traj[k].rc - cfg.metrics.winding_ref;
        const Vec2 d0 = traj[k - 1].rc - cfg.metrics.winding_ref;
        winding += std::remainder(std::atan2(d1.y, d1.x) - std::atan2(d0.y, d0.x),
                                  2.0 * std::numbers::pi);
        if (std::abs(winding) >= 2.0 * std::numbers::pi) {
            start = k - 1;
            break;
        }
    }
    if (std::abs(winding) < 2.0 * std::numbers::pi) return "no full final loop found";

    double mean = 0.0;
    std::size_t n = 0;
    for (std::size_t k = start; k < traj.size(); ++k, ++n) mean += traj[k].gamma;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t k = start; k < traj.size(); ++k)
        var += (traj[k].gamma - mean) * (traj[k].gamma - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    if (!(sd > 0.01)) return num("std(gamma) over final loop", sd);
    return {};
}

std::string gradient_oracles() {
    Rng rng(606);
    const auto worst_dev = [&](const FieldModel& field) {
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const Vec2 p{uniform_in(rng, field.domain_box.lo.x, field.domain_box.hi.x),
                         uniform_in(rng, field.domain_box.lo.y, field.domain_box.hi.y)};
            const Vec2 g = field_grad(field, p);
            const Vec2 fd = field_grad_fd(field, p, 1e-5);
            worst = std::max(worst, norm(fd - g) / std::max(1.0, norm(g)));
        }
        return worst;
    };

    double worst = worst_dev(make_ellipse({20.0, 20.0}, 1.0, 8.0));
    worst = std::max(worst, worst_dev(make_matyas()));
    for (int poly = 0; poly < 3; ++poly) {
        std::vector<MonomialTerm> terms;
        const int n_terms = 3 + static_cast<int>(rng.next_u64() % 4);
        for (int t = 0; t < n_terms; ++t) {
            const int i = static_cast<int>(rng.next_u64() % 5);
            const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(5 - i));
            terms.push_back({i, j, uniform_in(rng, -2.0, 2.0)});
        }
        worst = std::max(worst, worst_dev(make_polynomial(std::move(terms),
                                                          Box{{-3.0, -3.0}, {3.0, 3.0}})));
    }
    if (!(worst < 1e-6)) return num("worst relative deviation", worst);
    return {};
}

std::string noise_robustness() {
    const ExperimentConfig cfg = load_config("ellipse_noise.json");
    if (cfg.sim.noise_sigma != 1.0) return "shipped config must set noise_sigma = 1.0";

    const RunResult res = run(cfg.sim, cfg.monitor, cfg.metrics);
    if (res.summary.aborted) return "run aborted: " + res.summary.abort_reason;
    if (!res.summary.converged) return "run did not converge";

    const double band = euler_band(cfg.sim);
    const auto conv = static_cast<std::size_t>(*res.summary.convergence_step);
    std::size_t inside = 0, total = 0;
    for (std::size_t k = conv; k < res.trajectory.size(); ++k, ++total)
        if (std::abs(res.trajectory[k].yc - cfg.sim.params.z_d) < band) ++inside;
    const double frac = static_cast<double>(inside) / static_cast<double>(total);
    if (!(frac >= 0.95)) return num("fraction inside the band", frac) + num(", band", band);
    return {};
}

std::string determinism() {
    const fs::path out_a = fs::path("acceptance_out") / "a";
    const fs::path out_b = fs::path("acceptance_out") / "b";
    fs::remove_all("acceptance_out");

    const std::string config = (fs::path(g_configs) / "ellipse.json").string();
    const auto invoke = [&](const std::string& args) {
        const std::string cmd = "\"" + g_tool + "\" " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };

    if (invoke("run \"" + config + "\" --out \"" + out_a.string() + "\"") != 0)
        return "first run invocation failed";
    if (invoke("run \"" + config + "\" --out \"" + out_b.string() + "\"") != 0)
        return "second run invocation failed";

    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string bytes_a = slurp(out_a / "trajectory.csv");
    const std::string bytes_b = slurp(out_b / "trajectory.csv");
    if (bytes_a.empty()) return "trajectory.csv missing or empty";
    if (bytes_a != bytes_b) return "trajectory.csv differs between invocations";

    const auto t0 = std::chrono::steady_clock::now();
    const int rc = invoke("validate");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (rc != 0) return "validate exited nonzero";
    if (!(secs < 60.0)) return num("validate runtime seconds", secs);

    fs::remove_all("acceptance_out");
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance <curvetrak-binary> <configs-dir>\n");
        return 64;
    }
    g_tool = argv[1];
    g_configs = argv[2];
#ifndef _WIN32
    unsetenv("CURVETRAK_SEED");
#endif

    struct Criterion {
        const char* name;
        std::function<std::string()> body;
    };
    const std::vector<Criterion> criteria = {
        {"ellipse reproduction: band entry, hold, loop, runtime", ellipse_reproduction},
        {"matyas reproduction: convergence band and loop", matyas_reproduction},
        {"separation contraction bound on 20 random configs", separation_law},
        {"omega exactness along the ellipse run", omega_exactness},
        {"omega approximation error halves quartically on the cubic", omega_order},
        {"lyapunov descent at the annulus boundary", lyapunov_descent},
        {"gamma dynamics residual and non-constancy", gamma_residual},
        {"gradient oracles on five fields", gradient_oracles},
        {"noise robustness of the ellipse run", noise_robustness},
        {"byte determinism and self-validation", determinism},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        std::string detail;
        try {
            detail = criteria[k].body();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (detail.empty()) {
            std::printf("PASS %2zu  %s\n", k + 1, criteria[k].name);
        } else {
            std::printf("FAIL %2zu  %s: %s\n", k + 1, criteria[k].name, detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    std::printf("%zu/%zu acceptance criteria passed\n", criteria.size() - failures,
                criteria.size());
    return failures;
}
