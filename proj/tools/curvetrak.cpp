// curvetrak command line front end: run / sweep / plot / validate.

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "curvetrak/config.hpp"
#include "curvetrak/csv.hpp"
#include "curvetrak/selftest.hpp"
#include "curvetrak/svg.hpp"
#include "curvetrak/sweep.hpp"

namespace {

namespace fs = std::filesystem;
using namespace curvetrak;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAborted = 2;
constexpr int kExitIo = 3;
constexpr int kExitBadCsv = 4;

std::optional<std::uint64_t> env_seed_override() {
    const char* raw = std::getenv("CURVETRAK_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (errno != 0 || end == raw || *end != '\0')
        throw ConfigError("CURVETRAK_SEED must be a decimal unsigned integer");
    return static_cast<std::uint64_t>(v);
}

void write_file_or_throw(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open \"" + path.string() + "\" for writing");
    out << bytes;
    out.flush();
    if (!out) throw std::runtime_error("write failed for \"" + path.string() + "\"");
}

// Flat summary object plus the grid-sampled field bounds, flagged as
// estimates (they feed the gain condition, they are not certified).
Json summary_with_metadata(const ExperimentConfig& cfg, const RunSummary& summary) {
    Json j = summary_to_json(summary);
    const FieldBounds bounds = estimate_bounds(cfg.sim.field);
    j["field_z_min_est"] = bounds.z_min;
    j["field_z_max_est"] = bounds.z_max;
    j["field_grad_min_est"] = bounds.grad_min;
    j["field_grad_max_est"] = bounds.grad_max;
    j["field_bounds_estimated"] = true;
    return j;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_override) {
    ExperimentConfig cfg = parse_config(config_path);
    if (out_override) cfg.output_dir = *out_override;
    if (const auto seed = env_seed_override()) cfg.sim.seed = *seed;

    const RunResult result = run(cfg.sim, cfg.monitor, cfg.metrics);

    try {
        fs::create_directories(cfg.output_dir);
        if (cfg.emit_trajectory) {
            std::ostringstream csv;
            write_trajectory_csv(csv, result.trajectory);
            write_file_or_throw(fs::path(cfg.output_dir) / "trajectory.csv", csv.str());
        }
        if (cfg.emit_summary) {
            write_file_or_throw(fs::path(cfg.output_dir) / "summary.json",
                                summary_with_metadata(cfg, result.summary).dump(2) + "\n");
        }
        if (cfg.emit_plot && !result.trajectory.empty()) {
            std::ostringstream svg;
            render_plot_svg(svg, result.trajectory, cfg.sim.field, cfg.sim.params.z_d);
            write_file_or_throw(fs::path(cfg.output_dir) / "plot.svg", svg.str());
        }
    } catch (const std::exception& e) {
        std::cerr << "curvetrak run: " << e.what() << '\n';
        return kExitIo;
    }

    if (result.summary.aborted) {
        std::cerr << "curvetrak run: aborted: " << result.summary.abort_reason << '\n';
        return kExitAborted;
    }
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, int jobs) {
    ExperimentConfig cfg = parse_config(config_path);
    if (cfg.sweep.empty())
        throw ConfigError("sweep requested but the config has no \"sweep\" key");
    if (const auto seed = env_seed_override()) cfg.sim.seed = *seed;

    const SweepResult result = run_sweep(cfg, jobs);
    try {
        fs::create_directories(cfg.output_dir);
        std::ostringstream csv;
        write_sweep_csv(csv, result);
        write_file_or_throw(fs::path(cfg.output_dir) / "sweep.csv", csv.str());
    } catch (const std::exception& e) {
        std::cerr << "curvetrak sweep: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& field_config_path,
             const std::string& out_path) {
    const ExperimentConfig cfg = parse_config(field_config_path);

    std::ifstream in(csv_path);
    if (!in) {
        std::cerr << "curvetrak plot: cannot open \"" << csv_path << "\"\n";
        return kExitIo;
    }
    std::ostringstream svg;
    try {
        const auto records = read_trajectory_csv(in);
        render_plot_svg(svg, records, cfg.sim.field, cfg.sim.params.z_d);
    } catch (const CsvFormatError& e) {
        std::cerr << "curvetrak plot: " << e.what() << '\n';
        return kExitBadCsv;
    }
    try {
        write_file_or_throw(out_path, svg.str());
    } catch (const std::exception& e) {
        std::cerr << "curvetrak plot: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

int cmd_validate() {
    const auto checks = run_self_checks();
    print_check_table(std::cout, checks);
    return all_passed(checks) ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic two-agent level-curve tracking simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    auto* run_cmd = app.add_subcommand("run", "execute one configured run");
    run_cmd->add_option("config", config_path, "experiment config (JSON)")->required();
    run_cmd->add_option("--out", out_dir, "output directory override");

    std::string sweep_config;
    int jobs = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "run every sweep combination");
    sweep_cmd->add_option("config", sweep_config, "experiment config (JSON)")->required();
    sweep_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    std::string traj_path, field_config, svg_out;
    auto* plot_cmd = app.add_subcommand("plot", "render a trajectory to SVG");
    plot_cmd->add_option("trajectory", traj_path, "trajectory CSV")->required();
    plot_cmd->add_option("--field", field_config, "config supplying the field")->required();
    plot_cmd->add_option("--out", svg_out, "output SVG path")->required();

    auto* validate_cmd = app.add_subcommand("validate", "run the built-in check suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, out_dir);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_config, jobs);
        if (plot_cmd->parsed()) return cmd_plot(traj_path, field_config, svg_out);
        if (validate_cmd->parsed()) return cmd_validate();
    } catch (const ConfigError& e) {
        std::cerr << "curvetrak: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "curvetrak: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
