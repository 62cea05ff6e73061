#pragma once

// Cartesian parameter sweeps. Every combination of the configured value
// lists runs once with a seed derived from (base seed, combination index),
// so results are independent of execution order and of how many worker
// threads picked up the runs.

#include <atomic>
#include <cstdint>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "curvetrak/config.hpp"
#include "curvetrak/csv.hpp"
#include "curvetrak/rng.hpp"
#include "curvetrak/sim.hpp"

namespace curvetrak {

struct SweepRow {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;  // one per sweep key, config order
    RunSummary summary;
    bool failed = false;
    std::string error;
};

struct SweepResult {
    std::vector<std::string> keys;
    std::vector<SweepRow> rows;
};

inline std::uint64_t sweep_combination_count(const ExperimentConfig& cfg) {
    std::uint64_t n = 1;
    for (const auto& [key, values] : cfg.sweep) n *= values.size();
    return n;
}

/// Values of combination `index`. The last sweep key varies fastest, so the
/// index reads as a mixed-radix number with the first key most significant;
/// appending values to the first key's list leaves existing indices intact.
inline std::vector<double> sweep_values_at(const ExperimentConfig& cfg, std::uint64_t index) {
    std::vector<double> out(cfg.sweep.size());
    for (std::size_t k = cfg.sweep.size(); k-- > 0;) {
        const auto& values = cfg.sweep[k].second;
        out[k] = values[index % values.size()];
        index /= values.size();
    }
    return out;
}

inline SweepRow run_sweep_combination(const ExperimentConfig& base, std::uint64_t index) {
    SweepRow row;
    row.index = index;
    row.values = sweep_values_at(base, index);

    ExperimentConfig cfg = base;
    for (std::size_t k = 0; k < base.sweep.size(); ++k)
        apply_param(cfg, base.sweep[k].first, row.values[k]);
    cfg.sim.seed = derive_sweep_seed(base.sim.seed, index);
    row.seed = cfg.sim.seed;

    // An invalid combination (say k1 swept through zero) is recorded in its
    // row instead of killing the rest of the sweep.
    try {
        row.summary = run(cfg.sim, cfg.monitor, cfg.metrics).summary;
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

inline SweepResult run_sweep(const ExperimentConfig& cfg, int jobs = 1) {
    if (cfg.sweep.empty()) throw ConfigError("sweep requested but config has no \"sweep\" key");
    SweepResult result;
    result.keys.reserve(cfg.sweep.size());
    for (const auto& [key, values] : cfg.sweep) result.keys.push_back(key);

    const std::uint64_t total = sweep_combination_count(cfg);
    result.rows.resize(total);

    if (jobs <= 1) {
        for (std::uint64_t i = 0; i < total; ++i) result.rows[i] = run_sweep_combination(cfg, i);
        return result;
    }

    std::atomic<std::uint64_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= total) return;
            result.rows[i] = run_sweep_combination(cfg, i);
        }
    };
    std::vector<std::thread> pool;
    const auto n_threads = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), total));
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return result;
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace detail

/// One row per combination, in index order: identification, swept parameter
/// values, then the RunSummary fields. Optional fields print as empty cells.
inline void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "index,seed";
    for (const auto& key : result.keys) os << ',' << key;
    os << ",converged,convergence_step,convergence_time,mean_abs_error_post,"
          "max_abs_error_post,loops_completed,arc_length_traveled,lemma_violations,"
          "lemma_not_applicable,theorem_violations,aborted,abort_reason,rng_id,error\n";

    for (const auto& row : result.rows) {
        os << row.index << ',' << row.seed;
        for (const double v : row.values) os << ',' << detail::fmt17(v);
        const RunSummary& s = row.summary;
        os << ',' << (s.converged ? 1 : 0);
        os << ',';
        if (s.convergence_step) os << *s.convergence_step;
        os << ',';
        if (s.convergence_time) os << detail::fmt17(*s.convergence_time);
        os << ',';
        if (s.mean_abs_error_post) os << detail::fmt17(*s.mean_abs_error_post);
        os << ',';
        if (s.max_abs_error_post) os << detail::fmt17(*s.max_abs_error_post);
        os << ',' << detail::fmt17(s.loops_completed);
        os << ',' << detail::fmt17(s.arc_length_traveled);
        os << ',' << s.lemma_violations;
        os << ',' << s.lemma_not_applicable;
        os << ',' << s.theorem_violations;
        os << ',' << (s.aborted ? 1 : 0);
        os << ',' << detail::csv_quote(s.abort_reason);
        os << ',' << detail::csv_quote(s.rng_id);
        os << ',' << detail::csv_quote(row.error);
        os << '\n';
    }
}

}  // namespace curvetrak
