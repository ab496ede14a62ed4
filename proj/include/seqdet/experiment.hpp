#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "seqdet/experiment_config.hpp"
#include "seqdet/monte_carlo.hpp"

namespace seqdet {

namespace detail {

// 9 significant digits, locale-independent
inline std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline void write_cell_row(std::ostream& out, const ExperimentConfig& cfg,
                           const CellSummary& cell) {
    const bool h1 = cell.truth.is_h1;
    out << (h1 ? "h1" : "h0") << ',' << (h1 ? set_to_string(cell.truth.affected) : "none") << ','
        << strategy_name(cfg.strategy) << ',' << cell.n_trials << ','
        << fmt_real(cell.error.rate) << ',' << fmt_real(cell.error.ci_low) << ','
        << fmt_real(cell.error.ci_high) << ',' << fmt_real(cell.mean_stop.mean) << ','
        << fmt_real(cell.mean_stop.ci_low) << ',' << fmt_real(cell.mean_stop.ci_high) << ','
        << fmt_real(cell.theoretical_bound) << ',' << fmt_real(cell.mean_messages) << ','
        << cell.censored << '\n';
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "hypothesis,subset,strategy,n_trials,error_rate,ci_low,ci_high,mean_stop,"
    "mean_stop_ci_low,mean_stop_ci_high,theoretical_bound,mean_messages_per_trial,censored";

inline void write_summary_csv(std::ostream& out, const ExperimentConfig& cfg,
                              const ExperimentSummary& summary, bool header = true,
                              const std::string& row_prefix = "") {
    if (header) out << kCsvHeader << '\n';
    out << row_prefix;
    detail::write_cell_row(out, cfg, summary.h0_cell);
    for (const CellSummary& cell : summary.h1_cells) {
        out << row_prefix;
        detail::write_cell_row(out, cfg, cell);
    }
}

// One full experiment: calibrate, run every cell, emit the summary CSV.
inline void run_experiment(const ExperimentConfig& cfg, std::ostream& out) {
    const ExperimentSummary summary = estimate_operating_characteristics(cfg);
    write_summary_csv(out, cfg, summary);
}

// Repeats the experiment with a uniform delta per sweep value. Rows gain a
// leading "delta" column exposing the communication-cost tradeoff.
inline void sweep_delta(const ExperimentConfig& base, const std::vector<double>& deltas,
                        std::ostream& out) {
    if (deltas.empty()) throw std::invalid_argument("sweep_delta: empty delta list");
    out << "delta," << kCsvHeader << '\n';
    for (double d : deltas) {
        if (!(d > 0.0)) throw std::invalid_argument("sweep_delta: deltas must be > 0");
        ExperimentConfig cfg = base;
        cfg.deltas.assign(cfg.k, d);
        const ExperimentSummary summary = estimate_operating_characteristics(cfg);
        write_summary_csv(out, cfg, summary, /*header=*/false, detail::fmt_real(d) + ",");
    }
}

}  // namespace seqdet
