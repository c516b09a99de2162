#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scr/reservoir.hpp"

namespace scr {

enum class DatasetKind { Ett, Ecl, Synthetic };

// A univariate series standardized on its training split, with the split
// boundaries documented by the source dataset (30-day months):
//   ETTm2: 15-minute sampling, 12/4/4 months of 96 samples/day;
//   ECL:   hourly sampling, 15/3/4 months of 24 samples/day.
struct LoadedSeries {
    InputStream stream;
    std::size_t train_end = 0;
    std::size_t val_end = 0;
    double train_mean = 0.0;
    double train_std = 0.0;
};

LoadedSeries load_series(const std::string& path, DatasetKind kind, const std::string& column);

// Self-contained stand-in stream: uniform [-1, 1] samples, split 12/4/4
// twentieths like the ETT convention.
LoadedSeries synthetic_series(std::size_t length, std::uint64_t seed);

// The n = 5 reference system: W ~ U(0,1) entries rescaled to operator norm
// rho, V = +-0.05 by the pi-digit sign rule (decimal digit >= 5 maps to +),
// readout ridge-trained on the training split to predict u_{t+horizon}.
LinearReservoir make_reference_system(std::uint64_t seed, const LoadedSeries& data,
                                      std::size_t horizon, double ridge, double rho);

// ---------------------------------------------------------------------------
// Experiment A: state MSE between the original system and its cyclic dilation
// as the dilation order sweeps over a fixed set.
// ---------------------------------------------------------------------------

struct DilationExperimentConfig {
    DatasetKind dataset = DatasetKind::Synthetic;
    std::string data_path;
    std::string column;                     // empty: dataset default (OT / MT_320)
    std::string out_dir;
    std::size_t seeds = 15;
    std::size_t horizon = 300;
    double rho = 0.9;
    double ridge = 1e-9;
    std::vector<std::size_t> orders = {2, 6, 10, 15, 19, 24, 28, 33, 37, 42};
    // Root-matching tolerance; 0 selects the per-order policy
    // clamp((1-rho) rho^{N+1} / 2, 1e-3, 0.1) so the matching error tracks the
    // dilation truncation error.
    double delta = 0.0;
    // The measured window is the first eval_steps of the test split; the
    // washout warm-up runs on the data immediately preceding it (0 = auto).
    std::size_t eval_steps = 2000;
    std::size_t washout = 0;
    std::size_t synthetic_length = 20000;
    std::uint64_t seed_base = 1;
};

struct DilationRow {
    std::size_t order = 0;
    std::uint64_t seed = 0;
    double state_mse = 0.0;
    std::size_t n_c = 0;
};

struct DilationSummaryRow {
    std::size_t order = 0;
    double mean = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

struct DilationResult {
    std::vector<DilationRow> rows;
    std::vector<DilationSummaryRow> summary;
    std::vector<std::string> failures;
};

// Writes rows.csv / summary.csv (and failures.csv when any) under out_dir,
// plus run_meta.txt with wall-clock data kept out of the CSVs.
DilationResult run_dilation_experiment(const DilationExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Experiment B: minimal matched cycle dimension vs the theoretical bound.
// ---------------------------------------------------------------------------

struct MatchingExperimentConfig {
    std::string out_dir;
    double delta = 0.1;
    std::vector<std::size_t> sizes = {20, 40, 60, 80, 100, 120, 140, 160};
    std::size_t samples = 10;
    std::uint64_t seed_base = 1;
};

struct MatchingRow {
    std::size_t n = 0;
    std::size_t sample = 0;
    std::size_t n_c = 0;
    std::size_t n_theory = 0;
};

struct MatchingSummaryRow {
    std::size_t n = 0;
    double geomean_nc = 0.0;
    double geomean_n1 = 0.0;
    double median_nc = 0.0;
};

struct MatchingResult {
    std::vector<MatchingRow> rows;
    std::vector<MatchingSummaryRow> summary;
};

MatchingResult run_matching_experiment(const MatchingExperimentConfig& cfg);

// Figure-style SVG charts from the result rows; values mirror the CSVs.
// Empty results are a warning-level no-op.
void emit_plots(const DilationResult& result, const std::string& out_dir);
void emit_plots(const MatchingResult& result, const std::string& out_dir);

} // namespace scr
