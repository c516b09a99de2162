#include "scr/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scr/cyclic.hpp"
#include "scr/dilation.hpp"
#include "scr/errors.hpp"
#include "scr/kernels.hpp"
#include "scr/linalg.hpp"
#include "scr/rng.hpp"
#include "scr/svg_plot.hpp"

namespace scr {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct SplitSpec {
    std::size_t train, val, test;
};

SplitSpec split_for(DatasetKind kind, std::size_t total) {
    switch (kind) {
        case DatasetKind::Ett: {
            // 15-minute sampling: 96 samples/day, 30-day months, 12/4/4.
            const std::size_t month = 30 * 96;
            return {12 * month, 4 * month, 4 * month};
        }
        case DatasetKind::Ecl: {
            // Hourly sampling: 24 samples/day, 30-day months, 15/3/4.
            const std::size_t month = 30 * 24;
            return {15 * month, 3 * month, 4 * month};
        }
        case DatasetKind::Synthetic:
        default: {
            // 12/4/4 twentieths of whatever length is available.
            const std::size_t u = total / 20;
            return {12 * u, 4 * u, total - 16 * u};
        }
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

LoadedSeries standardize_and_split(std::vector<double> values, const SplitSpec& split) {
    const std::size_t needed = split.train + split.val + split.test;
    values.resize(needed);

    double mean = 0.0;
    for (std::size_t i = 0; i < split.train; ++i) mean += values[i];
    mean /= static_cast<double>(split.train);
    double var = 0.0;
    for (std::size_t i = 0; i < split.train; ++i) {
        const double d = values[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(split.train);
    const double sd = std::sqrt(var);
    if (!(sd > 0.0))
        throw IngestionError("standardization failed: training split has zero variance");

    std::vector<Vec> samples(needed, Vec(1));
    double bound = 0.0;
    for (std::size_t i = 0; i < needed; ++i) {
        samples[i][0] = (values[i] - mean) / sd;
        bound = std::max(bound, std::fabs(samples[i][0]));
    }
    LoadedSeries out;
    out.stream = make_stream(std::move(samples), bound);
    out.train_end = split.train;
    out.val_end = split.train + split.val;
    out.train_mean = mean;
    out.train_std = sd;
    return out;
}

} // namespace

LoadedSeries load_series(const std::string& path, DatasetKind kind, const std::string& column) {
    if (kind == DatasetKind::Synthetic)
        throw InvalidInput("load_series: synthetic data has no file; use synthetic_series");
    const std::string col =
        column.empty() ? (kind == DatasetKind::Ett ? "OT" : "MT_320") : column;

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("dataset file not found: " + path, col);

    std::string line;
    if (!std::getline(in, line)) throw IngestionError("dataset file is empty: " + path, col);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv_line(line);
    std::size_t col_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == col) col_idx = i;
    if (col_idx == header.size())
        throw IngestionError("column '" + col + "' not present in " + path, col);

    std::vector<double> values;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (col_idx >= cells.size())
            throw IngestionError("row too short for column '" + col + "'", col, lineno);
        const std::string& cell = cells[col_idx];
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
            throw IngestionError("non-numeric cell '" + cell + "' in column '" + col + "'", col,
                                 lineno);
        values.push_back(v);
    }

    const SplitSpec split = split_for(kind, values.size());
    if (values.size() < split.train + split.val + split.test)
        throw IngestionError("dataset too short: need " +
                                 std::to_string(split.train + split.val + split.test) +
                                 " rows, found " + std::to_string(values.size()),
                             col);
    return standardize_and_split(std::move(values), split);
}

LoadedSeries synthetic_series(std::size_t length, std::uint64_t seed) {
    if (length < 200) throw InvalidInput("synthetic_series: length too short");
    Rng rng(seed);
    std::vector<double> values(length);
    for (double& v : values) v = rng.uniform(-1.0, 1.0);
    return standardize_and_split(std::move(values), split_for(DatasetKind::Synthetic, length));
}

// ---------------------------------------------------------------------------
// Reference system
// ---------------------------------------------------------------------------

namespace {

// Decimal digits of pi; digit >= 5 maps to +1, else -1 (threshold 4.5).
constexpr const char* kPiDigits =
    "31415926535897932384626433832795028841971693993751058209749445923078164062862089986280"
    "3482534211706798214808651328230664709384460955058223172535940812848111745028410270";

double pi_sign(std::size_t index) {
    if (index >= std::char_traits<char>::length(kPiDigits))
        throw InvalidInput("pi sign rule: digit table exhausted");
    return kPiDigits[index] >= '5' ? 1.0 : -1.0;
}

} // namespace

LinearReservoir make_reference_system(std::uint64_t seed, const LoadedSeries& data,
                                      std::size_t horizon, double ridge, double rho) {
    constexpr std::size_t n = 5;
    Rng rng(seed);
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w(i, j) = rng.uniform01();
    const double nrm = operator_norm(w);
    w = scale(w, rho / nrm);

    Matrix v(n, 1);
    for (std::size_t i = 0; i < n; ++i) v(i, 0) = 0.05 * pi_sign(i);

    // Drive the training split, then ridge-train the readout on horizon-ahead
    // targets.
    std::vector<Vec> train_samples(data.stream.samples.begin(),
                                   data.stream.samples.begin() +
                                       static_cast<long>(data.train_end));
    InputStream train = make_stream(std::move(train_samples), data.stream.bound);

    LinearReservoir bare =
        make_reservoir(w, v, LinearReadout{Matrix(1, n), false}, data.stream.bound);
    std::size_t washout = default_washout(bare);
    if (washout + horizon + 8 > train.length())
        throw InvalidInput("make_reference_system: training split too short for the horizon");

    const std::vector<Vec> states = drive(bare, train, washout);
    std::vector<Vec> xs, ys;
    for (std::size_t i = 0; i + horizon + washout < train.length(); ++i) {
        xs.push_back(states[i]);
        ys.push_back(train.samples[i + washout + horizon]);
    }
    LinearReadout readout = train_ridge(xs, ys, ridge);
    return make_reservoir(std::move(w), std::move(v), std::move(readout), data.stream.bound);
}

// ---------------------------------------------------------------------------
// Experiment A
// ---------------------------------------------------------------------------

namespace {

std::string now_string() {
    const std::time_t t = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
    return buf;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

DilationResult run_dilation_experiment(const DilationExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const auto t_start = std::chrono::steady_clock::now();
    const std::string started_at = now_string();

    LoadedSeries data;
    if (cfg.dataset == DatasetKind::Synthetic) {
        data = synthetic_series(cfg.synthetic_length, cfg.seed_base);
    } else {
        data = load_series(cfg.data_path, cfg.dataset, cfg.column);
    }

    DilationResult result;
    for (std::size_t order : cfg.orders) {
        for (std::size_t s = 0; s < cfg.seeds; ++s) {
            const std::uint64_t seed = cfg.seed_base + 1000 + s;
            try {
                LinearReservoir r =
                    make_reference_system(seed, data, cfg.horizon, cfg.ridge, cfg.rho);
                const std::size_t n = r.state_dim();

                const Matrix u = egervary_dilation(scale(r.w, 1.0 / cfg.rho), order);
                const double delta_match =
                    cfg.delta > 0.0
                        ? cfg.delta
                        : std::clamp(0.5 * (1.0 - cfg.rho) *
                                         std::pow(cfg.rho, static_cast<double>(order + 1)),
                                     1e-3, 0.1);
                OrthogonalCycleEmbedding emb = approximate_orthogonal(u, delta_match);
                // Only the first n columns of the transform matter: V_U = [V; 0]
                // and the comparison projects back onto the first n coordinates.
                const Matrix g_n = left_cols(emb.transform, n);
                emb.transform = Matrix();
                const Matrix v_c = matmul(g_n, r.v);
                const std::size_t n_c = emb.n_c;

                // Measurement window: the first eval_steps of the test split.
                // The washout warm-up uses the data immediately before it, so
                // the measured absolute window never depends on the washout.
                const std::size_t washout =
                    cfg.washout > 0 ? cfg.washout : default_washout(r);
                if (washout > data.val_end)
                    throw InvalidInput("washout exceeds the available warm-up data");
                const std::size_t test_len = data.stream.length() - data.val_end;
                const std::size_t steps = std::min(cfg.eval_steps, test_len);
                if (steps < 16) throw InvalidInput("evaluation split too short");
                std::vector<Vec> eval_samples(
                    data.stream.samples.begin() +
                        static_cast<long>(data.val_end - washout),
                    data.stream.samples.begin() +
                        static_cast<long>(data.val_end + steps));
                InputStream eval = make_stream(std::move(eval_samples), data.stream.bound);

                const std::vector<Vec> states_r = drive(r, eval, washout);

                // Shift recursion for (rho * cycle, V_C), projected per step.
                double mse = 0.0;
                std::size_t count = 0;
                Vec x(n_c, 0.0), next(n_c, 0.0), proj(n);
                for (std::size_t t = 0; t < eval.length(); ++t) {
                    const double ut = eval.samples[t][0];
                    for (std::size_t i = 0; i < n_c; ++i)
                        next[i] = cfg.rho * x[(i + 1) % n_c] + v_c(i, 0) * ut;
                    std::swap(x, next);
                    if (t < washout) continue;
                    kernels::matvec_transposed(g_n, x.data(), proj.data());
                    const Vec& xr = states_r[t - washout];
                    for (std::size_t i = 0; i < n; ++i) {
                        const double d = xr[i] - proj[i];
                        mse += d * d;
                    }
                    count += n;
                }
                mse /= static_cast<double>(count);
                result.rows.push_back({order, seed, mse, n_c});
            } catch (const Error& e) {
                result.failures.push_back("order=" + std::to_string(order) +
                                          ",seed=" + std::to_string(seed) + ": " + e.what());
            }
        }
    }

    // Per-order mean and 95% confidence interval of the mean.
    for (std::size_t order : cfg.orders) {
        std::vector<double> vals;
        for (const DilationRow& row : result.rows)
            if (row.order == order) vals.push_back(row.state_mse);
        if (vals.empty()) continue;
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var = vals.size() > 1 ? var / static_cast<double>(vals.size() - 1) : 0.0;
        const double half = 1.96 * std::sqrt(var / static_cast<double>(vals.size()));
        result.summary.push_back({order, mean, mean - half, mean + half});
    }

    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        {
            std::ofstream rows(cfg.out_dir + "/rows.csv", std::ios::binary);
            rows << "order,seed,state_mse,n_c\n";
            for (const DilationRow& row : result.rows)
                rows << row.order << ',' << row.seed << ',' << fmt17(row.state_mse) << ','
                     << row.n_c << "\n";
        }
        {
            std::ofstream sum(cfg.out_dir + "/summary.csv", std::ios::binary);
            sum << "order,mean_mse,ci95_lo,ci95_hi\n";
            for (const DilationSummaryRow& row : result.summary)
                sum << row.order << ',' << fmt17(row.mean) << ',' << fmt17(row.ci_lo) << ','
                    << fmt17(row.ci_hi) << "\n";
        }
        if (!result.failures.empty()) {
            std::ofstream fail(cfg.out_dir + "/failures.csv", std::ios::binary);
            fail << "description\n";
            for (const std::string& f : result.failures) fail << f << "\n";
        }
        {
            std::ofstream meta(cfg.out_dir + "/run_meta.txt", std::ios::binary);
            meta << "started_at = " << started_at << "\n";
            meta << "seconds_total = "
                 << std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                        .count()
                 << "\n";
            meta << "cells = " << cfg.orders.size() * cfg.seeds << "\n";
            meta << "failures = " << result.failures.size() << "\n";
        }
        emit_plots(result, cfg.out_dir);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Experiment B
// ---------------------------------------------------------------------------

MatchingResult run_matching_experiment(const MatchingExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const auto t_start = std::chrono::steady_clock::now();
    const std::string started_at = now_string();

    MatchingResult result;
    for (std::size_t n : cfg.sizes) {
        for (std::size_t s = 0; s < cfg.samples; ++s) {
            const std::uint64_t seed = cfg.seed_base + 1000003ull * n + s;
            const Matrix u = random_orthogonal(n, seed);
            const CanonicalForm cf = canonical_form(u, 1e-8);

            // Same +-1 grouping as the embedding: pairs become angles 0 / pi.
            std::size_t p = cf.plus_count, q = cf.minus_count;
            if ((p + q) % 2 == 1) {
                if (p % 2 == 1)
                    ++q;
                else
                    ++p;
            }
            std::vector<double> angles(p / 2, 0.0);
            angles.insert(angles.end(), cf.angles.begin(), cf.angles.end());
            angles.insert(angles.end(), q / 2, kPi);

            const auto [n_c, matching] = min_cycle_dimension(angles, cfg.delta);
            (void)matching;
            const std::size_t n1 = theoretical_dimension(angles.size(), cfg.delta);
            result.rows.push_back({n, s, n_c, n1});
        }
    }

    for (std::size_t n : cfg.sizes) {
        std::vector<double> ncs, n1s;
        for (const MatchingRow& row : result.rows) {
            if (row.n != n) continue;
            ncs.push_back(static_cast<double>(row.n_c));
            n1s.push_back(static_cast<double>(row.n_theory));
        }
        if (ncs.empty()) continue;
        auto geomean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += std::log(x);
            return std::exp(s / static_cast<double>(v.size()));
        };
        std::vector<double> sorted = ncs;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted.size() % 2 == 1
                                  ? sorted[sorted.size() / 2]
                                  : 0.5 * (sorted[sorted.size() / 2 - 1] +
                                           sorted[sorted.size() / 2]);
        result.summary.push_back({n, geomean(ncs), geomean(n1s), median});
    }

    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        {
            std::ofstream rows(cfg.out_dir + "/rows.csv", std::ios::binary);
            rows << "n,sample,n_c,n_theory\n";
            for (const MatchingRow& row : result.rows)
                rows << row.n << ',' << row.sample << ',' << row.n_c << ',' << row.n_theory
                     << "\n";
        }
        {
            std::ofstream sum(cfg.out_dir + "/summary.csv", std::ios::binary);
            sum << "n,geomean_nc,geomean_n1,median_nc\n";
            for (const MatchingSummaryRow& row : result.summary)
                sum << row.n << ',' << fmt17(row.geomean_nc) << ',' << fmt17(row.geomean_n1)
                    << ',' << fmt17(row.median_nc) << "\n";
        }
        {
            std::ofstream meta(cfg.out_dir + "/run_meta.txt", std::ios::binary);
            meta << "started_at = " << started_at << "\n";
            meta << "seconds_total = "
                 << std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                        .count()
                 << "\n";
        }
        emit_plots(result, cfg.out_dir);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Plots
// ---------------------------------------------------------------------------

void emit_plots(const DilationResult& result, const std::string& out_dir) {
    if (result.summary.empty()) {
        std::fprintf(stderr, "emit_plots: no dilation rows, skipping chart\n");
        return;
    }
    PlotSeries mean;
    mean.label = "state MSE (mean, 95% CI)";
    for (const DilationSummaryRow& row : result.summary) {
        mean.x.push_back(static_cast<double>(row.order));
        mean.y.push_back(row.mean);
        mean.y_lo.push_back(row.ci_lo);
        mean.y_hi.push_back(row.ci_hi);
    }
    PlotSpec spec;
    spec.title = "State MSE vs dilation order";
    spec.x_label = "dilation order N";
    spec.y_label = "mean squared state difference";
    spec.series = {std::move(mean)};
    write_line_chart(out_dir + "/fig_dilation_mse.svg", spec);
}

void emit_plots(const MatchingResult& result, const std::string& out_dir) {
    if (result.summary.empty()) {
        std::fprintf(stderr, "emit_plots: no matching rows, skipping chart\n");
        return;
    }
    PlotSeries nc, n1;
    nc.label = "n_C (matched, geometric mean)";
    nc.color = "#1f6fb2";
    n1.label = "n_1 (theoretical bound, geometric mean)";
    n1.color = "#c23b22";
    for (const MatchingSummaryRow& row : result.summary) {
        nc.x.push_back(static_cast<double>(row.n));
        nc.y.push_back(row.geomean_nc);
        n1.x.push_back(static_cast<double>(row.n));
        n1.y.push_back(row.geomean_n1);
    }
    PlotSpec spec;
    spec.title = "Matched cycle dimension vs theoretical bound";
    spec.x_label = "initial dimension n";
    spec.y_label = "cycle dimension";
    spec.log_y = true;
    spec.series = {std::move(nc), std::move(n1)};
    write_line_chart(out_dir + "/fig_matching_dimension.svg", spec);
}

} // namespace scr
