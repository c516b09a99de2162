#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scr/binarize.hpp"
#include "scr/errors.hpp"
#include "scr/experiments.hpp"
#include "scr/pipeline.hpp"

namespace {

// "20..160:20" or a plain comma list.
std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const auto colon = text.find(':', dots);
        const std::size_t lo = std::stoul(text.substr(0, dots));
        const std::size_t hi = std::stoul(
            colon == std::string::npos ? text.substr(dots + 2)
                                       : text.substr(dots + 2, colon - dots - 2));
        const std::size_t step =
            colon == std::string::npos ? 1 : std::stoul(text.substr(colon + 1));
        if (step == 0 || hi < lo) throw scr::InvalidInput("bad size range: " + text);
        for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
        return out;
    }
    std::size_t at = 0;
    while (at < text.size()) {
        auto comma = text.find(',', at);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(std::stoul(text.substr(at, comma - at)));
        at = comma + 1;
    }
    if (out.empty()) throw scr::InvalidInput("empty size list");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scrforge: approximate linear reservoir systems by simple cycle reservoirs"};
    app.require_subcommand(1);

    // --- dilation-exp ---------------------------------------------------
    auto* dil = app.add_subcommand("dilation-exp",
                                   "State-MSE sweep over dilation orders (Experiment A)");
    std::string dil_dataset = "synthetic";
    std::string dil_data, dil_out, dil_column, dil_dims;
    std::size_t dil_seeds = 15, dil_horizon = 300, dil_steps = 2000;
    double dil_rho = 0.9, dil_ridge = 1e-9, dil_delta = 0.0;
    std::uint64_t dil_seed_base = 1;
    dil->add_option("--dataset", dil_dataset, "ett|ecl|synthetic")->capture_default_str();
    dil->add_option("--data", dil_data, "dataset CSV path (ett/ecl)");
    dil->add_option("--out", dil_out, "output directory")->required();
    dil->add_option("--seeds", dil_seeds, "randomized generations")->capture_default_str();
    dil->add_option("--horizon", dil_horizon, "forecast horizon")->capture_default_str();
    dil->add_option("--rho", dil_rho, "spectral radius")->capture_default_str();
    dil->add_option("--ridge", dil_ridge, "ridge coefficient")->capture_default_str();
    dil->add_option("--delta", dil_delta, "fixed matching tolerance (default: per-order policy)");
    dil->add_option("--dims", dil_dims, "dilation orders, comma separated");
    dil->add_option("--steps", dil_steps, "evaluation steps after washout")->capture_default_str();
    dil->add_option("--column", dil_column, "CSV column (default OT / MT_320)");
    dil->add_option("--seed-base", dil_seed_base, "base seed")->capture_default_str();

    // --- matching-exp ---------------------------------------------------
    auto* mat = app.add_subcommand("matching-exp",
                                   "Matched cycle dimension vs theoretical bound (Experiment B)");
    std::string mat_out, mat_sizes = "20..160:20";
    double mat_delta = 0.1;
    std::size_t mat_samples = 10;
    std::uint64_t mat_seed_base = 1;
    mat->add_option("--out", mat_out, "output directory")->required();
    mat->add_option("--delta", mat_delta, "matching tolerance")->capture_default_str();
    mat->add_option("--sizes", mat_sizes, "initial dimensions, e.g. 20..160:20")
        ->capture_default_str();
    mat->add_option("--samples", mat_samples, "orthogonal samples per size")
        ->capture_default_str();
    mat->add_option("--seed-base", mat_seed_base, "base seed")->capture_default_str();

    // --- approx -----------------------------------------------------------
    auto* apx = app.add_subcommand("approx", "Approximate a stored system by an SCR");
    std::string apx_system, apx_out;
    double apx_epsilon = 0.0;
    std::size_t apx_streams = 20, apx_len = 500;
    std::uint64_t apx_seed = 1;
    apx->add_option("--system", apx_system, "directory with manifest.txt/W.csv/V.csv/readout.csv")
        ->required();
    apx->add_option("--epsilon", apx_epsilon, "output tolerance")->required();
    apx->add_option("--out", apx_out, "output directory")->required();
    apx->add_option("--streams", apx_streams, "validation stream count")->capture_default_str();
    apx->add_option("--stream-len", apx_len, "validation stream length")->capture_default_str();
    apx->add_option("--seed", apx_seed, "validation stream seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dil->parsed()) {
            scr::DilationExperimentConfig cfg;
            if (dil_dataset == "ett")
                cfg.dataset = scr::DatasetKind::Ett;
            else if (dil_dataset == "ecl")
                cfg.dataset = scr::DatasetKind::Ecl;
            else if (dil_dataset == "synthetic")
                cfg.dataset = scr::DatasetKind::Synthetic;
            else
                throw scr::InvalidInput("unknown dataset: " + dil_dataset);
            if (cfg.dataset != scr::DatasetKind::Synthetic && dil_data.empty())
                throw scr::InvalidInput("--data is required for ett/ecl");
            cfg.data_path = dil_data;
            cfg.column = dil_column;
            cfg.out_dir = dil_out;
            cfg.seeds = dil_seeds;
            cfg.horizon = dil_horizon;
            cfg.rho = dil_rho;
            cfg.ridge = dil_ridge;
            cfg.delta = dil_delta;
            cfg.eval_steps = dil_steps;
            cfg.seed_base = dil_seed_base;
            if (!dil_dims.empty()) cfg.orders = parse_sizes(dil_dims);
            const scr::DilationResult res = scr::run_dilation_experiment(cfg);
            std::printf("dilation-exp: %zu rows, %zu failures -> %s\n", res.rows.size(),
                        res.failures.size(), dil_out.c_str());
        } else if (mat->parsed()) {
            scr::MatchingExperimentConfig cfg;
            cfg.out_dir = mat_out;
            cfg.delta = mat_delta;
            cfg.sizes = parse_sizes(mat_sizes);
            cfg.samples = mat_samples;
            cfg.seed_base = mat_seed_base;
            const scr::MatchingResult res = scr::run_matching_experiment(cfg);
            std::printf("matching-exp: %zu rows -> %s\n", res.rows.size(), mat_out.c_str());
        } else if (apx->parsed()) {
            const scr::LinearReservoir r = scr::load_reservoir(apx_system);
            const auto streams =
                scr::default_validation_streams(r, apx_seed, apx_streams, apx_len);
            const auto [s, rep] = scr::approximate_scr(r, apx_epsilon, streams);
            std::filesystem::create_directories(apx_out);
            scr::save_scr(apx_out, s);
            scr::write_report_text(apx_out + "/report.txt", rep);
            scr::write_report_csv(apx_out + "/report.csv", rep);
            std::printf("approx: n_scr=%zu (n_c=%zu, k=%zu), gap=%.6g < epsilon=%.6g -> %s\n",
                        s.n_scr, s.n_c, s.k, rep.empirical_output_gap, rep.epsilon_requested,
                        apx_out.c_str());
        }
    } catch (const scr::NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const scr::ResourceLimit& e) {
        std::fprintf(stderr, "resource limit: %s\n", e.what());
        return 3;
    } catch (const scr::IngestionError& e) {
        std::fprintf(stderr, "ingestion error: %s\n", e.what());
        return 2;
    } catch (const scr::InvalidInput& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
