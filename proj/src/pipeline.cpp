#include "scr/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "scr/errors.hpp"
#include "scr/linalg.hpp"

namespace scr {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// State tolerance for an output budget through a linear readout.  A zero
// readout makes every construction trivially close; any finite tolerance works.
double state_tolerance(double out_budget, double lipschitz) {
    if (lipschitz <= 0.0) return 1e30;
    return out_budget / lipschitz;
}

template <typename Fn>
auto staged(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const ResourceLimit&) {
        throw;
    } catch (const InvalidInput& e) {
        throw InvalidInput(std::string(stage) + " stage: " + e.what());
    } catch (const NumericalFailure& e) {
        throw NumericalFailure(std::string(stage) + " stage: " + e.what(), e.residual);
    }
}

} // namespace

std::vector<InputStream> default_validation_streams(const LinearReservoir& r, std::uint64_t seed,
                                                    std::size_t count, std::size_t length) {
    return random_streams(count, length, r.input_dim(), r.input_bound, seed);
}

std::pair<SCRSystem, ApproximationReport> approximate_scr(
    const LinearReservoir& r, double epsilon, const std::vector<InputStream>& validation,
    const EpsilonBudget& budget) {
    if (!(epsilon > 0.0)) throw InvalidInput("approximate_scr: epsilon must be positive");
    if (validation.empty()) throw InvalidInput("approximate_scr: need validation streams");
    for (const InputStream& u : validation) {
        if (u.dim() != r.input_dim())
            throw InvalidInput("approximate_scr: validation stream dimension mismatch");
        if (u.bound > r.input_bound * (1.0 + 1e-12))
            throw InvalidInput("approximate_scr: validation stream exceeds the input bound");
    }

    ApproximationReport rep;
    rep.epsilon_requested = epsilon;

    // Infeasibility guard before any heavy allocation: the dilation order for
    // lambda near 1 grows like log(delta) / log(lambda).
    {
        const double lip = r.readout.lipschitz();
        const double delta_dil = state_tolerance(epsilon * budget.dilation, lip);
        const double v_norm = operator_norm(r.v);
        if (v_norm > 0.0 && r.lambda > 0.0) {
            const double c = 2.0 * r.input_bound * v_norm / (1.0 - r.lambda);
            if (c > delta_dil) {
                const double order_est =
                    std::log(delta_dil / c) / std::log(r.lambda) - 1.0;
                if (order_est * static_cast<double>(r.state_dim()) > 250000.0)
                    throw ResourceLimit(
                        "approximate_scr: dilation order infeasible at this epsilon/lambda",
                        static_cast<long long>(order_est));
            }
        }
        rep.delta_dilation = delta_dil;
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto [r_u, plan] = staged("dilation", [&] { return dilate_system(r, rep.delta_dilation); });
    rep.order = plan.order;
    rep.n_u = plan.n_dilated;
    rep.seconds_dilation = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    rep.delta_cyclic = state_tolerance(epsilon * budget.cyclic, r_u.readout.lipschitz());
    const CyclicApproximation cyc =
        staged("cyclic", [&] { return cyclic_approximate(r_u, rep.delta_cyclic); });
    rep.n_c = cyc.n_c;
    rep.n_theory = cyc.theoretical_bound;
    rep.seconds_cyclic = seconds_since(t1);

    const auto t2 = std::chrono::steady_clock::now();
    rep.delta_binarize = state_tolerance(epsilon * budget.binarize, cyc.readout_c.lipschitz());
    const SCRSystem scr = staged("binarize", [&] { return scr_construct(cyc, rep.delta_binarize); });
    rep.k = scr.k;
    rep.n_avg = scr.n_avg;
    rep.seconds_binarize = seconds_since(t2);

    const auto t3 = std::chrono::steady_clock::now();
    double gap = 0.0;
    for (const InputStream& u : validation) {
        std::size_t washout = default_washout(r);
        if (washout >= u.length())
            throw InvalidInput("approximate_scr: validation stream shorter than the washout " +
                               std::to_string(washout));
        const auto y_ref = run(r, u, washout);
        const auto y_scr = run_scr(scr, u, washout);
        gap = std::max(gap, output_distance(y_ref, y_scr));
    }
    rep.empirical_output_gap = gap;
    rep.seconds_validation = seconds_since(t3);

    if (!(gap < epsilon))
        throw NumericalFailure("approximate_scr: validation gap " + std::to_string(gap) +
                                   " did not stay below epsilon",
                               gap);
    return {scr, rep};
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_report_text(const std::string& path, const ApproximationReport& rep) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "epsilon_requested = " << fmt(rep.epsilon_requested) << "\n";
    out << "delta_dilation = " << fmt(rep.delta_dilation) << "\n";
    out << "delta_cyclic = " << fmt(rep.delta_cyclic) << "\n";
    out << "delta_binarize = " << fmt(rep.delta_binarize) << "\n";
    out << "order = " << rep.order << "\n";
    out << "n_u = " << rep.n_u << "\n";
    out << "n_c = " << rep.n_c << "\n";
    out << "n_theory = " << rep.n_theory << "\n";
    out << "k = " << rep.k << "\n";
    out << "n_avg = " << rep.n_avg << "\n";
    out << "empirical_output_gap = " << fmt(rep.empirical_output_gap) << "\n";
    out << "seconds_dilation = " << fmt(rep.seconds_dilation) << "\n";
    out << "seconds_cyclic = " << fmt(rep.seconds_cyclic) << "\n";
    out << "seconds_binarize = " << fmt(rep.seconds_binarize) << "\n";
    out << "seconds_validation = " << fmt(rep.seconds_validation) << "\n";
}

void write_report_csv(const std::string& path, const ApproximationReport& rep) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "epsilon_requested,delta_dilation,delta_cyclic,delta_binarize,order,n_u,n_c,"
           "n_theory,k,n_avg,empirical_output_gap\n";
    out << fmt(rep.epsilon_requested) << ',' << fmt(rep.delta_dilation) << ','
        << fmt(rep.delta_cyclic) << ',' << fmt(rep.delta_binarize) << ',' << rep.order << ','
        << rep.n_u << ',' << rep.n_c << ',' << rep.n_theory << ',' << rep.k << ',' << rep.n_avg
        << ',' << fmt(rep.empirical_output_gap) << "\n";
}

} // namespace scr
