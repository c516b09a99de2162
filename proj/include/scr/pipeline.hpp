#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scr/binarize.hpp"
#include "scr/cyclic.hpp"
#include "scr/dilation.hpp"
#include "scr/reservoir.hpp"

namespace scr {

// Machine-readable record of one full approximation run.
struct ApproximationReport {
    double epsilon_requested = 0.0;
    double delta_dilation = 0.0;   // state tolerances per stage
    double delta_cyclic = 0.0;
    double delta_binarize = 0.0;
    std::size_t order = 0;         // N
    std::size_t n_u = 0;           // (N+1) * n
    std::size_t n_c = 0;
    std::size_t n_theory = 0;      // n1
    std::size_t k = 0;
    std::size_t n_avg = 0;
    double empirical_output_gap = 0.0;
    // Wall clock; excluded from the CSV payload so runs stay bit-reproducible.
    double seconds_dilation = 0.0;
    double seconds_cyclic = 0.0;
    double seconds_binarize = 0.0;
    double seconds_validation = 0.0;
};

// Output-tolerance split across dilation / cyclic / binarize, as fractions of
// epsilon.  Each fraction is converted to a state tolerance through the
// corresponding composed readout's Lipschitz constant.
struct EpsilonBudget {
    double dilation = 0.5;
    double cyclic = 0.25;
    double binarize = 0.25;
};

// Theorem-14 composition: dilate -> cyclic approximate -> binarize, validated
// against every supplied stream.  The empirical output gap must come in below
// epsilon or the run fails.
std::pair<SCRSystem, ApproximationReport> approximate_scr(
    const LinearReservoir& r, double epsilon, const std::vector<InputStream>& validation,
    const EpsilonBudget& budget = {});

// Default validation set: 20 i.i.d. uniform streams at the input bound,
// length 500.
std::vector<InputStream> default_validation_streams(const LinearReservoir& r,
                                                    std::uint64_t seed, std::size_t count = 20,
                                                    std::size_t length = 500);

// Flat key-value text (includes wall clock) and a one-row CSV (deterministic
// payload only).
void write_report_text(const std::string& path, const ApproximationReport& rep);
void write_report_csv(const std::string& path, const ApproximationReport& rep);

} // namespace scr
