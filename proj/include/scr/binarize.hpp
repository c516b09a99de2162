#pragma once

#include <string>
#include <vector>

#include "scr/cyclic.hpp"
#include "scr/linalg.hpp"
#include "scr/matrix.hpp"
#include "scr/reservoir.hpp"

namespace scr {

// Averaged sign-matrix decomposition of a real matrix: V is approximated by
// (1/n_avg) * sum_j F_j with every F_j entry in {-1, +1} and gcd(k, n) = 1.
struct Binarization {
    std::size_t k = 0;
    std::size_t n_avg = 0;
    std::vector<Matrix> sign_matrices;
    double max_entry_error = 0.0;
    double op_norm_error = 0.0;
};

// delta is an operator-norm budget; n is the cycle dimension the result will
// ride on (constrains k to be coprime).
Binarization binarize(const Matrix& v, double delta, std::size_t n);

// (1/n_avg) * sum_j F_j.
Matrix binarization_reconstruction(const Binarization& b);

// The nk x nk block matrix with P in the top-right block and P along the
// sub-block-diagonal; a full cycle exactly when gcd(n, k) = 1.
Matrix block_cycle(const CyclePermutation& p, std::size_t k);
// Same permutation as an index map, without the gcd gate (the dichotomy is
// observable: gcd > 1 splits the orbit).
std::vector<std::size_t> block_cycle_perm(std::size_t n, std::size_t k);

// Simple Cycle Reservoir: single ring weight, +-1 input matrix.  The ring is
// stored in the library's one shift convention; the construction relabels
// the block-cycle coordinates along its orbit to get there.
struct SCRSystem {
    std::size_t n_scr = 0;
    double lambda = 0.0;
    CyclePermutation cycle;
    Matrix v_scr;
    LinearReadout readout;
    double input_bound = 0.0;
    // construction metadata
    std::size_t n_c = 0;
    std::size_t k = 0;
    std::size_t n_avg = 0;
};

// Theorem-14 step: binarizes V_C with a state budget of delta and expands the
// ring by the coprime block construction; outputs deviate from the cyclic
// system by at most Lip(readout_C) * delta on admissible streams.
SCRSystem scr_construct(const CyclicApproximation& cyc, double delta);
// Assembly from an existing binarization (used by the pipeline for reporting).
SCRSystem assemble_scr(const CyclicApproximation& cyc, const Binarization& bin);

std::vector<Vec> drive_scr(const SCRSystem& s, const InputStream& u, std::size_t washout);
std::vector<Vec> run_scr(const SCRSystem& s, const InputStream& u, std::size_t washout);

// Dense materialization for desk-scale checks.
LinearReservoir to_reservoir(const SCRSystem& s);

// Directory persistence: manifest, V' as CSV plus a packed sign bitmap
// (bit 1 = +1, row-major, MSB first), readout CSV.
void save_scr(const std::string& dir, const SCRSystem& s);
SCRSystem load_scr(const std::string& dir);

} // namespace scr
