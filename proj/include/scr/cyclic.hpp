#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "scr/matrix.hpp"
#include "scr/reservoir.hpp"

namespace scr {

// ---------------------------------------------------------------------------
// Root-of-unity matching (bipartite maximum matching over angle windows)
// ---------------------------------------------------------------------------

// Assignment of canonical-form angles to distinct cycle eigenvalue angles
// 2*pi*a/n_prime with |e^{i theta} - e^{2 pi i a / n_prime}| < delta.
struct RootMatching {
    std::size_t n_prime = 0;
    std::vector<double> angles;
    std::vector<std::size_t> roots; // assigned integers, parallel to angles
    double delta = 0.0;
};

// Smallest l0 with pi/l0 < arccos(1 - delta^2/2); 2 for delta >= 2.
std::size_t l0_bound(double delta);

// n1 = 2 * l0(delta) * (k + 1), the guaranteed-feasible cycle dimension.
std::size_t theoretical_dimension(std::size_t k, double delta);

// Full matching of the angles into distinct interior roots of unity of order
// n_prime, or nullopt when the maximum matching is smaller (Hopcroft-Karp).
std::optional<RootMatching> match_roots(const std::vector<double>& angles, std::size_t n_prime,
                                        double delta);

// Smallest even n' >= max(2 len(angles) + 2, 4) admitting a full matching;
// exhaustive upward search, so the minimum is exact.
std::pair<std::size_t, RootMatching> min_cycle_dimension(const std::vector<double>& angles,
                                                         double delta);

// Completion block D: rotations for every unmatched interior root, followed
// by diag(1, -1).
Matrix build_completion(const RootMatching& matching);

// ---------------------------------------------------------------------------
// Fourier basis of the cycle
// ---------------------------------------------------------------------------

// Explicit orthogonal basis J with J^T cycle_matrix(n) J = T_C where
// T_C = blockdiag(R_{2 pi/n}, ..., R_{2 pi (n/2-1)/n}, 1, -1).  Rotation a
// occupies columns (2a-2, 2a-1): scaled sine then cosine column; the last
// two columns are the constant and alternating vectors.
struct CycleBasis {
    Matrix j;
};
CycleBasis cycle_canonical_basis(std::size_t n);

// Ideal canonical form of the n-cycle used above.
Matrix cycle_block_form(std::size_t n);

// ---------------------------------------------------------------------------
// Orthogonal matrix -> full-cycle permutation embedding (up to completion)
// ---------------------------------------------------------------------------

struct OrthogonalCycleEmbedding {
    std::size_t n_c = 0;            // cycle dimension
    std::size_t n_input = 0;        // dimension of U after any parity padding
    bool padded = false;            // one +-1 direction appended to U
    int pad_sign = 0;               // eigenvalue of the padded direction (0 when unpadded)
    bool exact_pair = false;        // lone (+1, -1) pair mapped onto the cycle's own
    std::vector<double> grouped_angles;
    RootMatching matching;
    Matrix basis_u;                 // grouped canonical basis of (padded) U
    Matrix completion;              // D, size (n_c - n_input)
    Matrix transform;               // G orthogonal with G^T C G = (J_U A0 J_U^T) ⊕ D
    std::size_t theoretical_bound = 0;
    double delta = 0.0;
};

// Theorem-8 style construction: ||G^T C G - (U ⊕ D)|| < delta with C the
// n_c-cycle.  delta here is the root-matching tolerance.
OrthogonalCycleEmbedding approximate_orthogonal(const Matrix& u, double delta);

// ---------------------------------------------------------------------------
// Cyclic approximation of a reservoir with orthogonal coupling
// ---------------------------------------------------------------------------

struct CyclicApproximation {
    std::size_t n_c = 0;
    double lambda = 0.0;
    Matrix transform;               // P, orthogonal n_c x n_c
    Matrix v_c;                     // P [V_U; 0]
    LinearReadout readout_c;        // h_U ∘ projection ∘ P^T
    std::size_t theoretical_bound = 0; // n1
    double state_tolerance = 0.0;
    double input_bound = 0.0;
    double delta_zero = 0.0;        // perturbation budget delta_0
    double delta_match = 0.0;       // min(delta, delta_0) / lambda
    std::size_t n_u = 0;            // dimension of the system that was approximated
};

// Replaces the coupling lambda*U by lambda*cycle_matrix(n_c); the states of
// the result, mapped back through P^T and truncated, stay within delta of the
// original states on any admissible stream.
CyclicApproximation cyclic_approximate(const LinearReservoir& r_u, double delta);

// Shift-based state recursion for (lambda * cycle, V_C); O(n_c) per step.
std::vector<Vec> drive_cyclic(const CyclicApproximation& c, const InputStream& u,
                              std::size_t washout);
std::vector<Vec> run_cyclic(const CyclicApproximation& c, const InputStream& u,
                            std::size_t washout);

// Dense materialization (test/desk scale).
LinearReservoir to_reservoir(const CyclicApproximation& c);

} // namespace scr
