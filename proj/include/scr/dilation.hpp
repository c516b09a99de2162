#pragma once

#include <cstddef>
#include <utility>

#include "scr/matrix.hpp"
#include "scr/reservoir.hpp"

namespace scr {

// Order and tolerance of an orthogonal dilation: the truncation error bound
// 2 M ||V|| lambda^{N+1} / (1 - lambda) stays strictly below delta_state.
struct DilationPlan {
    std::size_t order = 0;       // N
    double delta_state = 0.0;    // state-space tolerance
    std::size_t n_dilated = 0;   // (N+1) * n
};

// Smallest N >= 1 with 2 * M * v_norm * lambda^{N+1} / (1 - lambda) < delta.
std::size_t choose_order(double lambda, double input_bound, double v_norm, double delta);

// Orthogonal dilation of a contraction W1 (||W1|| <= 1 + 1e-12): the
// (N+1)n x (N+1)n block matrix with W1 in the corner, defect operators
// D_W, D_{W^T} coupling it to a shift register.  The upper-left n x n block
// of U^k equals W1^k for all 1 <= k <= N.
Matrix egervary_dilation(const Matrix& w1, std::size_t order);

// Replaces the coupling of R by lambda * U with U orthogonal, keeping the
// outputs within readout-Lipschitz * delta of the original on any admissible
// stream.  V' = [V; 0], h' = h composed with the projection onto the first
// n coordinates.
std::pair<LinearReservoir, DilationPlan> dilate_system(const LinearReservoir& r, double delta);

} // namespace scr
