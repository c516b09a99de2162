#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scr/matrix.hpp"

namespace scr {

// ---------------------------------------------------------------------------
// Norms and factorizations
// ---------------------------------------------------------------------------

// Largest singular value.  Dense symmetric eigensolve of the Gram matrix up
// to dimension 512, power iteration on M^T M above that.
double operator_norm(const Matrix& m);

// Symmetric eigendecomposition (cyclic Jacobi).  Values ascending, vectors in
// matching column order, A = V diag(values) V^T.
struct SymmetricEigen {
    Matrix vectors;
    Vec values;
};
SymmetricEigen jacobi_eigh(const Matrix& a);

// One-sided Jacobi SVD of a square matrix: a = u diag(sigma) v^T with u, v
// orthogonal and sigma >= 0.  u is completed to a full basis even when a is
// rank deficient, and u/v stay mutually consistent on (near-)zero singular
// values; the Egervary construction relies on that consistency.
struct Svd {
    Matrix u;
    Vec sigma;
    Matrix v;
};
Svd svd_square(const Matrix& a);

// Symmetric PSD square root with eigenvalue clamping at -1e-10.
Matrix psd_sqrt(const Matrix& m);

// Haar-distributed orthogonal matrix: QR of a standard Gaussian sample with
// the R diagonal signs fixed positive.  Deterministic in the seed.
Matrix random_orthogonal(std::size_t n, std::uint64_t seed);

// Real Schur decomposition a = q t q^T with t quasi-upper-triangular
// (Householder reduction to Hessenberg form, then Francis double-shift QR).
struct SchurResult {
    Matrix t;
    Matrix q;
};
SchurResult real_schur(const Matrix& a);

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

// The library-wide cycle convention: sigma(i) = i+1 mod n, i.e. the induced
// matrix P has (Px)_i = x_{i+1 mod n}.
struct CyclePermutation {
    std::size_t size = 0;
};

Matrix cycle_matrix(std::size_t n);

// True iff P is a permutation matrix (0/1 within 1e-12) realizing a single
// n-cycle.  Never throws for non-permutations; the overload reports why.
bool is_full_cycle(const Matrix& p);
bool is_full_cycle(const Matrix& p, std::string* diagnostic);

// Same test on a permutation given as an index map sigma.
bool is_full_cycle_perm(const std::vector<std::size_t>& sigma);

// ---------------------------------------------------------------------------
// Canonical form of an orthogonal matrix
// ---------------------------------------------------------------------------

// S^T C S = blockdiag(R_theta_1, ..., R_theta_k, I_plus, -I_minus) with the
// rotation angles sorted ascending and strictly inside (0, pi).  Eigenvalues
// closer than 1e-9 to +-1 are counted into plus_count/minus_count instead of
// producing a boundary angle.  residual = ||S^T C S - T|| in operator norm.
struct CanonicalForm {
    Matrix basis;
    std::vector<double> angles;
    std::size_t plus_count = 0;
    std::size_t minus_count = 0;
    double residual = 0.0;
};

CanonicalForm canonical_form(const Matrix& c, double tol);

// Block diagonal reconstruction from a canonical form description.
Matrix canonical_block_matrix(const std::vector<double>& angles,
                              std::size_t plus_count, std::size_t minus_count);

// 2x2 rotation by theta: [[cos, -sin], [sin, cos]].
Matrix rotation2(double theta);

} // namespace scr
