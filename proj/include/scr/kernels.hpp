#pragma once

#include "scr/matrix.hpp"

// Data-parallel kernels behind the Matrix operations.  The parallel versions
// partition work by output row, so every output element is accumulated in the
// same order as in the serial reference; results are bit-identical for any
// thread count.  scr::serial keeps the plain loops for testing and for the
// kernel benchmark.

namespace scr::serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matvec(const Matrix& a, const double* x, double* y);
void matvec_transposed(const Matrix& a, const double* x, double* y);

} // namespace scr::serial

namespace scr::kernels {

void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matvec(const Matrix& a, const double* x, double* y);
void matvec_transposed(const Matrix& a, const double* x, double* y);

} // namespace scr::kernels
