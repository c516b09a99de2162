#include "scr/kernels.hpp"

#include <cstring>

namespace scr::serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double* oi = out.row(i);
        std::memset(oi, 0, m * sizeof(double));
        const double* ai = a.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            if (aip == 0.0) continue;
            const double* bp = b.row(p);
            for (std::size_t j = 0; j < m; ++j) oi[j] += aip * bp[j];
        }
    }
}

void matvec(const Matrix& a, const double* x, double* y) {
    const std::size_t n = a.rows(), k = a.cols();
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a.row(i);
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += ai[p] * x[p];
        y[i] = s;
    }
}

void matvec_transposed(const Matrix& a, const double* x, double* y) {
    const std::size_t n = a.rows(), k = a.cols();
    // y_j = sum_i a(i,j) x_i, accumulated in ascending i like the parallel kernel.
    for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * a(i, j);
        y[j] = s;
    }
}

} // namespace scr::serial

namespace scr::kernels {

namespace {
// Below this many multiply-adds the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelCutoff = 1u << 15;
} // namespace

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    const bool par = n * k * m >= kParallelCutoff && n > 1;
#pragma omp parallel for schedule(static) if (par)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double* oi = out.row(i);
        std::memset(oi, 0, m * sizeof(double));
        const double* ai = a.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            if (aip == 0.0) continue;
            const double* bp = b.row(p);
            for (std::size_t j = 0; j < m; ++j) oi[j] += aip * bp[j];
        }
    }
}

void matvec(const Matrix& a, const double* x, double* y) {
    const std::size_t n = a.rows(), k = a.cols();
    const bool par = n * k >= kParallelCutoff && n > 1;
#pragma omp parallel for schedule(static) if (par)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double* ai = a.row(i);
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += ai[p] * x[p];
        y[i] = s;
    }
}

void matvec_transposed(const Matrix& a, const double* x, double* y) {
    const std::size_t n = a.rows(), k = a.cols();
    const bool par = n * k >= kParallelCutoff && k > 1;
    // Parallel over output elements; each y_j walks its own column, which
    // matches the serial accumulation order element by element.
#pragma omp parallel for schedule(static) if (par)
    for (long long jj = 0; jj < static_cast<long long>(k); ++jj) {
        const std::size_t j = static_cast<std::size_t>(jj);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * a(i, j);
        y[j] = s;
    }
}

} // namespace scr::kernels
