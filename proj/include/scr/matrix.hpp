#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace scr {

using Vec = std::vector<double>;

// Dense real matrix, row-major storage.  The one carrier type for couplings,
// input maps, bases and transforms throughout the library.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    Vec col(std::size_t j) const {
        Vec out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
        return out;
    }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

bool is_finite(const Matrix& m);
bool is_finite(const Vec& v);

Matrix transpose(const Matrix& m);
Matrix matmul(const Matrix& a, const Matrix& b);
Vec matvec(const Matrix& a, const Vec& x);
// y = a^T x without materializing the transpose.
Vec matvec_transposed(const Matrix& a, const Vec& x);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

// Stacks b below a (equal column counts).
Matrix vstack(const Matrix& a, const Matrix& b);
// Block diagonal [a 0; 0 b]; either block may be empty.
Matrix direct_sum(const Matrix& a, const Matrix& b);
// First r rows / first c columns as a copy.
Matrix top_rows(const Matrix& a, std::size_t r);
Matrix left_cols(const Matrix& a, std::size_t c);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
Vec vec_sub(const Vec& a, const Vec& b);

// CSV persistence: one row per line, '.' decimal separator, no header.
// Values are written with enough digits to round-trip doubles exactly.
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

} // namespace scr
