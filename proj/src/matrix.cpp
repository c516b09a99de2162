#include "scr/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scr/errors.hpp"
#include "scr/kernels.hpp"

namespace scr {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw InvalidInput("from_rows: ragged row lengths");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

bool is_finite(const Matrix& m) {
    const double* p = m.data();
    const std::size_t n = m.rows() * m.cols();
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

bool is_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw InvalidInput("matmul: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    kernels::matmul(a, b, out);
    return out;
}

Vec matvec(const Matrix& a, const Vec& x) {
    if (a.cols() != x.size()) throw InvalidInput("matvec: dimension mismatch");
    Vec y(a.rows());
    kernels::matvec(a, x.data(), y.data());
    return y;
}

Vec matvec_transposed(const Matrix& a, const Vec& x) {
    if (a.rows() != x.size()) throw InvalidInput("matvec_transposed: dimension mismatch");
    Vec y(a.cols());
    kernels::matvec_transposed(a, x.data(), y.data());
    return y;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw InvalidInput("add: shape mismatch");
    Matrix out = a;
    const double* pb = b.data();
    double* po = out.data();
    const std::size_t n = a.rows() * a.cols();
    for (std::size_t i = 0; i < n; ++i) po[i] += pb[i];
    return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw InvalidInput("sub: shape mismatch");
    Matrix out = a;
    const double* pb = b.data();
    double* po = out.data();
    const std::size_t n = a.rows() * a.cols();
    for (std::size_t i = 0; i < n; ++i) po[i] -= pb[i];
    return out;
}

Matrix scale(const Matrix& a, double s) {
    Matrix out = a;
    double* po = out.data();
    const std::size_t n = a.rows() * a.cols();
    for (std::size_t i = 0; i < n; ++i) po[i] *= s;
    return out;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw InvalidInput("vstack: column counts differ");
    Matrix out(a.rows() + b.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, j) = b(i, j);
    return out;
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
    return out;
}

Matrix top_rows(const Matrix& a, std::size_t r) {
    if (r > a.rows()) throw InvalidInput("top_rows: too many rows requested");
    Matrix out(r, a.cols());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    return out;
}

Matrix left_cols(const Matrix& a, std::size_t c) {
    if (c > a.cols()) throw InvalidInput("left_cols: too many columns requested");
    Matrix out(a.rows(), c);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < c; ++j) out(i, j) = a(i, j);
    return out;
}

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    const double* p = m.data();
    const std::size_t n = m.rows() * m.cols();
    for (std::size_t i = 0; i < n; ++i) s += p[i] * p[i];
    return std::sqrt(s);
}

double max_abs(const Matrix& m) {
    double s = 0.0;
    const double* p = m.data();
    const std::size_t n = m.rows() * m.cols();
    for (std::size_t i = 0; i < n; ++i) s = std::max(s, std::fabs(p[i]));
    return s;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

Vec vec_sub(const Vec& a, const Vec& b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    char buf[64];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw Error("bad numeric cell at line " + std::to_string(lineno) + " in " + path);
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error("ragged CSV at line " + std::to_string(lineno) + " in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

} // namespace scr
