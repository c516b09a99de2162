#pragma once

// Test-only oracles, deliberately independent of the library's computation
// paths: characteristic-polynomial eigenvalues (Faddeev-LeVerrier +
// Durand-Kerner), plain power iteration, Gaussian elimination, brute-force
// root matching, and truncated-series reservoir states.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "scr/matrix.hpp"
#include "scr/reservoir.hpp"
#include "scr/rng.hpp"

namespace oracle {

using scr::Matrix;
using scr::Vec;
using Complex = std::complex<double>;

// Characteristic polynomial coefficients via Faddeev-LeVerrier:
// p(z) = z^n + c[1] z^{n-1} + ... + c[n].
inline std::vector<double> char_poly(const Matrix& a) {
    const std::size_t n = a.rows();
    std::vector<double> c(n + 1, 0.0);
    c[0] = 1.0;
    Matrix m = Matrix::identity(n); // M_0 = I
    for (std::size_t k = 1; k <= n; ++k) {
        const Matrix am = scr::matmul(a, m);
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
        c[k] = -tr / static_cast<double>(k);
        m = am;
        for (std::size_t i = 0; i < n; ++i) m(i, i) += c[k];
    }
    return c;
}

// All complex roots by Durand-Kerner iteration.
inline std::vector<Complex> poly_roots(const std::vector<double>& coeff) {
    const std::size_t n = coeff.size() - 1;
    auto eval = [&](Complex z) {
        Complex acc(0.0, 0.0);
        for (double c : coeff) acc = acc * z + c;
        return acc;
    };
    std::vector<Complex> z(n);
    const Complex base(0.4, 0.9);
    Complex pw(1.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        pw *= base;
        z[i] = pw;
    }
    for (int it = 0; it < 600; ++it) {
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Complex denom(1.0, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            const Complex step = eval(z[i]) / denom;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    return z;
}

inline std::vector<Complex> eigenvalues(const Matrix& a) { return poly_roots(char_poly(a)); }

// Greedy multiset comparison: every left value must find an unused right
// value within tol.
inline bool multiset_close(std::vector<Complex> a, std::vector<Complex> b, double tol) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const Complex& x : a) {
        double best = 1e300;
        std::size_t best_j = b.size();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(x - b[j]);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        if (best_j == b.size() || best > tol) return false;
        used[best_j] = true;
    }
    return true;
}

// Largest singular value by plain power iteration on M^T M.
inline double operator_norm_power(const Matrix& m, int iters = 20000) {
    const Matrix g = scr::matmul(scr::transpose(m), m);
    const std::size_t n = g.rows();
    scr::Rng rng(12345);
    Vec v(n);
    for (double& x : v) x = rng.gaussian();
    double nv = scr::norm2(v);
    for (double& x : v) x /= nv;
    double lam = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vec w = scr::matvec(g, v);
        lam = scr::dot(v, w);
        const double nw = scr::norm2(w);
        if (nw == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    }
    return std::sqrt(std::max(0.0, lam));
}

// Brute-force root matching: can every angle take a distinct interior root of
// unity of order n_prime within delta (strict)?
inline bool brute_force_matchable(const std::vector<double>& angles, std::size_t n_prime,
                                  double delta) {
    const std::size_t k = angles.size();
    std::vector<std::vector<std::size_t>> cand(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t a = 1; a < n_prime / 2; ++a) {
            const double beta =
                2.0 * 3.14159265358979323846 * static_cast<double>(a) / n_prime;
            if (std::abs(Complex(std::cos(angles[i]), std::sin(angles[i])) -
                         Complex(std::cos(beta), std::sin(beta))) < delta)
                cand[i].push_back(a);
        }
    }
    std::vector<bool> taken(n_prime / 2, false);
    std::function<bool(std::size_t)> rec = [&](std::size_t i) {
        if (i == k) return true;
        for (std::size_t a : cand[i]) {
            if (taken[a]) continue;
            taken[a] = true;
            if (rec(i + 1)) return true;
            taken[a] = false;
        }
        return false;
    };
    return rec(0);
}

// x_t = sum_{j=0}^{t} W^j V u_{t-j}, evaluated literally.
inline std::vector<Vec> truncated_series_states(const Matrix& w, const Matrix& v,
                                                const std::vector<Vec>& inputs) {
    const std::size_t n = w.rows();
    std::vector<Matrix> powers{Matrix::identity(n)};
    for (std::size_t j = 1; j < inputs.size(); ++j)
        powers.push_back(scr::matmul(w, powers.back()));
    std::vector<Vec> states;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        Vec x(n, 0.0);
        for (std::size_t j = 0; j <= t; ++j) {
            const Vec term = scr::matvec(powers[j], scr::matvec(v, inputs[t - j]));
            for (std::size_t i = 0; i < n; ++i) x[i] += term[i];
        }
        states.push_back(std::move(x));
    }
    return states;
}

// Dense linear solve by Gaussian elimination with partial pivoting.
inline Matrix gauss_solve(Matrix a, Matrix b) {
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
        }
        const double d = a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / d;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(r, j) -= f * b(col, j);
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = b(col, j);
            for (std::size_t r = col + 1; r < n; ++r) s -= a(col, r) * b(r, j);
            b(col, j) = s / a(col, col);
        }
    }
    return b;
}

// Random permutation matrix with a prescribed cycle type (ground truth by
// construction).
inline Matrix permutation_with_cycles(const std::vector<std::size_t>& cycle_lengths,
                                      std::uint64_t seed) {
    std::size_t n = 0;
    for (std::size_t c : cycle_lengths) n += c;
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i;
    scr::Rng rng(seed);
    for (std::size_t i = n; i-- > 1;)
        std::swap(labels[i], labels[rng.next_u64() % (i + 1)]);
    std::vector<std::size_t> sigma(n);
    std::size_t at = 0;
    for (std::size_t c : cycle_lengths) {
        for (std::size_t i = 0; i < c; ++i)
            sigma[labels[at + i]] = labels[at + (i + 1) % c];
        at += c;
    }
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) p(i, sigma[i]) = 1.0;
    return p;
}

inline Matrix random_contraction(std::size_t n, double target_norm, std::uint64_t seed) {
    scr::Rng rng(seed);
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w(i, j) = rng.gaussian();
    const double nrm = operator_norm_power(w, 2000);
    return scr::scale(w, target_norm / nrm);
}

} // namespace oracle
