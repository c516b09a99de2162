#include "scr/linalg.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

#include "scr/errors.hpp"
#include "scr/rng.hpp"

namespace scr {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sign_of(double v, double s) { return s >= 0.0 ? std::fabs(v) : -std::fabs(v); }

} // namespace

Matrix rotation2(double theta) {
    Matrix r(2, 2);
    r(0, 0) = std::cos(theta);
    r(0, 1) = -std::sin(theta);
    r(1, 0) = std::sin(theta);
    r(1, 1) = std::cos(theta);
    return r;
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition: cyclic Jacobi with Rutishauser rotations.
// ---------------------------------------------------------------------------

SymmetricEigen jacobi_eigh(const Matrix& a) {
    if (a.rows() != a.cols()) throw InvalidInput("jacobi_eigh: matrix not square");
    if (!is_finite(a)) throw InvalidInput("jacobi_eigh: non-finite entries");
    const std::size_t n = a.rows();

    // Work on the symmetrized copy; callers pass symmetric matrices up to rounding.
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = 0.5 * (a(i, j) + a(j, i));
    Matrix v = Matrix::identity(n);

    const double scale = frobenius_norm(b);
    const double stop = scale * 1e-15 + 1e-300;

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += b(p, q) * b(p, q);
        if (std::sqrt(off) <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = b(p, q);
                if (std::fabs(apq) <= stop / (double)(n * n + 1)) continue;
                const double zeta = (b(q, q) - b(p, p)) / (2.0 * apq);
                double t;
                if (std::fabs(zeta) > 1e15) {
                    t = 1.0 / (2.0 * zeta);
                } else {
                    t = sign_of(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    const double bip = b(i, p), biq = b(i, q);
                    b(i, p) = c * bip - s * biq;
                    b(i, q) = s * bip + c * biq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double bpj = b(p, j), bqj = b(q, j);
                    b(p, j) = c * bpj - s * bqj;
                    b(q, j) = s * bpj + c * bqj;
                }
                b(p, q) = 0.0;
                b(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return b(i, i) < b(j, j); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = b(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD (square matrices).
// ---------------------------------------------------------------------------

Svd svd_square(const Matrix& a) {
    if (a.rows() != a.cols()) throw InvalidInput("svd_square: matrix not square");
    if (!is_finite(a)) throw InvalidInput("svd_square: non-finite entries");
    const std::size_t n = a.rows();

    Matrix g = a;
    Matrix v = Matrix::identity(n);

    for (int sweep = 0; sweep < 60; ++sweep) {
        bool converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += g(i, p) * g(i, p);
                    beta += g(i, q) * g(i, q);
                    gamma += g(i, p) * g(i, q);
                }
                if (std::fabs(gamma) <= 1e-15 * std::sqrt(alpha * beta) + 1e-300) continue;
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    sign_of(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double gip = g(i, p), giq = g(i, q);
                    g(i, p) = c * gip - s * giq;
                    g(i, q) = s * gip + c * giq;
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
        if (converged) break;
    }

    Svd out;
    out.sigma.resize(n);
    out.u = Matrix(n, n);
    out.v = v;

    double smax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += g(i, j) * g(i, j);
        out.sigma[j] = std::sqrt(s);
        smax = std::max(smax, out.sigma[j]);
    }

    const double rank_tol = smax * (double)n * 16.0 * DBL_EPSILON;
    std::vector<bool> have(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        if (out.sigma[j] > rank_tol) {
            for (std::size_t i = 0; i < n; ++i) out.u(i, j) = g(i, j) / out.sigma[j];
            have[j] = true;
        }
    }

    // Complete null-space columns of u against the accepted ones (twice-run MGS
    // over the standard basis, deterministic candidate order).
    for (std::size_t j = 0; j < n; ++j) {
        if (have[j]) continue;
        Vec best;
        double best_norm = -1.0;
        for (std::size_t cand = 0; cand < n; ++cand) {
            Vec w(n, 0.0);
            w[cand] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t c = 0; c < n; ++c) {
                    if (!have[c]) continue;
                    double proj = 0.0;
                    for (std::size_t i = 0; i < n; ++i) proj += w[i] * out.u(i, c);
                    for (std::size_t i = 0; i < n; ++i) w[i] -= proj * out.u(i, c);
                }
            }
            const double nw = norm2(w);
            if (nw > best_norm) {
                best_norm = nw;
                best = std::move(w);
            }
            if (best_norm > 0.9) break;
        }
        for (std::size_t i = 0; i < n; ++i) out.u(i, j) = best[i] / best_norm;
        have[j] = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Operator norm
// ---------------------------------------------------------------------------

namespace {

double power_iteration_gram(const Matrix& g) {
    const std::size_t n = g.rows();
    Rng rng(0x9e3779b97f4a7c15ull);
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = rng.gaussian();
    double nv = norm2(v);
    for (std::size_t i = 0; i < n; ++i) v[i] /= nv;

    double lam_prev = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Vec w = matvec(g, v);
        const double lam = dot(v, w);
        const double nw = norm2(w);
        if (nw == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
        if (std::fabs(lam - lam_prev) <= 1e-12 * std::max(std::fabs(lam), 1.0)) {
            return std::sqrt(std::max(0.0, lam));
        }
        lam_prev = lam;
    }
    return std::sqrt(std::max(0.0, lam_prev));
}

} // namespace

double operator_norm(const Matrix& m) {
    if (!is_finite(m)) throw InvalidInput("operator_norm: non-finite entries");
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    if (m.rows() == 1 || m.cols() == 1) {
        // A single row/column: the operator norm is the Euclidean norm.
        double s = 0.0;
        const double* p = m.data();
        for (std::size_t i = 0; i < m.rows() * m.cols(); ++i) s += p[i] * p[i];
        return std::sqrt(s);
    }
    // Gram matrix on the smaller side; its top eigenvalue is the squared norm.
    Matrix gram = (m.cols() <= m.rows()) ? matmul(transpose(m), m) : matmul(m, transpose(m));
    if (gram.rows() <= 512) {
        const SymmetricEigen eig = jacobi_eigh(gram);
        return std::sqrt(std::max(0.0, eig.values.back()));
    }
    return power_iteration_gram(gram);
}

// ---------------------------------------------------------------------------
// PSD square root
// ---------------------------------------------------------------------------

Matrix psd_sqrt(const Matrix& m) {
    if (m.rows() != m.cols()) throw InvalidInput("psd_sqrt: matrix not square");
    if (!is_finite(m)) throw InvalidInput("psd_sqrt: non-finite entries");
    const std::size_t n = m.rows();
    const double scale = std::max(1.0, max_abs(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(m(i, j) - m(j, i)) > 1e-10 * scale)
                throw InvalidInput("psd_sqrt: matrix not symmetric within 1e-10");

    SymmetricEigen eig = jacobi_eigh(m);
    for (double& lam : eig.values) {
        if (lam < -1e-10)
            throw InvalidInput("psd_sqrt: matrix significantly indefinite (eigenvalue " +
                               std::to_string(lam) + ")");
        if (lam < 0.0) lam = 0.0;
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += eig.vectors(i, k) * std::sqrt(eig.values[k]) * eig.vectors(j, k);
            out(i, j) = s;
        }
    }
    // Exact symmetry for downstream checks.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (out(i, j) + out(j, i));
            out(i, j) = v;
            out(j, i) = v;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Haar-random orthogonal matrices
// ---------------------------------------------------------------------------

Matrix random_orthogonal(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidInput("random_orthogonal: n must be >= 1");
    Rng rng(seed);
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.gaussian();

    // Householder QR, accumulating Q explicitly.
    Matrix q = Matrix::identity(n);
    Vec v(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double scale = 0.0;
        for (std::size_t i = k; i < n; ++i) scale += std::fabs(g(i, k));
        if (scale == 0.0) continue;
        double nrm = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            v[i] = g(i, k) / scale;
            nrm += v[i] * v[i];
        }
        nrm = std::sqrt(nrm);
        const double sigma = sign_of(nrm, v[k]);
        v[k] += sigma;
        const double tau = 1.0 / (sigma * v[k]);

        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += v[i] * g(i, j);
            s *= tau;
            for (std::size_t i = k; i < n; ++i) g(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k; j < n; ++j) s += q(i, j) * v[j];
            s *= tau;
            for (std::size_t j = k; j < n; ++j) q(i, j) -= s * v[j];
        }
    }
    // Fix the sign convention: R diagonal positive makes the map Haar.
    for (std::size_t j = 0; j < n; ++j) {
        if (g(j, j) < 0.0)
            for (std::size_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Real Schur decomposition: Householder Hessenberg + Francis double-shift QR.
// ---------------------------------------------------------------------------

namespace {

void hessenberg_reduce(Matrix& h, Matrix& z) {
    const std::size_t n = h.rows();
    Vec v(n, 0.0);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale += std::fabs(h(i, k));
        if (scale == 0.0) continue;
        double nrm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = h(i, k) / scale;
            nrm += v[i] * v[i];
        }
        nrm = std::sqrt(nrm);
        const double sigma = sign_of(nrm, v[k + 1]);
        v[k + 1] += sigma;
        const double tau = 1.0 / (sigma * v[k + 1]);

        // H <- P H (rows k+1..n-1), then H <- H P (cols k+1..n-1), then Z <- Z P.
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * h(i, j);
            s *= tau;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
            s *= tau;
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * v[j];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += z(i, j) * v[j];
            s *= tau;
            for (std::size_t j = k + 1; j < n; ++j) z(i, j) -= s * v[j];
        }
        // The reflector maps the pivot column onto -sigma*scale exactly.
        h(k + 1, k) = -sigma * scale;
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
}

// Rotates a converged trailing 2x2 block with real eigenvalues into upper
// triangular form (hqr2's "two roots found" branch); complex pairs stay.
void resolve_2x2(Matrix& h, Matrix& z, long en) {
    const long na = en - 1;
    const long n = static_cast<long>(h.rows());
    const double x = h(en, en);
    const double y = h(na, na);
    const double w = h(en, na) * h(na, en);
    const double p0 = (y - x) / 2.0;
    const double q0 = p0 * p0 + w;
    if (q0 < 0.0) return; // complex pair: keep the block

    double zz = std::sqrt(q0);
    zz = p0 + sign_of(zz, p0);
    const double xs = h(en, na);
    if (xs == 0.0 && zz == 0.0) return; // already diagonal
    const double s = std::fabs(xs) + std::fabs(zz);
    double p = xs / s, q = zz / s;
    const double r = std::sqrt(p * p + q * q);
    p /= r;
    q /= r;
    for (long j = na; j < n; ++j) {
        const double t = h(na, j);
        h(na, j) = q * t + p * h(en, j);
        h(en, j) = q * h(en, j) - p * t;
    }
    for (long i = 0; i <= en; ++i) {
        const double t = h(i, na);
        h(i, na) = q * t + p * h(i, en);
        h(i, en) = q * h(i, en) - p * t;
    }
    for (long i = 0; i < n; ++i) {
        const double t = z(i, na);
        z(i, na) = q * t + p * z(i, en);
        z(i, en) = q * z(i, en) - p * t;
    }
    h(en, na) = 0.0;
}

void francis_iterate(Matrix& h, Matrix& z) {
    const long n = static_cast<long>(h.rows());
    double anorm = 0.0;
    for (long i = 0; i < n; ++i)
        for (long j = std::max(i - 1, 0l); j < n; ++j) anorm += std::fabs(h(i, j));
    if (anorm == 0.0) return;

    long en = n - 1;
    long itn = 40 * n;
    while (en >= 0) {
        int its = 0;
        for (;;) {
            // Look for a single negligible subdiagonal element.
            long l = 0;
            for (long ll = en; ll >= 1; --ll) {
                double s = std::fabs(h(ll - 1, ll - 1)) + std::fabs(h(ll, ll));
                if (s == 0.0) s = anorm;
                if (std::fabs(h(ll, ll - 1)) <= DBL_EPSILON * s) {
                    h(ll, ll - 1) = 0.0;
                    l = ll;
                    break;
                }
            }
            if (l == en) {
                en -= 1;
                break;
            }
            if (l == en - 1) {
                resolve_2x2(h, z, en);
                en -= 2;
                break;
            }
            if (itn-- <= 0)
                throw NumericalFailure("real_schur: QR iteration budget exhausted", anorm);

            double x = h(en, en);
            double y = h(en - 1, en - 1);
            double w = h(en, en - 1) * h(en - 1, en);
            if (its == 10 || its == 20) {
                // Exceptional shift values; the matrix itself is not modified.
                const double s = std::fabs(h(en, en - 1)) + std::fabs(h(en - 1, en - 2));
                x = 0.75 * s + h(en, en);
                y = h(en, en);
                w = -0.4375 * s * s;
            }
            ++its;

            // Look for two consecutive small subdiagonal elements.
            long m = l;
            double p = 0.0, q = 0.0, r = 0.0;
            for (m = en - 2; m >= l; --m) {
                const double zz = h(m, m);
                const double rr = x - zz;
                const double ss = y - zz;
                p = (rr * ss - w) / h(m + 1, m) + h(m, m + 1);
                q = h(m + 1, m + 1) - zz - rr - ss;
                r = h(m + 2, m + 1);
                const double sc = std::fabs(p) + std::fabs(q) + std::fabs(r);
                p /= sc;
                q /= sc;
                r /= sc;
                if (m == l) break;
                const double tst = std::fabs(p) * (std::fabs(h(m - 1, m - 1)) + std::fabs(zz) +
                                                   std::fabs(h(m + 1, m + 1)));
                if (std::fabs(h(m, m - 1)) * (std::fabs(q) + std::fabs(r)) <= DBL_EPSILON * tst)
                    break;
            }
            for (long i = m + 2; i <= en; ++i) {
                h(i, i - 2) = 0.0;
                if (i > m + 2) h(i, i - 3) = 0.0;
            }

            // Double QR sweep on rows/columns m..en.
            for (long k = m; k <= en - 1; ++k) {
                const bool notlast = (k != en - 1);
                double xsc = 1.0;
                if (k != m) {
                    p = h(k, k - 1);
                    q = h(k + 1, k - 1);
                    r = notlast ? h(k + 2, k - 1) : 0.0;
                    xsc = std::fabs(p) + std::fabs(q) + std::fabs(r);
                    if (xsc == 0.0) continue;
                    p /= xsc;
                    q /= xsc;
                    r /= xsc;
                }
                const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                if (s == 0.0) continue;
                if (k != m) {
                    h(k, k - 1) = -s * xsc;
                    h(k + 1, k - 1) = 0.0;
                    if (notlast) h(k + 2, k - 1) = 0.0;
                } else if (l != m) {
                    h(k, k - 1) = -h(k, k - 1);
                }
                p += s;
                const double xx = p / s;
                const double yy = q / s;
                const double zz = r / s;
                q /= p;
                r /= p;

                if (notlast) {
                    for (long j = k; j < n; ++j) {
                        double pp = h(k, j) + q * h(k + 1, j) + r * h(k + 2, j);
                        h(k, j) -= pp * xx;
                        h(k + 1, j) -= pp * yy;
                        h(k + 2, j) -= pp * zz;
                    }
                    const long imax = std::min(en, k + 3);
                    for (long i = 0; i <= imax; ++i) {
                        double pp = xx * h(i, k) + yy * h(i, k + 1) + zz * h(i, k + 2);
                        h(i, k) -= pp;
                        h(i, k + 1) -= pp * q;
                        h(i, k + 2) -= pp * r;
                    }
                    for (long i = 0; i < n; ++i) {
                        double pp = xx * z(i, k) + yy * z(i, k + 1) + zz * z(i, k + 2);
                        z(i, k) -= pp;
                        z(i, k + 1) -= pp * q;
                        z(i, k + 2) -= pp * r;
                    }
                } else {
                    for (long j = k; j < n; ++j) {
                        double pp = h(k, j) + q * h(k + 1, j);
                        h(k, j) -= pp * xx;
                        h(k + 1, j) -= pp * yy;
                    }
                    const long imax = std::min(en, k + 3);
                    for (long i = 0; i <= imax; ++i) {
                        double pp = xx * h(i, k) + yy * h(i, k + 1);
                        h(i, k) -= pp;
                        h(i, k + 1) -= pp * q;
                    }
                    for (long i = 0; i < n; ++i) {
                        double pp = xx * z(i, k) + yy * z(i, k + 1);
                        z(i, k) -= pp;
                        z(i, k + 1) -= pp * q;
                    }
                }
            }
        }
    }
}

} // namespace

SchurResult real_schur(const Matrix& a) {
    if (a.rows() != a.cols()) throw InvalidInput("real_schur: matrix not square");
    if (!is_finite(a)) throw InvalidInput("real_schur: non-finite entries");
    const std::size_t n = a.rows();
    SchurResult out;
    out.t = a;
    out.q = Matrix::identity(n);
    if (n <= 1) return out;
    hessenberg_reduce(out.t, out.q);
    francis_iterate(out.t, out.q);
    return out;
}

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

Matrix cycle_matrix(std::size_t n) {
    if (n < 2) throw InvalidInput("cycle_matrix: n must be >= 2");
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) p(i, (i + 1) % n) = 1.0;
    return p;
}

bool is_full_cycle_perm(const std::vector<std::size_t>& sigma) {
    const std::size_t n = sigma.size();
    if (n == 0) return false;
    std::vector<bool> hit(n, false);
    for (std::size_t s : sigma) {
        if (s >= n || hit[s]) return false;
        hit[s] = true;
    }
    std::size_t at = 0, steps = 0;
    do {
        at = sigma[at];
        ++steps;
    } while (at != 0 && steps <= n);
    return steps == n;
}

bool is_full_cycle(const Matrix& p, std::string* diagnostic) {
    auto fail = [&](const std::string& why) {
        if (diagnostic) *diagnostic = why;
        return false;
    };
    if (p.rows() != p.cols() || p.rows() == 0) return fail("not a square matrix");
    const std::size_t n = p.rows();
    std::vector<std::size_t> sigma(n, n);
    std::vector<std::size_t> col_hits(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = p(i, j);
            if (std::fabs(v - 1.0) <= 1e-12) {
                sigma[i] = j;
                ++ones;
                ++col_hits[j];
            } else if (std::fabs(v) > 1e-12) {
                return fail("not a permutation: entry not 0/1 within 1e-12");
            }
        }
        if (ones != 1) return fail("not a permutation: row without exactly one 1");
    }
    for (std::size_t j = 0; j < n; ++j)
        if (col_hits[j] != 1) return fail("not a permutation: column without exactly one 1");

    if (!is_full_cycle_perm(sigma)) return fail("permutation splits into more than one cycle");
    if (diagnostic) diagnostic->clear();
    return true;
}

bool is_full_cycle(const Matrix& p) { return is_full_cycle(p, nullptr); }

// ---------------------------------------------------------------------------
// Canonical form of an orthogonal matrix
// ---------------------------------------------------------------------------

Matrix canonical_block_matrix(const std::vector<double>& angles, std::size_t plus_count,
                              std::size_t minus_count) {
    const std::size_t n = 2 * angles.size() + plus_count + minus_count;
    Matrix t(n, n);
    std::size_t at = 0;
    for (double th : angles) {
        t(at, at) = std::cos(th);
        t(at, at + 1) = -std::sin(th);
        t(at + 1, at) = std::sin(th);
        t(at + 1, at + 1) = std::cos(th);
        at += 2;
    }
    for (std::size_t i = 0; i < plus_count; ++i, ++at) t(at, at) = 1.0;
    for (std::size_t i = 0; i < minus_count; ++i, ++at) t(at, at) = -1.0;
    return t;
}

namespace {

// Tolerance at which an eigenvalue of an orthogonal matrix counts as exactly
// +-1 (measured as distance on the unit circle).
constexpr double kPmClassifyTol = 1e-9;

void swap_columns(Matrix& m, std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}

} // namespace

CanonicalForm canonical_form(const Matrix& c, double tol) {
    if (c.rows() != c.cols() || c.rows() == 0)
        throw InvalidInput("canonical_form: matrix not square");
    if (!is_finite(c)) throw InvalidInput("canonical_form: non-finite entries");
    const std::size_t n = c.rows();

    {
        const Matrix gram = sub(matmul(transpose(c), c), Matrix::identity(n));
        const double orth =
            (n <= 512) ? operator_norm(gram) : frobenius_norm(gram);
        if (orth > 1e-8)
            throw InvalidInput("canonical_form: input not orthogonal within 1e-8 (residual " +
                               std::to_string(orth) + ")");
    }

    SchurResult schur = real_schur(c);
    Matrix& t = schur.t;
    Matrix& s = schur.q;

    struct Pair {
        double angle;
        std::size_t col0, col1;
    };
    std::vector<Pair> pairs;
    std::vector<std::size_t> plus_cols, minus_cols;

    auto classify_single = [&](double value, std::size_t col) {
        if (std::fabs(std::fabs(value) - 1.0) > 1e-4)
            throw NumericalFailure(
                "canonical_form: real eigenvalue of magnitude far from 1: " +
                    std::to_string(value),
                std::fabs(std::fabs(value) - 1.0));
        if (value > 0.0)
            plus_cols.push_back(col);
        else
            minus_cols.push_back(col);
    };

    std::size_t i = 0;
    while (i < n) {
        const bool block = (i + 1 < n) && (t(i + 1, i) != 0.0);
        if (!block) {
            classify_single(t(i, i), i);
            ++i;
            continue;
        }
        const double b00 = t(i, i), b01 = t(i, i + 1), b10 = t(i + 1, i), b11 = t(i + 1, i + 1);
        const double det = b00 * b11 - b01 * b10;
        if (det > 0.0) {
            // Rotation block; nearest rotation angle via the polar factor.
            double theta = std::atan2(b10 - b01, b00 + b11);
            if (theta < 0.0) {
                // Similarity with [[0,1],[1,0]] turns R_{-theta} into R_{theta}.
                swap_columns(s, i, i + 1);
                theta = -theta;
            }
            if (theta <= kPmClassifyTol) {
                plus_cols.push_back(i);
                plus_cols.push_back(i + 1);
            } else if (kPi - theta <= kPmClassifyTol) {
                minus_cols.push_back(i);
                minus_cols.push_back(i + 1);
            } else {
                pairs.push_back({theta, i, i + 1});
            }
        } else {
            // Reflection block (eigenvalues +1 and -1): diagonalize the
            // symmetric block with one Jacobi rotation.
            const double phi = 0.5 * std::atan2(b01 + b10, b00 - b11);
            const double cs = std::cos(phi), sn = std::sin(phi);
            for (std::size_t r = 0; r < n; ++r) {
                const double v0 = s(r, i), v1 = s(r, i + 1);
                s(r, i) = cs * v0 + sn * v1;
                s(r, i + 1) = -sn * v0 + cs * v1;
            }
            const double d0 = cs * (b00 * cs + b01 * sn) + sn * (b10 * cs + b11 * sn);
            const double d1 = -sn * (-b00 * sn + b01 * cs) + cs * (-b10 * sn + b11 * cs);
            classify_single(d0, i);
            classify_single(d1, i + 1);
        }
        i += 2;
    }

    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Pair& a, const Pair& b) { return a.angle < b.angle; });

    // Reorder the basis: rotation pairs ascending, then +1, then -1 columns.
    Matrix basis(n, n);
    std::vector<double> angles;
    angles.reserve(pairs.size());
    std::size_t at = 0;
    auto copy_col = [&](std::size_t src) {
        for (std::size_t r = 0; r < n; ++r) basis(r, at) = s(r, src);
        ++at;
    };
    for (const Pair& p : pairs) {
        angles.push_back(p.angle);
        copy_col(p.col0);
        copy_col(p.col1);
    }
    for (std::size_t col : plus_cols) copy_col(col);
    for (std::size_t col : minus_cols) copy_col(col);

    CanonicalForm out;
    out.basis = std::move(basis);
    out.angles = std::move(angles);
    out.plus_count = plus_cols.size();
    out.minus_count = minus_cols.size();

    const Matrix ideal = canonical_block_matrix(out.angles, out.plus_count, out.minus_count);
    const Matrix recon = matmul(transpose(out.basis), matmul(c, out.basis));
    out.residual = operator_norm(sub(recon, ideal));

    const double basis_orth =
        operator_norm(sub(matmul(transpose(out.basis), out.basis), Matrix::identity(n)));
    if (basis_orth > 1e-10)
        throw NumericalFailure("canonical_form: basis lost orthogonality", basis_orth);
    if (out.residual > tol)
        throw NumericalFailure("canonical_form: residual " + std::to_string(out.residual) +
                                   " exceeds tolerance " + std::to_string(tol),
                               out.residual);
    return out;
}

} // namespace scr
