#include "scr/dilation.hpp"

#include <cfloat>
#include <cmath>

#include "scr/errors.hpp"
#include "scr/linalg.hpp"

namespace scr {

std::size_t choose_order(double lambda, double input_bound, double v_norm, double delta) {
    if (!(lambda > 0.0) || lambda >= 1.0)
        throw InvalidInput("choose_order: lambda must lie in (0, 1)");
    if (!(input_bound > 0.0) || !(v_norm > 0.0) || !(delta > 0.0))
        throw InvalidInput("choose_order: M, ||V|| and delta must be positive");

    const double c = 2.0 * input_bound * v_norm / (1.0 - lambda);
    auto bound = [&](std::size_t n) { return c * std::pow(lambda, static_cast<double>(n + 1)); };

    std::size_t n = 1;
    if (bound(1) >= delta) {
        const double guess = std::log(delta / c) / std::log(lambda) - 1.0;
        if (guess > 1e9)
            throw ResourceLimit("choose_order: required dilation order is astronomically large",
                                static_cast<long long>(1e9));
        n = static_cast<std::size_t>(std::max(1.0, std::floor(guess)));
        while (n > 1 && bound(n - 1) < delta) --n;
        while (bound(n) >= delta) ++n;
    }
    return n;
}

Matrix egervary_dilation(const Matrix& w1, std::size_t order) {
    if (w1.rows() != w1.cols() || w1.rows() == 0)
        throw InvalidInput("egervary_dilation: coupling must be square");
    if (order < 1) throw InvalidInput("egervary_dilation: order must be >= 1");
    const double nrm = operator_norm(w1);
    if (nrm > 1.0 + 1e-12)
        throw InvalidInput("egervary_dilation: ||W1|| = " + std::to_string(nrm) +
                           " exceeds 1 + 1e-12");

    const std::size_t n = w1.rows();
    const std::size_t big = (order + 1) * n;

    // The defect operators D_W = (I - W^T W)^{1/2} and D_{W^T} = (I - W W^T)^{1/2}
    // are built from one SVD so that W^T D_{W^T} = D_W W^T holds to rounding;
    // separate square roots lose half the digits when ||W1|| = 1.
    const Svd svd = svd_square(w1);
    Vec defect(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = 1.0 - svd.sigma[i] * svd.sigma[i];
        // Noise-level defects collapse to exact zero so unit singular
        // directions (e.g. orthogonal W1) do not grow sqrt(eps) artifacts.
        defect[i] = (d <= 64.0 * DBL_EPSILON) ? 0.0 : std::sqrt(std::max(0.0, d));
    }
    auto weighted_outer = [&](const Matrix& basis) {
        Matrix out(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    s += basis(i, k) * defect[k] * basis(j, k);
                out(i, j) = s;
            }
        return out;
    };
    const Matrix d_w = weighted_outer(svd.v);        // (I - W^T W)^{1/2}
    const Matrix d_wt = weighted_outer(svd.u);       // (I - W W^T)^{1/2}

    Matrix u(big, big);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            u(i, j) = w1(i, j);                        // block (0, 0) = W
            u(i, order * n + j) = d_wt(i, j);          // block (0, N) = D_{W^T}
            u(n + i, j) = d_w(i, j);                   // block (1, 0) = D_W
            u(n + i, order * n + j) = -w1(j, i);       // block (1, N) = -W^T
        }
    }
    for (std::size_t b = 2; b <= order; ++b)
        for (std::size_t i = 0; i < n; ++i) u(b * n + i, (b - 1) * n + i) = 1.0;

    // Guard: one polar pass if the assembly lost orthogonality.
    const double orth = frobenius_norm(sub(matmul(transpose(u), u), Matrix::identity(big)));
    if (orth > 1e-11) {
        const Matrix inv_sqrt = [&] {
            const SymmetricEigen eig = jacobi_eigh(matmul(transpose(u), u));
            Matrix out(big, big);
            for (std::size_t i = 0; i < big; ++i)
                for (std::size_t j = 0; j < big; ++j) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < big; ++k)
                        s += eig.vectors(i, k) * eig.vectors(j, k) /
                             std::sqrt(std::max(eig.values[k], 1e-300));
                    out(i, j) = s;
                }
            return out;
        }();
        u = matmul(u, inv_sqrt);
    }
    return u;
}

std::pair<LinearReservoir, DilationPlan> dilate_system(const LinearReservoir& r, double delta) {
    if (!(delta > 0.0)) throw InvalidInput("dilate_system: delta must be positive");
    if (r.lambda <= 0.0)
        throw InvalidInput(
            "dilate_system: ||W|| = 0; the zero coupling needs no dilation (use W1 = 0 directly)");

    const double v_norm = operator_norm(r.v);
    if (v_norm == 0.0) {
        // Zero input coupling: any order works; keep the smallest.
        const std::size_t n = r.state_dim();
        DilationPlan plan{1, delta, 2 * n};
        const Matrix u = egervary_dilation(scale(r.w, 1.0 / r.lambda), 1);
        Matrix v_up(2 * n, r.input_dim());
        Matrix a_up(r.output_dim(), 2 * n);
        for (std::size_t i = 0; i < r.output_dim(); ++i)
            for (std::size_t j = 0; j < n; ++j) a_up(i, j) = r.readout.a(i, j);
        LinearReadout h_up{std::move(a_up), true};
        return {make_reservoir(scale(u, r.lambda), std::move(v_up), std::move(h_up),
                               r.input_bound, r.lambda),
                plan};
    }

    const std::size_t order = choose_order(r.lambda, r.input_bound, v_norm, delta);
    const std::size_t n = r.state_dim();
    const std::size_t big = (order + 1) * n;

    const Matrix u = egervary_dilation(scale(r.w, 1.0 / r.lambda), order);

    Matrix v_up(big, r.input_dim());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < r.input_dim(); ++j) v_up(i, j) = r.v(i, j);

    Matrix a_up(r.output_dim(), big);
    for (std::size_t i = 0; i < r.output_dim(); ++i)
        for (std::size_t j = 0; j < n; ++j) a_up(i, j) = r.readout.a(i, j);
    LinearReadout h_up{std::move(a_up), true};

    DilationPlan plan{order, delta, big};
    return {make_reservoir(scale(u, r.lambda), std::move(v_up), std::move(h_up), r.input_bound,
                           r.lambda),
            plan};
}

} // namespace scr
