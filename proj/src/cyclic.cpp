#include "scr/cyclic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "scr/dilation.hpp"
#include "scr/errors.hpp"
#include "scr/linalg.hpp"

namespace scr {

namespace {

constexpr double kPi = 3.14159265358979323846;

double chord(double a, double b) {
    // |e^{ia} - e^{ib}|
    return 2.0 * std::fabs(std::sin(0.5 * (a - b)));
}

} // namespace

std::size_t l0_bound(double delta) {
    if (!(delta > 0.0)) throw InvalidInput("l0_bound: delta must be positive");
    if (delta >= 2.0) return 2;
    // arccos(1 - delta^2/2) = 2 asin(delta/2); the asin form stays accurate
    // when delta^2/2 underflows next to 1.
    const double x = 2.0 * std::asin(delta / 2.0);
    std::size_t l0 = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(kPi / x)));
    // Strict inequality with a relative guard so exact boundaries (e.g.
    // delta = 1, arccos(1/2) = pi/3) round to the next admissible integer.
    while (!(kPi / static_cast<double>(l0) < x * (1.0 - 1e-12))) ++l0;
    return l0;
}

std::size_t theoretical_dimension(std::size_t k, double delta) {
    return 2 * l0_bound(delta) * (k + 1);
}

// ---------------------------------------------------------------------------
// Hopcroft-Karp maximum matching
// ---------------------------------------------------------------------------

namespace {

class HopcroftKarp {
public:
    HopcroftKarp(std::size_t left, std::size_t right)
        : n_left_(left), n_right_(right), adj_(left) {}

    void add_edge(std::size_t l, std::size_t r) { adj_[l].push_back(r); }

    // Returns the matched right node per left node (npos when uncovered).
    std::vector<std::size_t> solve() {
        match_l_.assign(n_left_, npos);
        match_r_.assign(n_right_, npos);
        while (bfs()) {
            for (std::size_t l = 0; l < n_left_; ++l)
                if (match_l_[l] == npos) dfs(l);
        }
        return match_l_;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    bool bfs() {
        std::deque<std::size_t> queue;
        dist_.assign(n_left_, npos);
        for (std::size_t l = 0; l < n_left_; ++l) {
            if (match_l_[l] == npos) {
                dist_[l] = 0;
                queue.push_back(l);
            }
        }
        bool found = false;
        while (!queue.empty()) {
            const std::size_t l = queue.front();
            queue.pop_front();
            for (std::size_t r : adj_[l]) {
                const std::size_t l2 = match_r_[r];
                if (l2 == npos) {
                    found = true;
                } else if (dist_[l2] == npos) {
                    dist_[l2] = dist_[l] + 1;
                    queue.push_back(l2);
                }
            }
        }
        return found;
    }

    bool dfs(std::size_t l) {
        for (std::size_t r : adj_[l]) {
            const std::size_t l2 = match_r_[r];
            if (l2 == npos || (dist_[l2] == dist_[l] + 1 && dfs(l2))) {
                match_l_[l] = r;
                match_r_[r] = l;
                return true;
            }
        }
        dist_[l] = npos;
        return false;
    }

    std::size_t n_left_, n_right_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::size_t> match_l_, match_r_, dist_;
};

} // namespace

std::optional<RootMatching> match_roots(const std::vector<double>& angles, std::size_t n_prime,
                                        double delta) {
    if (n_prime < 4 || n_prime % 2 != 0)
        throw InvalidInput("match_roots: n_prime must be even and >= 4");
    if (!(delta > 0.0)) throw InvalidInput("match_roots: delta must be positive");
    for (double th : angles)
        if (!(th >= 0.0 && th <= kPi))
            throw InvalidInput("match_roots: angles must lie in [0, pi]");

    const std::size_t n_roots = n_prime / 2 - 1; // interior roots a = 1 .. n'/2-1
    HopcroftKarp hk(angles.size(), n_roots);

    const double root_step = 2.0 * kPi / static_cast<double>(n_prime);
    const double arc = delta >= 2.0 ? kPi : 2.0 * std::asin(delta / 2.0);
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double center = angles[i] / root_step;
        const double halfwidth = arc / root_step;
        const long lo = std::max(1l, static_cast<long>(std::ceil(center - halfwidth - 1.0)));
        const long hi = std::min(static_cast<long>(n_roots),
                                 static_cast<long>(std::floor(center + halfwidth + 1.0)));
        for (long a = lo; a <= hi; ++a) {
            if (chord(angles[i], root_step * static_cast<double>(a)) < delta)
                hk.add_edge(i, static_cast<std::size_t>(a - 1));
        }
    }

    const std::vector<std::size_t> ml = hk.solve();
    RootMatching out;
    out.n_prime = n_prime;
    out.angles = angles;
    out.roots.resize(angles.size());
    out.delta = delta;
    for (std::size_t i = 0; i < ml.size(); ++i) {
        if (ml[i] == HopcroftKarp::npos) return std::nullopt;
        out.roots[i] = ml[i] + 1;
    }
    return out;
}

std::pair<std::size_t, RootMatching> min_cycle_dimension(const std::vector<double>& angles,
                                                         double delta) {
    const std::size_t start = std::max<std::size_t>(2 * angles.size() + 2, 4);
    const std::size_t guarantee = theoretical_dimension(angles.size(), delta);
    for (std::size_t n = start;; n += 2) {
        if (n > 5000000)
            throw ResourceLimit("min_cycle_dimension: search exceeded 5e6 candidate dimensions",
                                static_cast<long long>(n));
        if (auto m = match_roots(angles, n, delta)) return {n, std::move(*m)};
        if (n > guarantee)
            throw NumericalFailure(
                "min_cycle_dimension: no matching up to the theoretical bound (bug)", 0.0);
    }
}

Matrix build_completion(const RootMatching& matching) {
    const std::size_t n = matching.n_prime;
    std::vector<bool> used(n / 2, false);
    for (std::size_t a : matching.roots) used[a] = true;
    const std::size_t missing = n / 2 - 1 - matching.roots.size();
    Matrix d(2 * missing + 2, 2 * missing + 2);
    std::size_t at = 0;
    for (std::size_t a = 1; a < n / 2; ++a) {
        if (used[a]) continue;
        const double th = 2.0 * kPi * static_cast<double>(a) / static_cast<double>(n);
        d(at, at) = std::cos(th);
        d(at, at + 1) = -std::sin(th);
        d(at + 1, at) = std::sin(th);
        d(at + 1, at + 1) = std::cos(th);
        at += 2;
    }
    d(at, at) = 1.0;
    d(at + 1, at + 1) = -1.0;
    return d;
}

// ---------------------------------------------------------------------------
// Cycle basis
// ---------------------------------------------------------------------------

CycleBasis cycle_canonical_basis(std::size_t n) {
    if (n < 4 || n % 2 != 0)
        throw InvalidInput("cycle_canonical_basis: n must be even and >= 4");
    // One period of sin/cos; entry (a, j) only needs index (a*j) mod n, so
    // every entry is a table lookup and the basis is orthogonal to rounding.
    Vec cs(n), sn(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double th = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(n);
        cs[r] = std::cos(th);
        sn[r] = std::sin(th);
    }
    const double amp = std::sqrt(2.0 / static_cast<double>(n));
    const double unit = 1.0 / std::sqrt(static_cast<double>(n));

    CycleBasis out;
    out.j = Matrix(n, n);
    Matrix& j = out.j;
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t a = 1; a < n / 2; ++a) {
            const std::size_t idx = (a * row) % n;
            j(row, 2 * (a - 1)) = amp * sn[idx];
            j(row, 2 * (a - 1) + 1) = amp * cs[idx];
        }
        j(row, n - 2) = unit;
        j(row, n - 1) = (row % 2 == 0) ? unit : -unit;
    }
    return out;
}

Matrix cycle_block_form(std::size_t n) {
    if (n < 4 || n % 2 != 0) throw InvalidInput("cycle_block_form: n must be even and >= 4");
    std::vector<double> angles;
    angles.reserve(n / 2 - 1);
    for (std::size_t a = 1; a < n / 2; ++a)
        angles.push_back(2.0 * kPi * static_cast<double>(a) / static_cast<double>(n));
    return canonical_block_matrix(angles, 1, 1);
}

// ---------------------------------------------------------------------------
// Theorem-8 embedding
// ---------------------------------------------------------------------------

OrthogonalCycleEmbedding approximate_orthogonal(const Matrix& u, double delta) {
    if (u.rows() != u.cols() || u.rows() == 0)
        throw InvalidInput("approximate_orthogonal: matrix not square");
    if (!(delta > 0.0)) throw InvalidInput("approximate_orthogonal: delta must be positive");

    const std::size_t n0 = u.rows();
    const CanonicalForm cf = canonical_form(u, 1e-8);

    OrthogonalCycleEmbedding emb;
    emb.delta = delta;

    // Parity padding: append a -1 direction for a lone +1 (and vice versa) so
    // the +-1 eigenvalues group into R_0 / R_pi pairs plus at most one exact
    // (+1, -1) pair.
    std::size_t p = cf.plus_count, q = cf.minus_count;
    emb.padded = (p + q) % 2 == 1;
    int pad_sign = 0;
    if (emb.padded) {
        if (p % 2 == 1) {
            pad_sign = -1;
            ++q;
        } else {
            pad_sign = +1;
            ++p;
        }
    }
    emb.pad_sign = pad_sign;
    const std::size_t n_in = n0 + (emb.padded ? 1 : 0);
    emb.n_input = n_in;
    emb.exact_pair = (p % 2 == 1); // after padding p and q share parity

    const std::size_t k_rot = cf.angles.size();
    const std::size_t p2 = p / 2, q2 = q / 2;

    emb.grouped_angles.assign(p2, 0.0);
    emb.grouped_angles.insert(emb.grouped_angles.end(), cf.angles.begin(), cf.angles.end());
    emb.grouped_angles.insert(emb.grouped_angles.end(), q2, kPi);

    // Column sources in cf.basis (npos marks the padded direction).
    constexpr std::size_t kPad = static_cast<std::size_t>(-1);
    std::vector<std::size_t> plus_src, minus_src;
    for (std::size_t i = 0; i < cf.plus_count; ++i) plus_src.push_back(2 * k_rot + i);
    for (std::size_t i = 0; i < cf.minus_count; ++i)
        minus_src.push_back(2 * k_rot + cf.plus_count + i);
    if (pad_sign > 0) plus_src.push_back(kPad);
    if (pad_sign < 0) minus_src.push_back(kPad);

    std::vector<std::size_t> order; // column order of the grouped basis
    order.reserve(n_in);
    for (std::size_t i = 0; i < 2 * p2; ++i) order.push_back(plus_src[i]);
    for (std::size_t i = 0; i < 2 * k_rot; ++i) order.push_back(i);
    for (std::size_t i = 0; i < 2 * q2; ++i) order.push_back(minus_src[i]);
    if (emb.exact_pair) {
        order.push_back(plus_src.back());
        order.push_back(minus_src.back());
    }

    emb.basis_u = Matrix(n_in, n_in);
    for (std::size_t c = 0; c < n_in; ++c) {
        if (order[c] == kPad) {
            emb.basis_u(n0, c) = 1.0;
        } else {
            for (std::size_t r = 0; r < n0; ++r) emb.basis_u(r, c) = cf.basis(r, order[c]);
        }
    }

    auto [n_c, matching] = min_cycle_dimension(emb.grouped_angles, delta);
    emb.n_c = n_c;
    emb.matching = std::move(matching);
    emb.theoretical_bound = theoretical_dimension(emb.grouped_angles.size(), delta);
    if (n_c > 20000)
        throw ResourceLimit("approximate_orthogonal: dense transform of dimension " +
                                std::to_string(n_c) + " refused",
                            static_cast<long long>(n_c));

    // Completion D: unmatched rotations; the trailing (1, -1) only when U does
    // not supply its own exact pair.
    {
        std::vector<bool> used(n_c / 2, false);
        for (std::size_t a : emb.matching.roots) used[a] = true;
        const std::size_t missing = n_c / 2 - 1 - emb.matching.roots.size();
        const std::size_t dim = 2 * missing + (emb.exact_pair ? 0 : 2);
        Matrix d(dim, dim);
        std::size_t at = 0;
        for (std::size_t a = 1; a < n_c / 2; ++a) {
            if (used[a]) continue;
            const double th = 2.0 * kPi * static_cast<double>(a) / static_cast<double>(n_c);
            d(at, at) = std::cos(th);
            d(at, at + 1) = -std::sin(th);
            d(at + 1, at) = std::sin(th);
            d(at + 1, at + 1) = std::cos(th);
            at += 2;
        }
        if (!emb.exact_pair) {
            d(at, at) = 1.0;
            d(at + 1, at + 1) = -1.0;
        }
        emb.completion = std::move(d);
    }

    // Source position -> target slot in the cycle's block form.  Rotation a
    // occupies target columns (2a-2, 2a-1); +1 and -1 sit at n_c-2, n_c-1.
    std::vector<std::size_t> tgt(n_c);
    {
        std::size_t src = 0;
        for (std::size_t i = 0; i < emb.grouped_angles.size(); ++i) {
            const std::size_t a = emb.matching.roots[i];
            tgt[src++] = 2 * (a - 1);
            tgt[src++] = 2 * (a - 1) + 1;
        }
        if (emb.exact_pair) {
            tgt[src++] = n_c - 2;
            tgt[src++] = n_c - 1;
        }
        std::vector<bool> used(n_c / 2, false);
        for (std::size_t a : emb.matching.roots) used[a] = true;
        for (std::size_t a = 1; a < n_c / 2; ++a) {
            if (used[a]) continue;
            tgt[src++] = 2 * (a - 1);
            tgt[src++] = 2 * (a - 1) + 1;
        }
        if (!emb.exact_pair) {
            tgt[src++] = n_c - 2;
            tgt[src++] = n_c - 1;
        }
    }

    // G = J_C P~ (J_U ⊕ I)^T: permute the Fourier columns into source order,
    // then mix the first n_in columns by J_U^T.
    const CycleBasis jc = cycle_canonical_basis(n_c);
    Matrix b(n_c, n_c);
    for (std::size_t src = 0; src < n_c; ++src)
        for (std::size_t r = 0; r < n_c; ++r) b(r, src) = jc.j(r, tgt[src]);

    Matrix g(n_c, n_c);
    const Matrix but = transpose(emb.basis_u);
    // g[:, :n_in] = b[:, :n_in] * basis_u^T, the rest is copied.
    {
        Matrix left = left_cols(b, n_in);
        Matrix mixed = matmul(left, but);
        for (std::size_t r = 0; r < n_c; ++r) {
            for (std::size_t c = 0; c < n_in; ++c) g(r, c) = mixed(r, c);
            for (std::size_t c = n_in; c < n_c; ++c) g(r, c) = b(r, c);
        }
    }
    emb.transform = std::move(g);
    return emb;
}

// ---------------------------------------------------------------------------
// Theorem-10 system construction
// ---------------------------------------------------------------------------

CyclicApproximation cyclic_approximate(const LinearReservoir& r_u, double delta) {
    if (!(delta > 0.0)) throw InvalidInput("cyclic_approximate: delta must be positive");
    const double lambda = r_u.lambda;
    if (!(lambda > 0.0) || lambda >= 1.0)
        throw InvalidInput("cyclic_approximate: coupling norm must lie in (0, 1)");

    const std::size_t n_u = r_u.state_dim();
    const Matrix u = scale(r_u.w, 1.0 / lambda);
    {
        const Matrix gram = sub(matmul(transpose(u), u), Matrix::identity(n_u));
        const double orth = (n_u <= 512) ? operator_norm(gram) : frobenius_norm(gram);
        if (orth > 1e-8)
            throw InvalidInput("cyclic_approximate: coupling is not lambda * orthogonal "
                               "within 1e-8 (residual " +
                               std::to_string(orth) + ")");
    }

    const double v_norm = operator_norm(r_u.v);
    const double m_bound = r_u.input_bound;

    // Tail condition: 2 M ||V|| sum_{k>N} lambda^k < delta/2.
    std::size_t order = 1;
    if (v_norm > 0.0) order = choose_order(lambda, m_bound, v_norm, delta / 2.0);

    // Perturbation budget: largest delta_0 <= 1 with
    // M ||V|| sum_{k=0}^{N} ((lambda+delta_0)^k - lambda^k) < delta/2,
    // found by bisection (the sum is monotone in delta_0).
    double delta0 = 1.0;
    if (v_norm > 0.0) {
        auto excess = [&](double d0) {
            double sum = 0.0;
            double a = 1.0, b = 1.0; // (lambda+d0)^k and lambda^k
            for (std::size_t k = 0; k <= order; ++k) {
                sum += a - b;
                if (!std::isfinite(sum)) return sum;
                a *= (lambda + d0);
                b *= lambda;
            }
            return m_bound * v_norm * sum;
        };
        const double budget = delta / 2.0;
        if (excess(1.0) >= budget) {
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (excess(mid) < budget)
                    lo = mid;
                else
                    hi = mid;
            }
            delta0 = lo;
        }
        if (!(delta0 > 0.0))
            throw NumericalFailure("cyclic_approximate: perturbation budget collapsed to zero",
                                   delta0);
    }

    const double delta_match = std::min(delta, delta0) / lambda;
    OrthogonalCycleEmbedding emb = approximate_orthogonal(u, delta_match);

    CyclicApproximation out;
    out.n_c = emb.n_c;
    out.lambda = lambda;
    out.theoretical_bound = emb.theoretical_bound;
    out.state_tolerance = delta;
    out.input_bound = m_bound;
    out.delta_zero = delta0;
    out.delta_match = delta_match;
    out.n_u = n_u;

    // V_C = P [V_U; 0] and h_C = h_U ∘ projection ∘ P^T.  Only the first n_u
    // columns of P act on the physical coordinates; any padding column is
    // zero-input and projected away again.
    const Matrix p_cols = left_cols(emb.transform, n_u);
    out.v_c = matmul(p_cols, r_u.v);
    LinearReadout readout;
    readout.a = matmul(r_u.readout.a, transpose(p_cols));
    readout.composed = true;
    out.readout_c = std::move(readout);
    out.transform = std::move(emb.transform);
    return out;
}

std::vector<Vec> drive_cyclic(const CyclicApproximation& c, const InputStream& u,
                              std::size_t washout) {
    if (u.dim() != c.v_c.cols()) throw InvalidInput("drive_cyclic: stream dimension mismatch");
    if (washout >= u.length())
        throw InvalidInput("drive_cyclic: washout must be shorter than stream");
    const std::size_t n = c.n_c;
    std::vector<Vec> states;
    states.reserve(u.length() - washout);
    Vec x(n, 0.0), next(n, 0.0);
    for (std::size_t t = 0; t < u.length(); ++t) {
        const Vec& ut = u.samples[t];
        for (std::size_t i = 0; i < n; ++i) {
            double s = c.lambda * x[(i + 1) % n];
            const double* vi = c.v_c.row(i);
            for (std::size_t j = 0; j < ut.size(); ++j) s += vi[j] * ut[j];
            next[i] = s;
        }
        std::swap(x, next);
        if (t >= washout) states.push_back(x);
    }
    return states;
}

std::vector<Vec> run_cyclic(const CyclicApproximation& c, const InputStream& u,
                            std::size_t washout) {
    std::vector<Vec> states = drive_cyclic(c, u, washout);
    std::vector<Vec> out;
    out.reserve(states.size());
    for (const Vec& x : states) out.push_back(c.readout_c.apply(x));
    return out;
}

LinearReservoir to_reservoir(const CyclicApproximation& c) {
    return make_reservoir(scale(cycle_matrix(c.n_c), c.lambda), c.v_c, c.readout_c,
                          c.input_bound, c.lambda);
}

} // namespace scr
