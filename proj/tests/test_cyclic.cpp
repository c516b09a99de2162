#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "scr/cyclic.hpp"
#include "scr/dilation.hpp"
#include "scr/errors.hpp"
#include "scr/linalg.hpp"
#include "scr/reservoir.hpp"
#include "scr/rng.hpp"

using namespace scr;

namespace {

constexpr double kPi = 3.14159265358979323846;

double orth_residual(const Matrix& q) {
    return operator_norm(sub(matmul(transpose(q), q), Matrix::identity(q.rows())));
}

// U ⊕ D padded per the embedding's bookkeeping.
Matrix embedded_target(const Matrix& u, const OrthogonalCycleEmbedding& emb) {
    Matrix u_pad = u;
    if (emb.padded) {
        Matrix pad(1, 1);
        pad(0, 0) = static_cast<double>(emb.pad_sign);
        u_pad = direct_sum(u_pad, pad);
    }
    return direct_sum(u_pad, emb.completion);
}

double theorem8_residual(const Matrix& u, const OrthogonalCycleEmbedding& emb) {
    const Matrix c = cycle_matrix(emb.n_c);
    const Matrix a = matmul(transpose(emb.transform), matmul(c, emb.transform));
    return operator_norm(sub(a, embedded_target(u, emb)));
}

} // namespace

TEST_CASE("l0_bound: worked examples and edge cases") {
    CHECK(l0_bound(0.1) == 32);
    CHECK(l0_bound(1.0) == 4);
    CHECK(l0_bound(std::sqrt(2.0)) == 3);
    CHECK(l0_bound(2.0) == 2);
    CHECK(l0_bound(5.0) == 2);
    CHECK_THROWS_AS(l0_bound(0.0), InvalidInput);
    CHECK_THROWS_AS(l0_bound(-0.5), InvalidInput);
}

TEST_CASE("l0_bound satisfies its defining inequality") {
    for (double delta : {0.01, 0.05, 0.37, 1.3, 1.9}) {
        const std::size_t l0 = l0_bound(delta);
        const double arc = std::acos(1.0 - delta * delta / 2.0);
        CHECK(kPi / double(l0) < arc);
        if (l0 > 2) CHECK(kPi / double(l0 - 1) >= arc * (1.0 - 1e-9));
        // Equivalent form: |1 - e^{i pi / l0}| < delta.
        CHECK(2.0 * std::sin(kPi / (2.0 * double(l0))) < delta);
    }
}

TEST_CASE("theoretical_dimension: worked examples") {
    CHECK(theoretical_dimension(2, 0.1) == 192);
    CHECK(theoretical_dimension(40, 0.1) == 2624);
    CHECK(theoretical_dimension(1, std::sqrt(2.0)) == 12);
}

TEST_CASE("match_roots: exact root, impossible duplicates, empty list, odd n'") {
    const auto m = match_roots({kPi / 2.0}, 4, 0.01);
    REQUIRE(m.has_value());
    REQUIRE(m->roots.size() == 1);
    CHECK(m->roots[0] == 1);

    // Two pi/2 angles cannot take distinct roots of order 4 at tight delta.
    CHECK_FALSE(match_roots({kPi / 2.0, kPi / 2.0}, 4, 0.1).has_value());

    const auto empty = match_roots({}, 8, 0.1);
    REQUIRE(empty.has_value());
    CHECK(empty->roots.empty());

    CHECK_THROWS_AS(match_roots({1.0}, 7, 0.1), InvalidInput);
    CHECK_THROWS_AS(match_roots({-0.2}, 8, 0.1), InvalidInput);
}

TEST_CASE("match_roots: matched pairs satisfy the strict chord bound and distinctness") {
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> angles;
        const std::size_t k = 1 + rng.next_u64() % 5;
        for (std::size_t i = 0; i < k; ++i) angles.push_back(rng.uniform(0.0, kPi));
        const double delta = 0.2 + rng.uniform01();
        const std::size_t n_prime = 2 * (4 + rng.next_u64() % 40);
        const auto m = match_roots(angles, n_prime, delta);
        if (!m) continue;
        std::vector<bool> seen(n_prime, false);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t a = m->roots[i];
            CHECK(a >= 1);
            CHECK(a < n_prime / 2);
            CHECK_FALSE(seen[a]);
            seen[a] = true;
            const double beta = 2.0 * kPi * double(a) / double(n_prime);
            CHECK(2.0 * std::fabs(std::sin(0.5 * (angles[i] - beta))) < delta);
        }
    }
}

TEST_CASE("min_cycle_dimension: worked examples") {
    {
        const auto [n, m] = min_cycle_dimension({kPi / 2.0}, 0.01);
        CHECK(n == 4);
        CHECK(m.roots[0] == 1);
    }
    {
        const auto [n, m] = min_cycle_dimension({2.0 * kPi / 6.0}, 1e-9);
        CHECK(n == 6);
        CHECK(m.roots[0] == 1);
    }
    {
        // Haar angles at n = 20 stay at or under the theoretical bound.
        const CanonicalForm cf = canonical_form(random_orthogonal(20, 9), 1e-8);
        const auto [n, m] = min_cycle_dimension(cf.angles, 0.1);
        (void)m;
        CHECK(n <= theoretical_dimension(cf.angles.size(), 0.1));
        CHECK(n < theoretical_dimension(cf.angles.size(), 0.1) / 2);
    }
}

TEST_CASE("min_cycle_dimension is exactly minimal (brute-force oracle)") {
    Rng rng(88);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<double> angles;
        const std::size_t k = 1 + rng.next_u64() % 3;
        for (std::size_t i = 0; i < k; ++i) angles.push_back(rng.uniform(0.05, kPi - 0.05));
        const double delta = (trial % 2) ? 0.3 : 0.7;
        const auto [n_c, m] = min_cycle_dimension(angles, delta);
        (void)m;
        CHECK(oracle::brute_force_matchable(angles, n_c, delta));
        for (std::size_t n = std::max<std::size_t>(2 * k + 2, 4); n < n_c; n += 2)
            CHECK_FALSE(oracle::brute_force_matchable(angles, n, delta));
    }
}

TEST_CASE("build_completion: worked examples and orthogonality") {
    {
        RootMatching m{4, {kPi / 2.0}, {1}, 0.01};
        const Matrix d = build_completion(m);
        REQUIRE(d.rows() == 2);
        CHECK(d(0, 0) == 1.0);
        CHECK(d(1, 1) == -1.0);
        CHECK(std::fabs(d(0, 1)) + std::fabs(d(1, 0)) == 0.0);
    }
    {
        RootMatching m{6, {kPi / 3.0}, {1}, 0.01};
        const Matrix d = build_completion(m);
        REQUIRE(d.rows() == 4);
        const Matrix expect = direct_sum(rotation2(2.0 * kPi * 2.0 / 6.0),
                                         canonical_block_matrix({}, 1, 1));
        CHECK(frobenius_norm(sub(d, expect)) < 1e-15);
    }
    {
        RootMatching m{14, {0.9, 2.2}, {2, 5}, 0.4};
        const Matrix d = build_completion(m);
        CHECK(d.rows() == 14 - 4);
        CHECK(orth_residual(d) <= 1e-12);
    }
}

TEST_CASE("cycle_canonical_basis: block form residual and orthogonality") {
    for (std::size_t n : {4, 6, 8, 50}) {
        const CycleBasis basis = cycle_canonical_basis(n);
        CHECK(orth_residual(basis.j) <= 1e-12);
        const Matrix t =
            matmul(transpose(basis.j), matmul(cycle_matrix(n), basis.j));
        CHECK(operator_norm(sub(t, cycle_block_form(n))) <= 1e-10);
    }
    CHECK_THROWS_AS(cycle_canonical_basis(5), InvalidInput);
}

TEST_CASE("cycle_canonical_basis: n = 8 reconstruction has the eighth roots of unity") {
    const CycleBasis basis = cycle_canonical_basis(8);
    const Matrix recon =
        matmul(basis.j, matmul(cycle_block_form(8), transpose(basis.j)));
    std::vector<oracle::Complex> expect;
    for (int a = 0; a < 8; ++a)
        expect.emplace_back(std::cos(2.0 * kPi * a / 8.0), std::sin(2.0 * kPi * a / 8.0));
    CHECK(oracle::multiset_close(oracle::eigenvalues(recon), expect, 1e-9));
}

TEST_CASE("approximate_orthogonal: Theorem 8 inequality on Haar samples") {
    for (std::size_t n = 4; n <= 16; n += 4) {
        for (double delta : {0.3, 0.1}) {
            const Matrix u = random_orthogonal(n, 3200 + n);
            const OrthogonalCycleEmbedding emb = approximate_orthogonal(u, delta);
            CHECK(theorem8_residual(u, emb) < delta);
            CHECK(emb.n_c <= emb.theoretical_bound);
            CHECK(orth_residual(emb.transform) <= 1e-9);
            for (std::size_t i = 0; i < emb.grouped_angles.size(); ++i) {
                const double beta =
                    2.0 * kPi * double(emb.matching.roots[i]) / double(emb.n_c);
                CHECK(2.0 * std::fabs(std::sin(0.5 * (emb.grouped_angles[i] - beta))) < delta);
            }
        }
    }
}

TEST_CASE("approximate_orthogonal: odd dimension pads by one +-1 direction") {
    const Matrix u = random_orthogonal(5, 77);
    const OrthogonalCycleEmbedding emb = approximate_orthogonal(u, 0.2);
    CHECK(emb.padded);
    CHECK(emb.n_input == 6);
    CHECK((emb.pad_sign == 1 || emb.pad_sign == -1));
    CHECK(theorem8_residual(u, emb) < 0.2);
}

TEST_CASE("approximate_orthogonal: grouped +-1 pairs and the exact lone pair") {
    // C = S blockdiag(R_{1.1}, I2, -I2) S^T: +1/-1 pairs group into angles 0, pi.
    const Matrix s6 = random_orthogonal(6, 123);
    const Matrix u6 =
        matmul(s6, matmul(canonical_block_matrix({1.1}, 2, 2), transpose(s6)));
    const OrthogonalCycleEmbedding e6 = approximate_orthogonal(u6, 0.25);
    CHECK_FALSE(e6.padded);
    CHECK_FALSE(e6.exact_pair);
    REQUIRE(e6.grouped_angles.size() == 3);
    CHECK(e6.grouped_angles.front() == 0.0);
    CHECK(e6.grouped_angles.back() == doctest::Approx(kPi));
    CHECK(theorem8_residual(u6, e6) < 0.25);

    // C = S blockdiag(R_{1.1}, 1, -1) S^T: the lone pair maps onto the
    // cycle's own +-1 entries exactly.
    const Matrix s4 = random_orthogonal(4, 124);
    const Matrix u4 =
        matmul(s4, matmul(canonical_block_matrix({1.1}, 1, 1), transpose(s4)));
    const OrthogonalCycleEmbedding e4 = approximate_orthogonal(u4, 0.25);
    CHECK(e4.exact_pair);
    CHECK(e4.grouped_angles.size() == 1);
    CHECK(theorem8_residual(u4, e4) < 0.25);
}

TEST_CASE("cyclic_approximate: a cycle similarity image returns exactly, distance ~ 0") {
    const std::size_t n = 6;
    const Matrix s = random_orthogonal(n, 55);
    const Matrix u = matmul(s, matmul(cycle_matrix(n), transpose(s)));
    Rng rng(56);
    Matrix v(n, 1), a(1, n);
    for (std::size_t i = 0; i < n; ++i) {
        v(i, 0) = rng.uniform(-0.4, 0.4);
        a(0, i) = rng.uniform(-0.5, 0.5);
    }
    const double lam = 0.8;
    const LinearReservoir r_u =
        make_reservoir(scale(u, lam), v, LinearReadout{a, false}, 1.0, lam);
    const CyclicApproximation cyc = cyclic_approximate(r_u, 0.05);
    CHECK(cyc.n_c == n);
    const InputStream stream = random_streams(1, 400, 1, 1.0, 57).front();
    const std::size_t washout = default_washout(r_u);
    const auto y_ref = run(r_u, stream, washout);
    const auto y_cyc = run_cyclic(cyc, stream, washout);
    CHECK(output_distance(y_ref, y_cyc) < 1e-9);
}

TEST_CASE("cyclic_approximate: zero input coupling propagates to zero outputs") {
    const Matrix u = random_orthogonal(4, 60);
    Matrix a(1, 4);
    a(0, 0) = 1.0;
    const LinearReservoir r_u =
        make_reservoir(scale(u, 0.7), Matrix(4, 1), LinearReadout{a, false}, 1.0, 0.7);
    const CyclicApproximation cyc = cyclic_approximate(r_u, 0.1);
    CHECK(frobenius_norm(cyc.v_c) == 0.0);
    const InputStream stream = random_streams(1, 50, 1, 1.0, 61).front();
    for (const Vec& y : run_cyclic(cyc, stream, 5)) CHECK(norm2(y) == 0.0);
}

TEST_CASE("cyclic_approximate rejects couplings that are not lambda * orthogonal") {
    const Matrix w = oracle::random_contraction(4, 0.8, 62);
    Rng rng(63);
    Matrix v(4, 1), a(1, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        v(i, 0) = 0.2;
        a(0, i) = 0.3;
    }
    const LinearReservoir r = make_reservoir(w, v, LinearReadout{a, false}, 1.0);
    CHECK_THROWS_AS(cyclic_approximate(r, 0.1), InvalidInput);
}

TEST_CASE("cyclic_approximate: dilated n = 5 system stays within the state tolerance") {
    // Section-6 style defaults: n = 5, rho = 0.9, V entries +-0.05.
    const Matrix w = scale(oracle::random_contraction(5, 1.0, 70), 0.9);
    Matrix v(5, 1), a(1, 5);
    for (std::size_t i = 0; i < 5; ++i) {
        v(i, 0) = (i % 2) ? 0.05 : -0.05;
        a(0, i) = 0.4;
    }
    const LinearReservoir r = make_reservoir(w, v, LinearReadout{a, false}, 1.0, 0.9);
    const auto [r_u, plan] = dilate_system(r, 0.05);
    const double delta = 0.05;
    const CyclicApproximation cyc = cyclic_approximate(r_u, delta);
    CHECK(cyc.n_c <= cyc.theoretical_bound);

    const InputStream stream = random_streams(1, 900, 1, 1.0, 71).front();
    const std::size_t washout = default_washout(r_u);
    const auto xs_u = drive(r_u, stream, washout);
    const auto xs_c = drive_cyclic(cyc, stream, washout);
    const Matrix proj_cols = left_cols(cyc.transform, r_u.state_dim());
    double gap = 0.0;
    for (std::size_t t = 0; t < xs_u.size(); ++t) {
        const Vec back = matvec_transposed(proj_cols, xs_c[t]);
        gap = std::max(gap, norm2(vec_sub(back, xs_u[t])));
    }
    CHECK(gap < delta);
}

TEST_CASE("perturbation power bound: ||W0^j - W1^j|| <= (lambda+d)^j - lambda^j") {
    // Theorem-10 proof quantities, instantiated at a desk-scale matching
    // tolerance so the dense matrix powers stay cheap.
    const Matrix u = random_orthogonal(6, 80);
    const double lam = 0.85;
    const OrthogonalCycleEmbedding emb = approximate_orthogonal(u, 0.3);
    const Matrix target = embedded_target(u, emb);
    const Matrix c = cycle_matrix(emb.n_c);
    const Matrix approx = matmul(transpose(emb.transform), matmul(c, emb.transform));
    const Matrix w0 = scale(target, lam);
    const Matrix w1 = scale(approx, lam);
    const double d0 = operator_norm(sub(w0, w1));
    CHECK(d0 < lam * 0.3);

    Matrix p0 = Matrix::identity(w0.rows());
    Matrix p1 = p0;
    for (int j = 1; j <= 12; ++j) {
        p0 = matmul(p0, w0);
        p1 = matmul(p1, w1);
        const double lhs = operator_norm(sub(p0, p1));
        const double rhs = std::pow(lam + d0, double(j)) - std::pow(lam, double(j));
        CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }
}

TEST_CASE("cyclic system transform preserves outputs exactly under similarity") {
    // Outputs of (lambda A, V0, h0) equal outputs of the transformed cycle
    // system by construction; checked through the dense materialization.
    const Matrix u = random_orthogonal(4, 90);
    Rng rng(91);
    Matrix v(4, 1), a(1, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        v(i, 0) = rng.uniform(-0.4, 0.4);
        a(0, i) = rng.uniform(-0.6, 0.6);
    }
    const LinearReservoir r_u =
        make_reservoir(scale(u, 0.75), v, LinearReadout{a, false}, 1.0, 0.75);
    const CyclicApproximation cyc = cyclic_approximate(r_u, 0.2);
    const LinearReservoir dense = to_reservoir(cyc);
    const InputStream stream = random_streams(1, 200, 1, 1.0, 92).front();
    const auto y_dense = run(dense, stream, 10);
    const auto y_shift = run_cyclic(cyc, stream, 10);
    CHECK(output_distance(y_dense, y_shift) < 1e-12);
}
