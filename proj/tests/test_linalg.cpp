#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "scr/errors.hpp"
#include "scr/linalg.hpp"
#include "scr/rng.hpp"

using namespace scr;

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed, double lo = 0.0,
                     double hi = 1.0) {
    Rng rng(seed);
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
    return m;
}

double orth_residual(const Matrix& q) {
    return operator_norm(sub(matmul(transpose(q), q), Matrix::identity(q.rows())));
}

std::vector<oracle::Complex> canonical_spectrum(const CanonicalForm& cf) {
    std::vector<oracle::Complex> out;
    for (double th : cf.angles) {
        out.emplace_back(std::cos(th), std::sin(th));
        out.emplace_back(std::cos(th), -std::sin(th));
    }
    for (std::size_t i = 0; i < cf.plus_count; ++i) out.emplace_back(1.0, 0.0);
    for (std::size_t i = 0; i < cf.minus_count; ++i) out.emplace_back(-1.0, 0.0);
    return out;
}

} // namespace

TEST_CASE("operator_norm: identity and diagonal") {
    CHECK(operator_norm(Matrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
    Matrix d(2, 2);
    d(0, 0) = 0.9;
    d(1, 1) = 0.3;
    CHECK(operator_norm(d) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("operator_norm: random 5x5 matches the power-iteration oracle") {
    const Matrix m = random_matrix(5, 5, 42);
    CHECK(std::fabs(operator_norm(m) - oracle::operator_norm_power(m)) < 1e-8);
}

TEST_CASE("operator_norm: rejects non-finite input") {
    Matrix m(2, 2);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(operator_norm(m), InvalidInput);
}

TEST_CASE("operator_norm: dense path and power-iteration path agree") {
    const Matrix m = random_matrix(30, 30, 7, -1.0, 1.0);
    const double dense = operator_norm(m);
    // Embedding into a 600-dim block forces the iterative path.
    Matrix big(600, 600);
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 30; ++j) big(i, j) = m(i, j);
    CHECK(std::fabs(operator_norm(big) - dense) < 1e-8 * dense);
}

TEST_CASE("psd_sqrt: identity and diagonal") {
    const Matrix s = psd_sqrt(Matrix::identity(4));
    CHECK(frobenius_norm(sub(s, Matrix::identity(4))) < 1e-12);
    Matrix d(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const Matrix r = psd_sqrt(d);
    CHECK(r(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::fabs(r(0, 1)) < 1e-12);
}

TEST_CASE("psd_sqrt: I - W^T W for random contractions squares back") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const Matrix w = oracle::random_contraction(6, 0.95, seed);
        const Matrix m = sub(Matrix::identity(6), matmul(transpose(w), w));
        const Matrix s = psd_sqrt(m);
        CHECK(operator_norm(sub(matmul(s, s), m)) < 1e-8);
    }
}

TEST_CASE("psd_sqrt: rejects asymmetric and indefinite inputs") {
    Matrix a(2, 2);
    a(0, 1) = 0.5;
    CHECK_THROWS_AS(psd_sqrt(a), InvalidInput);
    Matrix b = Matrix::identity(2);
    b(1, 1) = -0.25;
    CHECK_THROWS_AS(psd_sqrt(b), InvalidInput);
}

TEST_CASE("random_orthogonal: n = 1 gives a sign") {
    bool saw_plus = false, saw_minus = false;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix q = random_orthogonal(1, seed);
        CHECK(std::fabs(std::fabs(q(0, 0)) - 1.0) < 1e-14);
        (q(0, 0) > 0 ? saw_plus : saw_minus) = true;
    }
    CHECK(saw_plus);
    CHECK(saw_minus);
}

TEST_CASE("random_orthogonal: orthogonality, determinism, n = 0 rejected") {
    const Matrix q = random_orthogonal(6, 7);
    CHECK(orth_residual(q) <= 1e-10);
    const Matrix q2 = random_orthogonal(6, 7);
    CHECK(frobenius_norm(sub(q, q2)) == 0.0);
    CHECK_THROWS_AS(random_orthogonal(0, 1), InvalidInput);
}

TEST_CASE("random_orthogonal: mean of Q11 near zero over 1000 Haar samples") {
    double mean = 0.0;
    const int samples = 1000;
    for (int s = 0; s < samples; ++s) mean += random_orthogonal(20, 1000 + s)(0, 0);
    mean /= samples;
    CHECK(std::fabs(mean) < 0.1);
}

TEST_CASE("cycle_matrix: swap, roots of unity, order") {
    const Matrix p2 = cycle_matrix(2);
    CHECK(p2(0, 1) == 1.0);
    CHECK(p2(1, 0) == 1.0);
    CHECK(p2(0, 0) == 0.0);

    const Matrix p4 = cycle_matrix(4);
    const std::vector<oracle::Complex> expect = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    CHECK(oracle::multiset_close(oracle::eigenvalues(p4), expect, 1e-9));

    const Matrix p5 = cycle_matrix(5);
    Matrix acc = Matrix::identity(5);
    for (int i = 0; i < 5; ++i) acc = matmul(acc, p5);
    CHECK(frobenius_norm(sub(acc, Matrix::identity(5))) < 1e-12);

    CHECK_THROWS_AS(cycle_matrix(1), InvalidInput);
}

TEST_CASE("is_full_cycle: identity, cycles, non-permutations") {
    CHECK_FALSE(is_full_cycle(Matrix::identity(3)));
    CHECK(is_full_cycle(cycle_matrix(4)));

    const Matrix two = direct_sum(cycle_matrix(2), cycle_matrix(2));
    std::string why;
    CHECK_FALSE(is_full_cycle(two, &why));
    CHECK(why.find("cycle") != std::string::npos);

    Matrix notperm(2, 2);
    notperm(0, 0) = 0.5;
    CHECK_FALSE(is_full_cycle(notperm, &why));
    CHECK(why.find("not a permutation") != std::string::npos);
}

TEST_CASE("is_full_cycle matches ground truth on constructed cycle types") {
    struct Case {
        std::vector<std::size_t> cycles;
        bool full;
    };
    const Case cases[] = {{{7}, true},        {{1, 6}, false}, {{3, 4}, false},
                          {{12}, true},       {{2, 2, 3}, false}, {{1, 1, 1}, false},
                          {{5, 5}, false},    {{2}, true}};
    std::uint64_t seed = 100;
    for (const Case& c : cases) {
        const Matrix p = oracle::permutation_with_cycles(c.cycles, seed++);
        CHECK(is_full_cycle(p) == c.full);
    }
}

TEST_CASE("real_schur: reconstruction and eigenvalues on random matrices") {
    for (std::uint64_t seed : {3, 4, 5}) {
        const Matrix a = random_matrix(9, 9, seed, -1.0, 1.0);
        const SchurResult s = real_schur(a);
        CHECK(orth_residual(s.q) < 1e-12);
        const Matrix recon = matmul(s.q, matmul(s.t, transpose(s.q)));
        CHECK(operator_norm(sub(recon, a)) < 1e-11);
        // Quasi-triangular: nothing below the first subdiagonal.
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j + 1 < i; ++j) CHECK(s.t(i, j) == 0.0);
        // Eigenvalues of T blocks match the characteristic-polynomial oracle.
        std::vector<oracle::Complex> eigs;
        std::size_t i = 0;
        while (i < 9) {
            if (i + 1 < 9 && s.t(i + 1, i) != 0.0) {
                const double tr = s.t(i, i) + s.t(i + 1, i + 1);
                const double det =
                    s.t(i, i) * s.t(i + 1, i + 1) - s.t(i, i + 1) * s.t(i + 1, i);
                const double disc = tr * tr / 4.0 - det;
                CHECK(disc < 0.0);
                eigs.emplace_back(tr / 2.0, std::sqrt(-disc));
                eigs.emplace_back(tr / 2.0, -std::sqrt(-disc));
                i += 2;
            } else {
                eigs.emplace_back(s.t(i, i), 0.0);
                i += 1;
            }
        }
        CHECK(oracle::multiset_close(eigs, oracle::eigenvalues(a), 1e-7));
    }
}

TEST_CASE("canonical_form: 2x2 rotation is already canonical") {
    const CanonicalForm cf = canonical_form(rotation2(kPi / 3.0), 1e-10);
    REQUIRE(cf.angles.size() == 1);
    CHECK(cf.angles[0] == doctest::Approx(kPi / 3.0).epsilon(1e-12));
    CHECK(cf.plus_count == 0);
    CHECK(cf.minus_count == 0);
    CHECK(orth_residual(cf.basis) <= 1e-10);
}

TEST_CASE("canonical_form: negative-angle rotation is flipped into (0, pi)") {
    const CanonicalForm cf = canonical_form(rotation2(-kPi / 5.0), 1e-10);
    REQUIRE(cf.angles.size() == 1);
    CHECK(cf.angles[0] == doctest::Approx(kPi / 5.0).epsilon(1e-12));
    CHECK(cf.residual <= 1e-10);
}

TEST_CASE("canonical_form: the 4-cycle has angle pi/2 plus one +1 and one -1") {
    const CanonicalForm cf = canonical_form(cycle_matrix(4), 1e-9);
    REQUIRE(cf.angles.size() == 1);
    CHECK(cf.angles[0] == doctest::Approx(kPi / 2.0).epsilon(1e-10));
    CHECK(cf.plus_count == 1);
    CHECK(cf.minus_count == 1);
}

TEST_CASE("canonical_form: Haar samples reconstruct and match the spectrum oracle") {
    for (std::size_t n = 2; n <= 16; ++n) {
        const Matrix c = random_orthogonal(n, 5000 + n);
        const CanonicalForm cf = canonical_form(c, 1e-9);
        CHECK(cf.residual <= 1e-9);
        CHECK(orth_residual(cf.basis) <= 1e-10);
        CHECK(2 * cf.angles.size() + cf.plus_count + cf.minus_count == n);
        for (std::size_t i = 0; i < cf.angles.size(); ++i) {
            CHECK(cf.angles[i] > 0.0);
            CHECK(cf.angles[i] < kPi);
            if (i) CHECK(cf.angles[i] >= cf.angles[i - 1]);
        }
        const Matrix ideal = canonical_block_matrix(cf.angles, cf.plus_count, cf.minus_count);
        const Matrix recon = matmul(cf.basis, matmul(ideal, transpose(cf.basis)));
        CHECK(operator_norm(sub(recon, c)) < 1e-9);
        CHECK(oracle::multiset_close(canonical_spectrum(cf), oracle::eigenvalues(c), 1e-7));
    }
}

TEST_CASE("canonical_form: exact +-1 eigenvalues are classified, not turned into angles") {
    // Build C = S blockdiag(R_{0.9}, I2, -I2) S^T with a Haar basis.
    const Matrix blocks = canonical_block_matrix({0.9}, 2, 2);
    const Matrix s = random_orthogonal(6, 99);
    const Matrix c = matmul(s, matmul(blocks, transpose(s)));
    const CanonicalForm cf = canonical_form(c, 1e-9);
    REQUIRE(cf.angles.size() == 1);
    CHECK(cf.angles[0] == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(cf.plus_count == 2);
    CHECK(cf.minus_count == 2);
}

TEST_CASE("canonical_form: rejects non-orthogonal input") {
    CHECK_THROWS_AS(canonical_form(scale(Matrix::identity(3), 1.5), 1e-9), InvalidInput);
}

TEST_CASE("canonical_form: round trip over many Haar samples (property)") {
    Rng pick(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + pick.next_u64() % 15;
        const Matrix c = random_orthogonal(n, 77000 + trial);
        const CanonicalForm cf = canonical_form(c, 1e-9);
        const Matrix ideal = canonical_block_matrix(cf.angles, cf.plus_count, cf.minus_count);
        const Matrix recon = matmul(cf.basis, matmul(ideal, transpose(cf.basis)));
        CHECK(operator_norm(sub(recon, c)) < 1e-9);
    }
}
