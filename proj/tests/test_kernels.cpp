#include <doctest.h>

#include "oracles.hpp"
#include "scr/kernels.hpp"
#include "scr/matrix.hpp"
#include "scr/rng.hpp"

using namespace scr;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform(-2.0, 2.0);
    return m;
}

} // namespace

TEST_CASE("parallel matmul is bit-identical to the serial reference") {
    // Shapes straddling the parallel cutoff, including odd and thin ones.
    const std::size_t shapes[][3] = {{1, 1, 1},    {3, 5, 7},     {17, 9, 33},
                                     {64, 64, 64}, {130, 70, 41}, {200, 200, 3}};
    for (const auto& s : shapes) {
        const Matrix a = random_matrix(s[0], s[1], 11 + s[0]);
        const Matrix b = random_matrix(s[1], s[2], 23 + s[2]);
        Matrix out_serial(s[0], s[2]), out_parallel(s[0], s[2]);
        serial::matmul(a, b, out_serial);
        kernels::matmul(a, b, out_parallel);
        for (std::size_t i = 0; i < out_serial.rows(); ++i)
            for (std::size_t j = 0; j < out_serial.cols(); ++j)
                CHECK(out_serial(i, j) == out_parallel(i, j));
    }
}

TEST_CASE("parallel matvec and transposed matvec match serial bitwise") {
    for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{64}, std::size_t{300},
                          std::size_t{1025}}) {
        const Matrix a = random_matrix(n, (n % 2) ? n + 3 : 129, 5 + n);
        Rng rng(99 + n);
        Vec x(a.cols()), xt(a.rows());
        for (double& v : x) v = rng.gaussian();
        for (double& v : xt) v = rng.gaussian();

        Vec ys(a.rows()), yp(a.rows());
        serial::matvec(a, x.data(), ys.data());
        kernels::matvec(a, x.data(), yp.data());
        for (std::size_t i = 0; i < ys.size(); ++i) CHECK(ys[i] == yp[i]);

        Vec zs(a.cols()), zp(a.cols());
        serial::matvec_transposed(a, xt.data(), zs.data());
        kernels::matvec_transposed(a, xt.data(), zp.data());
        for (std::size_t i = 0; i < zs.size(); ++i) CHECK(zs[i] == zp[i]);
    }
}

TEST_CASE("matmul agrees with the transpose identity") {
    const Matrix a = random_matrix(20, 14, 1);
    const Matrix b = random_matrix(14, 9, 2);
    const Matrix ab = matmul(a, b);
    const Matrix btat = matmul(transpose(b), transpose(a));
    CHECK(frobenius_norm(sub(ab, transpose(btat))) < 1e-12);
}
