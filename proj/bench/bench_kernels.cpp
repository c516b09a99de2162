// Timing comparison of the OpenMP kernels against the serial reference.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "scr/kernels.hpp"
#include "scr/matrix.hpp"
#include "scr/rng.hpp"

using namespace scr;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count());
    }
    return best;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    std::printf("%-24s %12s %12s %9s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

    for (std::size_t n : {128u, 256u, 384u, 512u}) {
        const Matrix a = random_matrix(n, n, 7 + n);
        const Matrix b = random_matrix(n, n, 11 + n);
        Matrix out_s(n, n), out_p(n, n);
        const double ts = time_best_of(3, [&] { serial::matmul(a, b, out_s); });
        const double tp = time_best_of(3, [&] { kernels::matmul(a, b, out_p); });
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                diff = std::max(diff, std::abs(out_s(i, j) - out_p(i, j)));
        std::printf("matmul %4zu x %-4zu      %12.6f %12.6f %8.2fx  (max |diff| = %g)\n", n, n,
                    ts, tp, ts / tp, diff);
    }

    for (std::size_t n : {1024u, 4096u, 8192u}) {
        const Matrix a = random_matrix(n, 512, 23 + n);
        Vec x(512, 0.5), ys(n), yp(n);
        const double ts = time_best_of(5, [&] { serial::matvec(a, x.data(), ys.data()); });
        const double tp = time_best_of(5, [&] { kernels::matvec(a, x.data(), yp.data()); });
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(ys[i] - yp[i]));
        std::printf("matvec %4zu x 512       %12.6f %12.6f %8.2fx  (max |diff| = %g)\n", n, ts,
                    tp, ts / tp, diff);
    }
    return 0;
}
