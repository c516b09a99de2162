#include "scr/binarize.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>

#include "scr/errors.hpp"

namespace scr {

Binarization binarize(const Matrix& v, double delta, std::size_t n) {
    if (!(delta > 0.0)) throw InvalidInput("binarize: delta must be positive");
    if (v.rows() == 0 || v.cols() == 0) throw InvalidInput("binarize: empty matrix");
    if (!is_finite(v)) throw InvalidInput("binarize: non-finite entries");
    if (n == 0) throw InvalidInput("binarize: cycle dimension must be >= 1");

    const std::size_t rows = v.rows(), cols = v.cols();
    const double span = std::sqrt(static_cast<double>(rows * cols));

    Binarization out;
    out.n_avg = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / delta)));

    const double vmax = max_abs(v);
    std::size_t k =
        static_cast<std::size_t>(std::ceil(static_cast<double>(out.n_avg) * vmax)) + 1;
    while (std::gcd(k, n) != 1) ++k;
    out.k = k;

    // q_ij = nearest integer to n_avg * V_ij with the parity of k; the tie at
    // half-grid goes toward zero (equal magnitudes resolve to the positive
    // candidate).  |q_ij| <= k by construction of k.
    const long parity = static_cast<long>(k % 2);
    Matrix q(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double t = static_cast<double>(out.n_avg) * v(i, j);
            long lo = static_cast<long>(std::floor(t));
            if (((lo % 2) + 2) % 2 != parity) --lo;
            const long hi = lo + 2;
            long pick;
            const double dl = t - static_cast<double>(lo);
            const double dh = static_cast<double>(hi) - t;
            if (dl < dh) {
                pick = lo;
            } else if (dh < dl) {
                pick = hi;
            } else {
                pick = (std::labs(lo) < std::labs(hi)) ? lo
                       : (std::labs(hi) < std::labs(lo)) ? hi
                                                         : hi; // equal magnitude: positive
            }
            if (std::labs(pick) > static_cast<long>(k))
                throw NumericalFailure("binarize: |q| exceeded k (internal)", 0.0);
            q(i, j) = static_cast<double>(pick);
        }
    }

    out.sign_matrices.assign(k, Matrix(rows, cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const long plus = (static_cast<long>(k) + static_cast<long>(q(i, j))) / 2;
            for (std::size_t f = 0; f < k; ++f)
                out.sign_matrices[f](i, j) = (static_cast<long>(f) < plus) ? 1.0 : -1.0;
        }
    }

    const Matrix recon = binarization_reconstruction(out);
    out.max_entry_error = max_abs(sub(v, recon));
    out.op_norm_error = operator_norm(sub(v, recon));
    if (out.max_entry_error > 1.0 / static_cast<double>(out.n_avg) + 1e-12)
        throw NumericalFailure("binarize: entry error exceeded 1/n_avg (internal)",
                               out.max_entry_error);
    return out;
}

Matrix binarization_reconstruction(const Binarization& b) {
    Matrix sum(b.sign_matrices.front().rows(), b.sign_matrices.front().cols());
    for (const Matrix& f : b.sign_matrices) sum = add(sum, f);
    return scale(sum, 1.0 / static_cast<double>(b.n_avg));
}

std::vector<std::size_t> block_cycle_perm(std::size_t n, std::size_t k) {
    if (n == 0 || k == 0) throw InvalidInput("block_cycle_perm: empty shape");
    std::vector<std::size_t> sigma(n * k);
    for (std::size_t b = 0; b < k; ++b) {
        const std::size_t src_block = (b == 0) ? k - 1 : b - 1;
        for (std::size_t i = 0; i < n; ++i)
            sigma[b * n + i] = src_block * n + (i + 1) % n;
    }
    return sigma;
}

Matrix block_cycle(const CyclePermutation& p, std::size_t k) {
    if (p.size < 2) throw InvalidInput("block_cycle: cycle size must be >= 2");
    if (k == 0) throw InvalidInput("block_cycle: k must be >= 1");
    const std::size_t g = std::gcd(p.size, k);
    if (g != 1)
        throw InvalidInput("block_cycle: gcd(n, k) = " + std::to_string(g) +
                           " must be 1 for a full cycle");
    const std::vector<std::size_t> sigma = block_cycle_perm(p.size, k);
    Matrix out(sigma.size(), sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) out(i, sigma[i]) = 1.0;
    return out;
}

SCRSystem assemble_scr(const CyclicApproximation& cyc, const Binarization& bin) {
    const std::size_t n_c = cyc.n_c;
    const std::size_t k = bin.k;
    const std::size_t m = cyc.v_c.cols();
    const std::size_t big = n_c * k;
    if (std::gcd(n_c, k) != 1)
        throw InvalidInput("assemble_scr: binarization k not coprime to the cycle dimension");

    // Orbit relabeling: the block cycle is a full cycle, so following its
    // orbit from 0 renames coordinates into the canonical shift.
    const std::vector<std::size_t> sigma = block_cycle_perm(n_c, k);
    std::vector<std::size_t> orbit(big);
    std::size_t at = 0;
    for (std::size_t step = 0; step < big; ++step) {
        orbit[step] = at;
        at = sigma[at];
    }
    if (at != orbit[0] || !is_full_cycle_perm(sigma))
        throw NumericalFailure("assemble_scr: block cycle failed to be a single orbit", 0.0);

    SCRSystem s;
    s.n_scr = big;
    s.lambda = cyc.lambda;
    s.cycle = CyclePermutation{big};
    s.input_bound = cyc.input_bound;
    s.n_c = n_c;
    s.k = k;
    s.n_avg = bin.n_avg;

    // V' stacks the sign matrices as block rows, then follows the relabeling.
    s.v_scr = Matrix(big, m);
    for (std::size_t l = 0; l < big; ++l) {
        const std::size_t src = orbit[l];
        const Matrix& f = bin.sign_matrices[src / n_c];
        for (std::size_t j = 0; j < m; ++j) s.v_scr(l, j) = f(src % n_c, j);
    }

    // readout' = readout_C ∘ block averaging; column src of the averaging map
    // is column (src mod n_c) of readout_C scaled by 1/n_avg.
    const Matrix& a_c = cyc.readout_c.a;
    Matrix a(a_c.rows(), big);
    const double avg = 1.0 / static_cast<double>(bin.n_avg);
    for (std::size_t l = 0; l < big; ++l) {
        const std::size_t col = orbit[l] % n_c;
        for (std::size_t r = 0; r < a_c.rows(); ++r) a(r, l) = a_c(r, col) * avg;
    }
    s.readout = LinearReadout{std::move(a), true};
    return s;
}

SCRSystem scr_construct(const CyclicApproximation& cyc, double delta) {
    if (!(delta > 0.0)) throw InvalidInput("scr_construct: delta must be positive");
    // State budget: sum_s lambda^s ||V_C - V~|| M <= delta needs an operator
    // norm budget of delta (1 - lambda) / M.
    const double tol = delta * (1.0 - cyc.lambda) / cyc.input_bound;
    const Binarization bin = binarize(cyc.v_c, tol, cyc.n_c);
    return assemble_scr(cyc, bin);
}

std::vector<Vec> drive_scr(const SCRSystem& s, const InputStream& u, std::size_t washout) {
    if (u.dim() != s.v_scr.cols()) throw InvalidInput("drive_scr: stream dimension mismatch");
    if (washout >= u.length()) throw InvalidInput("drive_scr: washout must be shorter than stream");
    const std::size_t n = s.n_scr;
    std::vector<Vec> states;
    states.reserve(u.length() - washout);
    Vec x(n, 0.0), next(n, 0.0);
    for (std::size_t t = 0; t < u.length(); ++t) {
        const Vec& ut = u.samples[t];
        for (std::size_t i = 0; i < n; ++i) {
            double acc = s.lambda * x[(i + 1) % n];
            const double* vi = s.v_scr.row(i);
            for (std::size_t j = 0; j < ut.size(); ++j) acc += vi[j] * ut[j];
            next[i] = acc;
        }
        std::swap(x, next);
        if (t >= washout) states.push_back(x);
    }
    return states;
}

std::vector<Vec> run_scr(const SCRSystem& s, const InputStream& u, std::size_t washout) {
    std::vector<Vec> states = drive_scr(s, u, washout);
    std::vector<Vec> out;
    out.reserve(states.size());
    for (const Vec& x : states) out.push_back(s.readout.apply(x));
    return out;
}

LinearReservoir to_reservoir(const SCRSystem& s) {
    return make_reservoir(scale(cycle_matrix(s.n_scr), s.lambda), s.v_scr, s.readout,
                          s.input_bound, s.lambda);
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

void save_scr(const std::string& dir, const SCRSystem& s) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    char buf[64];
    std::ofstream mf(dir + "/scr_manifest.txt", std::ios::binary);
    mf << "n_scr = " << s.n_scr << "\n";
    mf << "n_c = " << s.n_c << "\n";
    mf << "k = " << s.k << "\n";
    mf << "n_avg = " << s.n_avg << "\n";
    mf << "m = " << s.v_scr.cols() << "\n";
    mf << "d = " << s.readout.out_dim() << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", s.lambda);
    mf << "lambda = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", s.input_bound);
    mf << "input_bound = " << buf << "\n";
    mf << "shift = sigma(i) = i+1 mod n\n";

    write_matrix_csv(dir + "/V_scr.csv", s.v_scr);
    write_matrix_csv(dir + "/readout.csv", s.readout.a);

    // Packed sign bitmap, row-major, MSB first, bit 1 = +1.
    std::ofstream bits(dir + "/V_scr.bits", std::ios::binary);
    std::uint8_t byte = 0;
    int fill = 0;
    for (std::size_t i = 0; i < s.v_scr.rows(); ++i) {
        for (std::size_t j = 0; j < s.v_scr.cols(); ++j) {
            byte = static_cast<std::uint8_t>(byte << 1);
            if (s.v_scr(i, j) > 0.0) byte |= 1;
            if (++fill == 8) {
                bits.put(static_cast<char>(byte));
                byte = 0;
                fill = 0;
            }
        }
    }
    if (fill > 0) bits.put(static_cast<char>(byte << (8 - fill)));
}

SCRSystem load_scr(const std::string& dir) {
    std::ifstream in(dir + "/scr_manifest.txt");
    if (!in) throw Error("cannot open manifest: " + dir + "/scr_manifest.txt");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& t) {
            while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.erase(t.begin());
            while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r'))
                t.pop_back();
        };
        trim(key);
        trim(val);
        kv[key] = val;
    }
    SCRSystem s;
    s.n_scr = std::stoul(kv.at("n_scr"));
    s.n_c = std::stoul(kv.at("n_c"));
    s.k = std::stoul(kv.at("k"));
    s.n_avg = std::stoul(kv.at("n_avg"));
    s.lambda = std::stod(kv.at("lambda"));
    s.input_bound = std::stod(kv.at("input_bound"));
    s.cycle = CyclePermutation{s.n_scr};
    s.v_scr = read_matrix_csv(dir + "/V_scr.csv");
    s.readout = LinearReadout{read_matrix_csv(dir + "/readout.csv"), true};
    for (std::size_t i = 0; i < s.v_scr.rows(); ++i)
        for (std::size_t j = 0; j < s.v_scr.cols(); ++j)
            if (s.v_scr(i, j) != 1.0 && s.v_scr(i, j) != -1.0)
                throw Error("load_scr: V' entry is not exactly +-1");
    return s;
}

} // namespace scr
