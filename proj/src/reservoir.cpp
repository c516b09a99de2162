#include "scr/reservoir.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "scr/errors.hpp"
#include "scr/kernels.hpp"
#include "scr/linalg.hpp"
#include "scr/rng.hpp"

namespace scr {

double LinearReadout::lipschitz() const { return operator_norm(a); }

InputStream make_stream(std::vector<Vec> samples) {
    double bound = 0.0;
    for (const Vec& s : samples) bound = std::max(bound, norm2(s));
    return make_stream(std::move(samples), bound);
}

InputStream make_stream(std::vector<Vec> samples, double bound) {
    if (samples.empty()) throw InvalidInput("make_stream: empty stream");
    const std::size_t m = samples.front().size();
    if (m == 0) throw InvalidInput("make_stream: zero-dimensional samples");
    for (const Vec& s : samples) {
        if (s.size() != m) throw InvalidInput("make_stream: inconsistent sample dimensions");
        if (!is_finite(s)) throw InvalidInput("make_stream: non-finite sample");
        if (norm2(s) > bound * (1.0 + 1e-12))
            throw InvalidInput("make_stream: sample norm exceeds declared bound");
    }
    InputStream u;
    u.samples = std::move(samples);
    u.bound = bound;
    return u;
}

std::vector<InputStream> random_streams(std::size_t count, std::size_t len, std::size_t m,
                                        double bound, std::uint64_t seed) {
    if (m == 0 || len == 0) throw InvalidInput("random_streams: empty shape");
    std::vector<InputStream> out;
    out.reserve(count);
    const double amp = bound / std::sqrt(static_cast<double>(m));
    for (std::size_t k = 0; k < count; ++k) {
        Rng rng(seed + 0x9e3779b9u * (k + 1));
        std::vector<Vec> samples(len, Vec(m));
        for (std::size_t t = 0; t < len; ++t)
            for (std::size_t j = 0; j < m; ++j) samples[t][j] = rng.uniform(-amp, amp);
        out.push_back(make_stream(std::move(samples), bound));
    }
    return out;
}

namespace {

LinearReservoir finish_reservoir(Matrix w, Matrix v, LinearReadout readout, double input_bound,
                                 double lambda) {
    if (w.rows() != w.cols() || w.rows() == 0)
        throw InvalidInput("reservoir: coupling must be square and non-empty");
    if (!is_finite(w) || !is_finite(v) || !is_finite(readout.a))
        throw InvalidInput("reservoir: non-finite entries");
    if (v.rows() != w.rows()) throw InvalidInput("reservoir: V row count must match state dim");
    if (readout.in_dim() != w.rows())
        throw InvalidInput("reservoir: readout domain must match state dim");
    if (!(input_bound > 0.0)) throw InvalidInput("reservoir: input bound must be positive");
    if (!(lambda < 1.0))
        throw InvalidInput("reservoir: coupling is not contractive (||W|| = " +
                           std::to_string(lambda) + ")");
    LinearReservoir r;
    r.w = std::move(w);
    r.v = std::move(v);
    r.readout = std::move(readout);
    r.lambda = lambda;
    r.input_bound = input_bound;
    return r;
}

} // namespace

LinearReservoir make_reservoir(Matrix w, Matrix v, LinearReadout readout, double input_bound) {
    const double lambda = operator_norm(w);
    return finish_reservoir(std::move(w), std::move(v), std::move(readout), input_bound, lambda);
}

LinearReservoir make_reservoir(Matrix w, Matrix v, LinearReadout readout, double input_bound,
                               double known_lambda) {
    return finish_reservoir(std::move(w), std::move(v), std::move(readout), input_bound,
                            known_lambda);
}

std::vector<Vec> drive(const LinearReservoir& r, const InputStream& u, std::size_t washout) {
    if (u.dim() != r.input_dim())
        throw InvalidInput("drive: stream dimension does not match reservoir input");
    if (washout >= u.length()) throw InvalidInput("drive: washout must be shorter than stream");

    const std::size_t n = r.state_dim();
    const std::size_t total = u.length();
    std::vector<Vec> states;
    states.reserve(total - washout);

    Vec x(n, 0.0), next(n, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        kernels::matvec(r.w, x.data(), next.data());
        for (std::size_t i = 0; i < n; ++i) {
            double s = next[i];
            const double* vi = r.v.row(i);
            const Vec& ut = u.samples[t];
            for (std::size_t j = 0; j < ut.size(); ++j) s += vi[j] * ut[j];
            x[i] = s;
        }
        if (t >= washout) states.push_back(x);
    }
    return states;
}

std::vector<Vec> run(const LinearReservoir& r, const InputStream& u, std::size_t washout) {
    std::vector<Vec> states = drive(r, u, washout);
    std::vector<Vec> outputs;
    outputs.reserve(states.size());
    for (const Vec& x : states) outputs.push_back(r.readout.apply(x));
    return outputs;
}

std::size_t default_washout(const LinearReservoir& r) {
    const double vnorm = operator_norm(r.v);
    const double c = r.input_bound * vnorm / (1.0 - r.lambda);
    if (c < 1e-12 || r.lambda <= 0.0) return 1;
    const double w = std::log(1e-12 / c) / std::log(r.lambda);
    std::size_t washout = w <= 0.0 ? 1 : static_cast<std::size_t>(std::ceil(w));
    while (std::pow(r.lambda, static_cast<double>(washout)) * c >= 1e-12 && washout < 1000000)
        ++washout;
    return washout;
}

namespace {

// Solves (G + ridge I) X = B for SPD G via Cholesky; returns false on failure.
bool cholesky_solve(Matrix g, const Matrix& b, Matrix& x) {
    const std::size_t n = g.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = g(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= g(j, k) * g(j, k);
        if (!(d > 0.0)) return false;
        const double l = std::sqrt(d);
        g(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= g(i, k) * g(j, k);
            g(i, j) = s / l;
        }
    }
    x = b;
    const std::size_t m = b.cols();
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= g(i, k) * x(k, c);
            x(i, c) = s / g(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) s -= g(k, ii) * x(k, c);
            x(ii, c) = s / g(ii, ii);
        }
    }
    return true;
}

} // namespace

LinearReadout train_ridge(const std::vector<Vec>& states, const std::vector<Vec>& targets,
                          double ridge) {
    if (states.empty() || states.size() != targets.size())
        throw InvalidInput("train_ridge: need equal, non-empty state/target lists");
    if (ridge < 0.0) throw InvalidInput("train_ridge: ridge must be >= 0");
    const std::size_t n = states.front().size();
    const std::size_t d = targets.front().size();
    const std::size_t rows = states.size();
    for (const Vec& s : states)
        if (s.size() != n || !is_finite(s)) throw InvalidInput("train_ridge: bad state row");
    for (const Vec& t : targets)
        if (t.size() != d || !is_finite(t)) throw InvalidInput("train_ridge: bad target row");

    // Normal equations: (X^T X + ridge I) A^T = X^T Y.
    Matrix gram(n, n), rhs(n, d);
    for (std::size_t r = 0; r < rows; ++r) {
        const Vec& x = states[r];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) gram(i, j) += x[i] * x[j];
            for (std::size_t c = 0; c < d; ++c) rhs(i, c) += x[i] * targets[r][c];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) gram(i, j) = gram(j, i);
    Matrix reg = gram;
    for (std::size_t i = 0; i < n; ++i) reg(i, i) += ridge;

    if (ridge == 0.0) {
        const SymmetricEigen eig = jacobi_eigh(gram);
        if (eig.values.back() <= 0.0 ||
            eig.values.front() <= eig.values.back() * n * 1e-14)
            throw NumericalFailure("train_ridge: singular normal matrix with ridge = 0",
                                   eig.values.front());
    }

    Matrix at;
    bool ok = cholesky_solve(reg, rhs, at);
    if (!ok) {
        // SVD-style fallback through the symmetric eigendecomposition.
        const SymmetricEigen eig = jacobi_eigh(reg);
        const double cutoff = std::max(eig.values.back(), 0.0) * n * 1e-14;
        Matrix vt_rhs = matmul(transpose(eig.vectors), rhs);
        for (std::size_t i = 0; i < n; ++i) {
            const double lam = eig.values[i];
            const double inv = lam > cutoff ? 1.0 / lam : 0.0;
            for (std::size_t c = 0; c < d; ++c) vt_rhs(i, c) *= inv;
        }
        at = matmul(eig.vectors, vt_rhs);
    }

    const double resid = frobenius_norm(sub(matmul(reg, at), rhs));
    const double rel = resid / std::max(frobenius_norm(rhs), 1e-300);
    if (rel > 1e-8)
        throw NumericalFailure("train_ridge: normal equation residual too large", rel);

    LinearReadout out;
    out.a = transpose(at);
    out.composed = false;
    return out;
}

double output_distance(const std::vector<Vec>& outputs1, const std::vector<Vec>& outputs2) {
    if (outputs1.size() != outputs2.size())
        throw InvalidInput("output_distance: output sequences differ in length");
    double sup = 0.0;
    for (std::size_t t = 0; t < outputs1.size(); ++t) {
        if (outputs1[t].size() != outputs2[t].size())
            throw InvalidInput("output_distance: output dimensions differ");
        sup = std::max(sup, norm2(vec_sub(outputs1[t], outputs2[t])));
    }
    return sup;
}

double output_distance(const LinearReservoir& r1, const LinearReservoir& r2,
                       const InputStream& u, std::size_t washout) {
    if (r1.input_dim() != r2.input_dim())
        throw InvalidInput("output_distance: input dimensions differ");
    if (r1.output_dim() != r2.output_dim())
        throw InvalidInput("output_distance: output dimensions differ");
    return output_distance(run(r1, u, washout), run(r2, u, washout));
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        };
        trim(key);
        trim(val);
        kv[key] = val;
    }
    return kv;
}

} // namespace

void save_reservoir(const std::string& dir, const LinearReservoir& r) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    char buf[64];
    std::ofstream mf(dir + "/manifest.txt", std::ios::binary);
    mf << "n = " << r.state_dim() << "\n";
    mf << "m = " << r.input_dim() << "\n";
    mf << "d = " << r.output_dim() << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", r.lambda);
    mf << "lambda = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", r.input_bound);
    mf << "input_bound = " << buf << "\n";
    write_matrix_csv(dir + "/W.csv", r.w);
    write_matrix_csv(dir + "/V.csv", r.v);
    write_matrix_csv(dir + "/readout.csv", r.readout.a);
}

LinearReservoir load_reservoir(const std::string& dir) {
    const auto kv = read_manifest(dir + "/manifest.txt");
    for (const char* key : {"n", "m", "d", "lambda", "input_bound"})
        if (!kv.count(key)) throw Error("manifest missing key: " + std::string(key));
    Matrix w = read_matrix_csv(dir + "/W.csv");
    Matrix v = read_matrix_csv(dir + "/V.csv");
    LinearReadout readout;
    readout.a = read_matrix_csv(dir + "/readout.csv");
    const double lambda = std::stod(kv.at("lambda"));
    const double bound = std::stod(kv.at("input_bound"));
    if (w.rows() != std::stoul(kv.at("n")) || v.cols() != std::stoul(kv.at("m")) ||
        readout.a.rows() != std::stoul(kv.at("d")))
        throw Error("manifest dimensions disagree with CSV payloads");
    return make_reservoir(std::move(w), std::move(v), std::move(readout), bound, lambda);
}

} // namespace scr
