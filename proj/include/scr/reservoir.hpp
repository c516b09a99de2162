#pragma once

#include <string>
#include <vector>

#include "scr/matrix.hpp"

namespace scr {

// Trained (or composed) linear readout h(x) = A x.
struct LinearReadout {
    Matrix a;
    // True when this readout is an upstream readout composed with a domain
    // transform rather than a directly trained map.
    bool composed = false;

    Vec apply(const Vec& x) const { return matvec(a, x); }
    std::size_t out_dim() const { return a.rows(); }
    std::size_t in_dim() const { return a.cols(); }
    double lipschitz() const;
};

// Uniformly bounded input stream; every sample's Euclidean norm is <= bound.
struct InputStream {
    std::vector<Vec> samples;
    double bound = 0.0;

    std::size_t length() const { return samples.size(); }
    std::size_t dim() const { return samples.empty() ? 0 : samples.front().size(); }
};

InputStream make_stream(std::vector<Vec> samples);
InputStream make_stream(std::vector<Vec> samples, double bound);
// count i.i.d. streams with entries uniform in [-bound/sqrt(m), bound/sqrt(m)].
std::vector<InputStream> random_streams(std::size_t count, std::size_t len, std::size_t m,
                                        double bound, std::uint64_t seed);

// x_t = W x_{t-1} + V u_t, y_t = h(x_t), with ||W|| < 1.
struct LinearReservoir {
    Matrix w;
    Matrix v;
    LinearReadout readout;
    double lambda = 0.0;
    double input_bound = 0.0;

    std::size_t state_dim() const { return w.rows(); }
    std::size_t input_dim() const { return v.cols(); }
    std::size_t output_dim() const { return readout.out_dim(); }
};

// Validates dimensions/contractivity; measures lambda = operator_norm(w).
LinearReservoir make_reservoir(Matrix w, Matrix v, LinearReadout readout, double input_bound);
// Same checks, but the coupling norm is supplied by a construction that knows
// it exactly (e.g. lambda * orthogonal).
LinearReservoir make_reservoir(Matrix w, Matrix v, LinearReadout readout, double input_bound,
                               double known_lambda);

// States from the zero-start recursion; the first `washout` entries dropped.
std::vector<Vec> drive(const LinearReservoir& r, const InputStream& u, std::size_t washout);
// Readout applied to the driven states.
std::vector<Vec> run(const LinearReservoir& r, const InputStream& u, std::size_t washout);

// Smallest washout w with lambda^w * M * ||V|| / (1 - lambda) < 1e-12.
std::size_t default_washout(const LinearReservoir& r);

// Ridge regression readout: A = Y^T X (X^T X + ridge I)^{-1} over state rows.
LinearReadout train_ridge(const std::vector<Vec>& states, const std::vector<Vec>& targets,
                          double ridge);

// Empirical epsilon-closeness: sup over post-washout steps of ||y_t - y'_t||_2.
double output_distance(const LinearReservoir& r1, const LinearReservoir& r2,
                       const InputStream& u, std::size_t washout);
double output_distance(const std::vector<Vec>& outputs1, const std::vector<Vec>& outputs2);

// Directory persistence: manifest.txt plus W.csv / V.csv / readout.csv.
void save_reservoir(const std::string& dir, const LinearReservoir& r);
LinearReservoir load_reservoir(const std::string& dir);

} // namespace scr
