#pragma once

#include <vector>

#include "ffa/rng.hpp"
#include "ffa/spd.hpp"

namespace ffa {

/// Per-coordinate convention: whether a coordinate lives on log-price or
/// price-level scale. A law is Gaussian only in its own convention.
enum class Coord { Log, Level };

struct GaussianLaw {
    VectorXd mean;
    MatrixXd cov;
    std::vector<Coord> coords;

    Eigen::Index dim() const { return mean.size(); }
    void validate() const;
};

GaussianLaw make_law(VectorXd mean, MatrixXd cov, std::vector<Coord> coords);

/// n i.i.d. draws from N(mean, cov), one per row. PSD factorization:
/// degenerate directions get zero noise. Deterministic given the stream.
MatrixXd sample_gaussian(const GaussianLaw& law, int n, NormalStream& stream);

}  // namespace ffa
