#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "ffa/gaussian.hpp"

namespace ffa {

using Eigen::Matrix2d;
using Eigen::Vector2d;

// ---------------------------------------------------------------------------
// Bivariate spot/index model families. Coordinate conventions are fixed per
// family so that the conditional laws are Gaussian: log for GBM coordinates,
// level for OU coordinates.
// ---------------------------------------------------------------------------

struct GbmParams {
    double mu = 0.0;         // spot drift, per year
    double mu_tilde = 0.0;   // index drift, per year
    double sigma = 0.0;      // spot volatility, per sqrt(year)
    double sigma_tilde = 0.0;
    double rho = 0.0;        // Brownian correlation, in (-1, 1)
    void validate() const;
    bool operator==(const GbmParams&) const = default;
};

struct OuParams {
    double mu = 0.0;         // spot long-term level, price units
    double mu_tilde = 0.0;
    double alpha = 0.0;      // spot mean-reversion rate, per year
    double alpha_tilde = 0.0;
    double sigma = 0.0;      // price units per sqrt(year)
    double sigma_tilde = 0.0;
    double rho = 0.0;
    void validate() const;
    bool operator==(const OuParams&) const = default;
};

/// Spot GBM, index OU.
struct MixedParams {
    double mu = 0.0;
    double sigma = 0.0;
    double mu_tilde = 0.0;
    double alpha_tilde = 0.0;
    double sigma_tilde = 0.0;
    double rho = 0.0;
    void validate() const;
    bool operator==(const MixedParams&) const = default;
};

enum class Family { Gbm, Ou, Mixed };

const char* family_name(Family f);

struct ModelSpec {
    Family family = Family::Gbm;
    std::variant<GbmParams, OuParams, MixedParams> params;

    static ModelSpec gbm(GbmParams p);
    static ModelSpec ou(OuParams p);
    static ModelSpec mixed(MixedParams p);

    std::array<Coord, 2> coords() const;
    void validate() const;

    const GbmParams& as_gbm() const { return std::get<GbmParams>(params); }
    const OuParams& as_ou() const { return std::get<OuParams>(params); }
    const MixedParams& as_mixed() const { return std::get<MixedParams>(params); }

    bool operator==(const ModelSpec&) const = default;
};

/// Exact-step conditional law of X(s + horizon) given level-unit state at s,
/// expressed in the family's coordinate convention.
GaussianLaw conditional_law(const ModelSpec& model, const Vector2d& state_level, double horizon);

/// One exact transition step in family coordinates:
/// next = A * state + b + eps, eps ~ N(0, noise_cov).
struct AffineGaussianKernel {
    Matrix2d A;
    Vector2d b;
    Matrix2d noise_cov;
    std::array<Coord, 2> coords;
    double dt = 0.0;
};

AffineGaussianKernel transition_kernel(const ModelSpec& model, double dt);

/// k-fold composition of a kernel (mean map and accumulated covariance).
AffineGaussianKernel compose(const AffineGaussianKernel& kernel, int k);

/// Conditional law implied by a kernel after k steps from a level-unit state.
GaussianLaw kernel_law(const AffineGaussianKernel& kernel, const Vector2d& state_level, int k);

// ---------------------------------------------------------------------------
// Path simulation
// ---------------------------------------------------------------------------

/// Simulated paths in LEVEL units (log coordinates exponentiated on output).
/// values layout: path-major, then step (0..n_steps), then coordinate.
struct PathSet {
    int n_paths = 0;
    int n_steps = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> values;

    double at(int path, int step, int coord) const {
        return values[(static_cast<std::size_t>(path) * (n_steps + 1) + step) * 2 + coord];
    }
};

/// Exact-step simulation. Path i always consumes the substream derived from
/// (seed, i), so output is identical for any n_threads.
PathSet simulate_paths(const AffineGaussianKernel& kernel, const Vector2d& init_level,
                       int n_paths, int n_steps, std::uint64_t seed, int n_threads = 1);

/// Debug export: path_id, step, S, S_tilde.
void write_csv(const PathSet& paths, std::ostream& out);

}  // namespace ffa
