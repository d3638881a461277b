#pragma once

#include <vector>

#include "ffa/models.hpp"

namespace ffa {

struct WeightVector {
    std::vector<double> w;
    void validate() const;  // entries >= 0, sum to 1 within 1e-12
    static WeightVector uniform(std::size_t m);
};

/// m models of a common family plus simplex weights (the prior set).
struct PriorSet {
    std::vector<ModelSpec> models;
    WeightVector weights;
    void validate() const;
};

struct BarycenterResult {
    GaussianLaw law;
    int iterations = 0;
    double residual = 0.0;
    double frechet_variance = 0.0;
};

/// Squared 2-Wasserstein distance between Gaussian laws (Bures form):
/// |m1 - m2|^2 + tr C1 + tr C2 - 2 tr (C1^{1/2} C2 C1^{1/2})^{1/2}.
double w2_distance_sq(const GaussianLaw& p, const GaussianLaw& q);

double frechet_variance(const GaussianLaw& candidate, const std::vector<GaussianLaw>& laws,
                        const WeightVector& weights);

/// Fixed-point barycenter of Gaussian laws: mean is the weighted average,
/// covariance solves C = sum_i w_i (C^{1/2} C_i C^{1/2})^{1/2}.
/// Zero-weight laws are dropped before iteration; identical inputs
/// short-circuit to that law with residual 0.
BarycenterResult gaussian_barycenter(const std::vector<GaussianLaw>& laws,
                                     const WeightVector& weights, double tol = 1e-12,
                                     int max_iter = 500);

/// Aggregate one-step transition kernel of a prior set: barycentric affine
/// mean map (A_B = sum w_i A_i, b_B = sum w_i b_i) with noise covariance the
/// barycenter of the per-model one-step covariances.
AffineGaussianKernel aggregate_kernel(const PriorSet& prior, double dt, double tol = 1e-12,
                                      int max_iter = 500);

/// Alternate "marginal mode": barycenter of the horizon-T conditional laws.
/// Usable only for terminal-value payoffs; for GBM it coincides with the
/// composition of aggregate_kernel.
BarycenterResult aggregate_horizon_law(const PriorSet& prior, const Vector2d& state_level,
                                       double horizon, double tol = 1e-12, int max_iter = 500);

}  // namespace ffa
