#include "ffa/barycenter.hpp"

#include <cmath>

namespace ffa {

namespace {

// Weighted right-hand side of the covariance fixed-point equation:
// sum_i w_i (C^{1/2} C_i C^{1/2})^{1/2}.
MatrixXd fixed_point_rhs(const MatrixXd& c_sqrt, const std::vector<MatrixXd>& covs,
                         const std::vector<double>& w) {
    MatrixXd rhs = MatrixXd::Zero(c_sqrt.rows(), c_sqrt.cols());
    for (std::size_t i = 0; i < covs.size(); ++i) {
        MatrixXd inner = c_sqrt * covs[i] * c_sqrt;
        inner = 0.5 * (inner + inner.transpose());  // symmetrize roundoff
        rhs += w[i] * spd_sqrt(inner);
    }
    return 0.5 * (rhs + rhs.transpose());
}

MatrixXd inverse_sqrt(const MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
    VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        ev[i] = ev[i] > 0.0 ? 1.0 / std::sqrt(ev[i]) : 0.0;
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

bool laws_identical(const std::vector<GaussianLaw>& laws) {
    for (std::size_t i = 1; i < laws.size(); ++i)
        if (laws[i].mean != laws[0].mean || laws[i].cov != laws[0].cov) return false;
    return true;
}

}  // namespace

void WeightVector::validate() const {
    if (w.empty()) throw DomainError("WeightVector: empty");
    double sum = 0.0;
    for (double wi : w) {
        if (wi < 0.0) throw DomainError("WeightVector: negative weight");
        sum += wi;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw DomainError("WeightVector: weights must sum to 1");
}

WeightVector WeightVector::uniform(std::size_t m) {
    if (m == 0) throw DomainError("WeightVector: empty");
    return WeightVector{std::vector<double>(m, 1.0 / static_cast<double>(m))};
}

void PriorSet::validate() const {
    if (models.empty()) throw DomainError("PriorSet: no models");
    weights.validate();
    if (weights.w.size() != models.size())
        throw DomainError("PriorSet: weight/model count mismatch");
    for (const auto& m : models) {
        m.validate();
        if (m.family != models.front().family)
            throw DomainError("PriorSet: models must share one family");
    }
}

double w2_distance_sq(const GaussianLaw& p, const GaussianLaw& q) {
    p.validate();
    q.validate();
    if (p.dim() != q.dim() || p.coords != q.coords)
        throw DomainError("w2_distance_sq: dimension or coordinate convention mismatch");
    const MatrixXd p_sqrt = spd_sqrt(p.cov);
    MatrixXd inner = p_sqrt * q.cov * p_sqrt;
    inner = 0.5 * (inner + inner.transpose());
    const double bures = p.cov.trace() + q.cov.trace() - 2.0 * spd_sqrt(inner).trace();
    const double d2 = (p.mean - q.mean).squaredNorm() + bures;
    return d2 > 0.0 ? d2 : 0.0;
}

double frechet_variance(const GaussianLaw& candidate, const std::vector<GaussianLaw>& laws,
                        const WeightVector& weights) {
    weights.validate();
    if (laws.size() != weights.w.size())
        throw DomainError("frechet_variance: law/weight count mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < laws.size(); ++i)
        if (weights.w[i] > 0.0) v += weights.w[i] * w2_distance_sq(candidate, laws[i]);
    return v;
}

BarycenterResult gaussian_barycenter(const std::vector<GaussianLaw>& laws,
                                     const WeightVector& weights, double tol, int max_iter) {
    weights.validate();
    if (laws.size() != weights.w.size())
        throw DomainError("gaussian_barycenter: law/weight count mismatch");

    // Drop zero-weight laws.
    std::vector<GaussianLaw> active;
    std::vector<double> w;
    for (std::size_t i = 0; i < laws.size(); ++i) {
        if (weights.w[i] > 0.0) {
            laws[i].validate();
            if (!active.empty() && (laws[i].dim() != active[0].dim() || laws[i].coords != active[0].coords))
                throw DomainError("gaussian_barycenter: mixed dimensions or conventions");
            active.push_back(laws[i]);
            w.push_back(weights.w[i]);
        }
    }
    if (active.empty()) throw DomainError("gaussian_barycenter: no positive-weight laws");

    BarycenterResult result;
    if (laws_identical(active)) {
        result.law = active.front();
        result.iterations = 0;
        result.residual = 0.0;
        result.frechet_variance = frechet_variance(result.law, laws, weights);
        return result;
    }

    const Eigen::Index d = active[0].dim();
    VectorXd mean = VectorXd::Zero(d);
    std::vector<MatrixXd> covs;
    bool any_pd = false;
    for (std::size_t i = 0; i < active.size(); ++i) {
        mean += w[i] * active[i].mean;
        covs.push_back(0.5 * (active[i].cov + active[i].cov.transpose()));
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(covs.back());
        if (es.eigenvalues().minCoeff() > 0.0) any_pd = true;
    }
    if (!any_pd)
        throw DomainError("gaussian_barycenter: all prior covariances are degenerate");

    // Initialize at the arithmetic covariance mean (PD whenever any input is).
    MatrixXd c = MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < covs.size(); ++i) c += w[i] * covs[i];

    double residual = 0.0;
    for (int iter = 1; iter <= max_iter; ++iter) {
        const MatrixXd c_sqrt = spd_sqrt(c);
        const MatrixXd rhs = fixed_point_rhs(c_sqrt, covs, w);
        residual = (c - rhs).norm();
        if (residual <= tol) {
            result.law = make_law(mean, c, active[0].coords);
            result.iterations = iter - 1;
            result.residual = residual;
            result.frechet_variance = frechet_variance(result.law, laws, weights);
            return result;
        }
        const MatrixXd c_isqrt = inverse_sqrt(c);
        MatrixXd next = c_isqrt * rhs * rhs * c_isqrt;
        c = 0.5 * (next + next.transpose());
    }
    throw NonConvergenceError("gaussian_barycenter: fixed point not converged", residual, max_iter);
}

AffineGaussianKernel aggregate_kernel(const PriorSet& prior, double dt, double tol, int max_iter) {
    prior.validate();

    std::vector<const ModelSpec*> active;
    std::vector<double> w;
    for (std::size_t i = 0; i < prior.models.size(); ++i) {
        if (prior.weights.w[i] > 0.0) {
            active.push_back(&prior.models[i]);
            w.push_back(prior.weights.w[i]);
        }
    }
    if (active.empty()) throw DomainError("aggregate_kernel: no positive-weight models");

    // Identical active models aggregate to themselves, bit for bit.
    bool identical = true;
    for (std::size_t i = 1; i < active.size(); ++i)
        if (!(*active[i] == *active[0])) identical = false;
    if (identical) return transition_kernel(*active[0], dt);

    const auto coords = active[0]->coords();
    Matrix2d a = Matrix2d::Zero();
    Vector2d b = Vector2d::Zero();
    std::vector<GaussianLaw> step_laws;
    std::vector<Coord> cvec{coords[0], coords[1]};
    for (std::size_t i = 0; i < active.size(); ++i) {
        const AffineGaussianKernel k = transition_kernel(*active[i], dt);
        a += w[i] * k.A;
        b += w[i] * k.b;
        step_laws.push_back(make_law(Vector2d::Zero(), k.noise_cov, cvec));
    }
    WeightVector wv{w};
    // Active weights already sum to 1 up to roundoff; renormalize exactly.
    double sum = 0.0;
    for (double wi : wv.w) sum += wi;
    for (double& wi : wv.w) wi /= sum;
    const BarycenterResult bc = gaussian_barycenter(step_laws, wv, tol, max_iter);

    AffineGaussianKernel out;
    out.A = a;
    out.b = b;
    out.noise_cov = bc.law.cov;
    out.coords = coords;
    out.dt = dt;
    return out;
}

BarycenterResult aggregate_horizon_law(const PriorSet& prior, const Vector2d& state_level,
                                       double horizon, double tol, int max_iter) {
    prior.validate();
    std::vector<GaussianLaw> laws;
    laws.reserve(prior.models.size());
    for (const auto& m : prior.models) laws.push_back(conditional_law(m, state_level, horizon));
    return gaussian_barycenter(laws, prior.weights, tol, max_iter);
}

}  // namespace ffa
