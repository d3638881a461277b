#include "ffa/models.hpp"

#include <cmath>
#include <ostream>
#include <thread>

namespace ffa {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw DomainError(msg);
}

// Exact OU covariance entries over an interval tau.
double ou_var(double sigma, double alpha, double tau) {
    return sigma * sigma / (2.0 * alpha) * (1.0 - std::exp(-2.0 * alpha * tau));
}

}  // namespace

void GbmParams::validate() const {
    require(sigma > 0.0 && sigma_tilde > 0.0, "GbmParams: volatilities must be positive");
    require(std::abs(rho) < 1.0, "GbmParams: |rho| must be < 1");
}

void OuParams::validate() const {
    require(alpha > 0.0 && alpha_tilde > 0.0, "OuParams: mean-reversion rates must be positive");
    require(sigma > 0.0 && sigma_tilde > 0.0, "OuParams: volatilities must be positive");
    require(std::abs(rho) < 1.0, "OuParams: |rho| must be < 1");
}

void MixedParams::validate() const {
    require(sigma > 0.0 && sigma_tilde > 0.0, "MixedParams: volatilities must be positive");
    require(alpha_tilde > 0.0, "MixedParams: alpha_tilde must be positive");
    require(std::abs(rho) < 1.0, "MixedParams: |rho| must be < 1");
}

const char* family_name(Family f) {
    switch (f) {
        case Family::Gbm: return "gbm";
        case Family::Ou: return "ou";
        case Family::Mixed: return "mixed";
    }
    return "?";
}

ModelSpec ModelSpec::gbm(GbmParams p) {
    ModelSpec m{Family::Gbm, std::move(p)};
    m.validate();
    return m;
}

ModelSpec ModelSpec::ou(OuParams p) {
    ModelSpec m{Family::Ou, std::move(p)};
    m.validate();
    return m;
}

ModelSpec ModelSpec::mixed(MixedParams p) {
    ModelSpec m{Family::Mixed, std::move(p)};
    m.validate();
    return m;
}

std::array<Coord, 2> ModelSpec::coords() const {
    switch (family) {
        case Family::Gbm: return {Coord::Log, Coord::Log};
        case Family::Ou: return {Coord::Level, Coord::Level};
        case Family::Mixed: return {Coord::Log, Coord::Level};
    }
    return {Coord::Log, Coord::Log};
}

void ModelSpec::validate() const {
    switch (family) {
        case Family::Gbm: require(std::holds_alternative<GbmParams>(params), "ModelSpec: family/params mismatch"); as_gbm().validate(); break;
        case Family::Ou: require(std::holds_alternative<OuParams>(params), "ModelSpec: family/params mismatch"); as_ou().validate(); break;
        case Family::Mixed: require(std::holds_alternative<MixedParams>(params), "ModelSpec: family/params mismatch"); as_mixed().validate(); break;
    }
}

GaussianLaw conditional_law(const ModelSpec& model, const Vector2d& state_level, double horizon) {
    model.validate();
    require(horizon > 0.0, "conditional_law: horizon must be positive");
    const auto coords = model.coords();
    for (int c = 0; c < 2; ++c)
        if (coords[c] == Coord::Log)
            require(state_level[c] > 0.0, "conditional_law: nonpositive state for a log coordinate");

    Vector2d mean;
    Matrix2d cov;
    const double tau = horizon;
    switch (model.family) {
        case Family::Gbm: {
            const auto& p = model.as_gbm();
            mean[0] = std::log(state_level[0]) + (p.mu - 0.5 * p.sigma * p.sigma) * tau;
            mean[1] = std::log(state_level[1]) + (p.mu_tilde - 0.5 * p.sigma_tilde * p.sigma_tilde) * tau;
            cov(0, 0) = p.sigma * p.sigma * tau;
            cov(1, 1) = p.sigma_tilde * p.sigma_tilde * tau;
            cov(0, 1) = cov(1, 0) = p.rho * p.sigma * p.sigma_tilde * tau;
            break;
        }
        case Family::Ou: {
            const auto& p = model.as_ou();
            const double e1 = std::exp(-p.alpha * tau);
            const double e2 = std::exp(-p.alpha_tilde * tau);
            mean[0] = e1 * state_level[0] + p.mu * (1.0 - e1);
            mean[1] = e2 * state_level[1] + p.mu_tilde * (1.0 - e2);
            cov(0, 0) = ou_var(p.sigma, p.alpha, tau);
            cov(1, 1) = ou_var(p.sigma_tilde, p.alpha_tilde, tau);
            cov(0, 1) = cov(1, 0) =
                0.5 * p.rho * p.sigma * p.sigma_tilde *
                std::sqrt((1.0 - std::exp(-2.0 * p.alpha * tau)) *
                          (1.0 - std::exp(-2.0 * p.alpha_tilde * tau)) / (p.alpha * p.alpha_tilde));
            break;
        }
        case Family::Mixed: {
            const auto& p = model.as_mixed();
            const double e2 = std::exp(-p.alpha_tilde * tau);
            mean[0] = std::log(state_level[0]) + (p.mu - 0.5 * p.sigma * p.sigma) * tau;
            mean[1] = e2 * state_level[1] + p.mu_tilde * (1.0 - e2);
            cov(0, 0) = p.sigma * p.sigma * tau;
            cov(1, 1) = ou_var(p.sigma_tilde, p.alpha_tilde, tau);
            cov(0, 1) = cov(1, 0) =
                p.rho * p.sigma * p.sigma_tilde *
                std::sqrt(tau * (1.0 - std::exp(-2.0 * p.alpha_tilde * tau)) / (2.0 * p.alpha_tilde));
            break;
        }
    }
    return make_law(mean, cov, {coords[0], coords[1]});
}

AffineGaussianKernel transition_kernel(const ModelSpec& model, double dt) {
    model.validate();
    require(dt > 0.0, "transition_kernel: dt must be positive");
    AffineGaussianKernel k;
    k.coords = model.coords();
    k.dt = dt;
    switch (model.family) {
        case Family::Gbm: {
            const auto& p = model.as_gbm();
            k.A = Matrix2d::Identity();
            k.b = Vector2d{(p.mu - 0.5 * p.sigma * p.sigma) * dt,
                           (p.mu_tilde - 0.5 * p.sigma_tilde * p.sigma_tilde) * dt};
            break;
        }
        case Family::Ou: {
            const auto& p = model.as_ou();
            const double e1 = std::exp(-p.alpha * dt);
            const double e2 = std::exp(-p.alpha_tilde * dt);
            k.A = Vector2d{e1, e2}.asDiagonal();
            k.b = Vector2d{p.mu * (1.0 - e1), p.mu_tilde * (1.0 - e2)};
            break;
        }
        case Family::Mixed: {
            const auto& p = model.as_mixed();
            const double e2 = std::exp(-p.alpha_tilde * dt);
            k.A = Vector2d{1.0, e2}.asDiagonal();
            k.b = Vector2d{(p.mu - 0.5 * p.sigma * p.sigma) * dt, p.mu_tilde * (1.0 - e2)};
            break;
        }
    }
    // One-step noise equals the family's conditional covariance at t - s = dt,
    // which is state-independent in family coordinates.
    const Vector2d probe{1.0, 1.0};
    k.noise_cov = conditional_law(model, probe, dt).cov;
    return k;
}

AffineGaussianKernel compose(const AffineGaussianKernel& kernel, int k) {
    if (k < 1) throw DomainError("compose: k must be >= 1");
    AffineGaussianKernel out = kernel;
    out.dt = kernel.dt * k;
    Matrix2d a = Matrix2d::Identity();
    Vector2d b = Vector2d::Zero();
    Matrix2d cov = Matrix2d::Zero();
    for (int i = 0; i < k; ++i) {
        b = kernel.A * b + kernel.b;
        cov = kernel.A * cov * kernel.A.transpose() + kernel.noise_cov;
        a = kernel.A * a;
    }
    out.A = a;
    out.b = b;
    out.noise_cov = cov;
    return out;
}

GaussianLaw kernel_law(const AffineGaussianKernel& kernel, const Vector2d& state_level, int k) {
    const AffineGaussianKernel total = compose(kernel, k);
    Vector2d x;
    for (int c = 0; c < 2; ++c) {
        if (kernel.coords[c] == Coord::Log) {
            if (state_level[c] <= 0.0)
                throw DomainError("kernel_law: nonpositive state for a log coordinate");
            x[c] = std::log(state_level[c]);
        } else {
            x[c] = state_level[c];
        }
    }
    return make_law(total.A * x + total.b, total.noise_cov, {kernel.coords[0], kernel.coords[1]});
}

PathSet simulate_paths(const AffineGaussianKernel& kernel, const Vector2d& init_level,
                       int n_paths, int n_steps, std::uint64_t seed, int n_threads) {
    if (n_paths < 1 || n_steps < 1)
        throw DomainError("simulate_paths: n_paths and n_steps must be >= 1");

    Vector2d x0;
    for (int c = 0; c < 2; ++c) {
        if (kernel.coords[c] == Coord::Log) {
            if (init_level[c] <= 0.0)
                throw DomainError("simulate_paths: nonpositive init for a log coordinate");
            x0[c] = std::log(init_level[c]);
        } else {
            x0[c] = init_level[c];
        }
    }

    PathSet out;
    out.n_paths = n_paths;
    out.n_steps = n_steps;
    out.dt = kernel.dt;
    out.seed = seed;
    out.values.resize(static_cast<std::size_t>(n_paths) * (n_steps + 1) * 2);

    const MatrixXd noise_factor_dyn = psd_factor(kernel.noise_cov);
    const double l00 = noise_factor_dyn(0, 0), l01 = noise_factor_dyn(0, 1);
    const double l10 = noise_factor_dyn(1, 0), l11 = noise_factor_dyn(1, 1);
    const double a00 = kernel.A(0, 0), a01 = kernel.A(0, 1);
    const double a10 = kernel.A(1, 0), a11 = kernel.A(1, 1);
    const double b0 = kernel.b[0], b1 = kernel.b[1];
    const bool log0 = kernel.coords[0] == Coord::Log;
    const bool log1 = kernel.coords[1] == Coord::Log;

    auto run_block = [&](int first, int last) {
        const std::size_t stride = static_cast<std::size_t>(n_steps + 1) * 2;
        for (int p = first; p < last; ++p) {
            NormalStream stream(substream_seed(seed, static_cast<std::uint64_t>(p)));
            double* row = out.values.data() + p * stride;
            double x = x0[0], y = x0[1];
            row[0] = log0 ? std::exp(x) : x;
            row[1] = log1 ? std::exp(y) : y;
            for (int s = 1; s <= n_steps; ++s) {
                const double z0 = stream.normal();
                const double z1 = stream.normal();
                const double nx = a00 * x + a01 * y + b0 + l00 * z0 + l01 * z1;
                const double ny = a10 * x + a11 * y + b1 + l10 * z0 + l11 * z1;
                x = nx;
                y = ny;
                row[2 * s] = log0 ? std::exp(x) : x;
                row[2 * s + 1] = log1 ? std::exp(y) : y;
            }
        }
    };

    if (n_threads <= 1) {
        run_block(0, n_paths);
    } else {
        std::vector<std::thread> workers;
        const int block = (n_paths + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const int first = t * block;
            const int last = std::min(n_paths, first + block);
            if (first >= last) break;
            workers.emplace_back(run_block, first, last);
        }
        for (auto& w : workers) w.join();
    }
    return out;
}

void write_csv(const PathSet& paths, std::ostream& out) {
    out << "path_id,step,S,S_tilde\n";
    for (int p = 0; p < paths.n_paths; ++p)
        for (int s = 0; s <= paths.n_steps; ++s)
            out << p << ',' << s << ',' << paths.at(p, s, 0) << ',' << paths.at(p, s, 1) << '\n';
}

}  // namespace ffa
