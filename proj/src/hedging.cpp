#include "ffa/hedging.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace ffa {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw DomainError(msg);
}

double schedule_average(const PathSet& paths, const SettlementSchedule& schedule, int path,
                        int coord) {
    double sum = 0.0;
    for (int t : schedule.dates) sum += paths.at(path, t, coord);
    return sum / static_cast<double>(schedule.dates.size());
}

void check_schedule_range(const SettlementSchedule& schedule, const PathSet& paths) {
    schedule.validate();
    if (schedule.horizon() > paths.n_steps)
        throw DomainError("SettlementSchedule: date beyond simulated range");
}

double sided(double strike, double x, PayoffSide side) {
    const double intrinsic = side == PayoffSide::PutForm ? strike - x : x - strike;
    return intrinsic > 0.0 ? intrinsic : 0.0;
}

double conditional_mean_level(const GaussianLaw& law, int coord) {
    const double m = law.mean[coord];
    if (law.coords[coord] == Coord::Log) return std::exp(m + 0.5 * law.cov(coord, coord));
    return m;
}

}  // namespace

void MarketConfig::validate() const {
    require(D > 0.0, "MarketConfig: D must be positive");
    require(s0 > 0.0 && s0_tilde > 0.0, "MarketConfig: initial prices must be positive");
}

void SettlementSchedule::validate() const {
    require(!dates.empty(), "SettlementSchedule: empty");
    require(dates.front() >= 1, "SettlementSchedule: dates start at step 1");
    for (std::size_t i = 1; i < dates.size(); ++i)
        require(dates[i] > dates[i - 1], "SettlementSchedule: dates must be strictly increasing");
}

SettlementSchedule SettlementSchedule::single(int t) {
    SettlementSchedule s{{t}};
    s.validate();
    return s;
}

SettlementSchedule SettlementSchedule::final_days(int t, int n) {
    require(n >= 1 && n <= t, "SettlementSchedule: window must fit in horizon");
    SettlementSchedule s;
    s.dates.resize(n);
    std::iota(s.dates.begin(), s.dates.end(), t - n + 1);
    return s;
}

SettlementSchedule SettlementSchedule::all(int t) { return final_days(t, t); }

void ObligationSpec::validate() const { schedule.validate(); }

void InstrumentSpec::validate() const {
    schedule.validate();
    const bool option = kind == InstrumentKind::EuroOption || kind == InstrumentKind::AvgOption;
    if (option)
        require(strike > 0.0, "InstrumentSpec: option strike must be positive");
    else
        require(strike >= 0.0, "InstrumentSpec: forward strike must be nonnegative");
}

Admissible Admissible::budget(double cap) {
    if (cap <= 0.0) throw DomainError("Admissible: budget cap must be positive");
    return {Kind::NonNegativeCap, cap};
}

void RegularizationSpec::validate() const {
    require(lambda >= 0.0, "RegularizationSpec: lambda must be nonnegative");
}

VectorXd obligation_payoff(const PathSet& paths, const ObligationSpec& spec,
                           const MarketConfig& mkt) {
    mkt.validate();
    spec.validate();
    check_schedule_range(spec.schedule, paths);
    VectorXd out(paths.n_paths);
    if (spec.kind == ObligationKind::Terminal) {
        const int t = spec.schedule.horizon();
        for (int p = 0; p < paths.n_paths; ++p) out[p] = mkt.D * paths.at(p, t, 0);
    } else {
        for (int p = 0; p < paths.n_paths; ++p)
            out[p] = mkt.D * schedule_average(paths, spec.schedule, p, 0);
    }
    return out;
}

VectorXd instrument_payoff(const PathSet& paths, const InstrumentSpec& spec,
                           const MarketConfig& mkt) {
    mkt.validate();
    spec.validate();
    check_schedule_range(spec.schedule, paths);
    VectorXd out(paths.n_paths);
    const int t = spec.schedule.horizon();
    for (int p = 0; p < paths.n_paths; ++p) {
        double x;
        switch (spec.kind) {
            case InstrumentKind::EuroOption:
            case InstrumentKind::EuroForward: x = paths.at(p, t, 1); break;
            default: x = schedule_average(paths, spec.schedule, p, 1); break;
        }
        switch (spec.kind) {
            case InstrumentKind::EuroOption:
            case InstrumentKind::AvgOption: out[p] = mkt.D * sided(spec.strike, x, spec.side); break;
            default: out[p] = mkt.D * (x - spec.strike); break;
        }
    }
    return out;
}

double ffa_forward(const ModelSpec& model, const Vector2d& state_level,
                   const SettlementSchedule& schedule, double dt, int coord) {
    schedule.validate();
    require(coord == 0 || coord == 1, "ffa_forward: coord must be 0 or 1");
    require(dt > 0.0, "ffa_forward: dt must be positive");
    double sum = 0.0;
    for (int t : schedule.dates)
        sum += conditional_mean_level(conditional_law(model, state_level, t * dt), coord);
    return sum / static_cast<double>(schedule.dates.size());
}

double ffa_forward(const AffineGaussianKernel& kernel, const Vector2d& state_level,
                   const SettlementSchedule& schedule, int coord) {
    schedule.validate();
    require(coord == 0 || coord == 1, "ffa_forward: coord must be 0 or 1");
    double sum = 0.0;
    for (int t : schedule.dates)
        sum += conditional_mean_level(kernel_law(kernel, state_level, t), coord);
    return sum / static_cast<double>(schedule.dates.size());
}

McPrice price_option_mc(const PathSet& paths, const InstrumentSpec& spec,
                        const MarketConfig& mkt) {
    const VectorXd payoff = instrument_payoff(paths, spec, mkt);
    const double n = static_cast<double>(payoff.size());
    const double disc = std::exp(-mkt.r * spec.schedule.horizon() * paths.dt);
    const double mean = payoff.mean();
    const double var = (payoff.array() - mean).square().sum() / (n - 1.0);
    return {disc * mean, disc * std::sqrt(var / n)};
}

namespace {

struct Moments {
    MatrixXd G;     // mean psi' psi
    VectorXd g;     // mean psi' phi
    double phi2;    // mean phi^2
};

Moments compute_moments(const VectorXd& phi, const MatrixXd& psi) {
    if (phi.size() != psi.rows()) throw DomainError("solve_hedge: phi/psi row mismatch");
    if (psi.cols() < 1) throw DomainError("solve_hedge: no instruments");
    const double n = static_cast<double>(phi.size());
    Moments m;
    m.G = psi.transpose() * psi / n;
    m.g = psi.transpose() * phi / n;
    m.phi2 = phi.squaredNorm() / n;
    return m;
}

double objective(const Moments& m, const VectorXd& theta) {
    return m.phi2 - 2.0 * m.g.dot(theta) + theta.dot(m.G * theta);
}

// Unconstrained LASSO via cyclic coordinate descent with soft thresholding.
VectorXd lasso_descent(const Moments& m, double lambda) {
    const Eigen::Index k = m.G.cols();
    VectorXd theta = VectorXd::Zero(k);
    for (int sweep = 0; sweep < 100000; ++sweep) {
        double delta = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            const double rho = m.g[i] - m.G.row(i).dot(theta) + m.G(i, i) * theta[i];
            const double thr = 0.5 * lambda;
            double next = 0.0;
            if (rho > thr)
                next = (rho - thr) / m.G(i, i);
            else if (rho < -thr)
                next = (rho + thr) / m.G(i, i);
            delta = std::max(delta, std::abs(next - theta[i]));
            theta[i] = next;
        }
        if (delta < 1e-14) break;
    }
    return theta;
}

// Solve the restricted normal equations on a support set; entries off the
// support stay zero. Returns false if the restricted system is singular.
bool solve_support(const Moments& m, const VectorXd& g_eff, unsigned mask, VectorXd& theta) {
    const Eigen::Index k = m.G.cols();
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < k; ++i)
        if (mask & (1u << i)) idx.push_back(i);
    theta = VectorXd::Zero(k);
    if (idx.empty()) return true;
    MatrixXd gs(idx.size(), idx.size());
    VectorXd gv(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
        gv[a] = g_eff[idx[a]];
        for (std::size_t b = 0; b < idx.size(); ++b) gs(a, b) = m.G(idx[a], idx[b]);
    }
    Eigen::FullPivLU<MatrixXd> lu(gs);
    if (!lu.isInvertible()) return false;
    const VectorXd sol = lu.solve(gv);
    for (std::size_t a = 0; a < idx.size(); ++a) theta[idx[a]] = sol[a];
    return true;
}

// Restricted minimizer on a support set subject to sum(theta) = cap
// (bordered KKT system).
bool solve_support_capped(const Moments& m, const VectorXd& g_eff, unsigned mask, double cap,
                          VectorXd& theta) {
    const Eigen::Index k = m.G.cols();
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < k; ++i)
        if (mask & (1u << i)) idx.push_back(i);
    theta = VectorXd::Zero(k);
    if (idx.empty()) return false;
    const Eigen::Index s = static_cast<Eigen::Index>(idx.size());
    MatrixXd kkt = MatrixXd::Zero(s + 1, s + 1);
    VectorXd rhs(s + 1);
    for (Eigen::Index a = 0; a < s; ++a) {
        rhs[a] = g_eff[idx[a]];
        kkt(a, s) = 0.5;  // G theta + (nu/2) 1 = g_eff
        kkt(s, a) = 1.0;  // 1' theta = cap
        for (Eigen::Index b = 0; b < s; ++b) kkt(a, b) = m.G(idx[a], idx[b]);
    }
    rhs[s] = cap;
    kkt(s, s) = 0.0;
    Eigen::FullPivLU<MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return false;
    const VectorXd sol = lu.solve(rhs);
    for (Eigen::Index a = 0; a < s; ++a) theta[idx[a]] = sol[a];
    return true;
}

}  // namespace

HedgeSolution solve_hedge(const VectorXd& phi, const MatrixXd& psi, const Admissible& admissible,
                          const RegularizationSpec& reg) {
    reg.validate();
    const Moments m = compute_moments(phi, psi);
    const Eigen::Index k = m.G.cols();
    if (k > 20) throw DomainError("solve_hedge: too many instruments for exact enumeration");
    if (spd_condition(m.G) > 1e12)
        throw IllConditionedError("solve_hedge: instrument payoffs are rank deficient on the sample",
                                  spd_condition(m.G));

    VectorXd theta;
    if (admissible.kind == Admissible::Kind::Unconstrained) {
        theta = reg.lambda > 0.0 ? lasso_descent(m, reg.lambda) : VectorXd(spd_solve(m.G, m.g));
    } else {
        // Nonnegative orthant (optionally budget-capped): the L1 penalty is
        // linear there, so it folds into the linear term.
        VectorXd g_eff = m.g.array() - 0.5 * reg.lambda;
        const bool capped = admissible.kind == Admissible::Kind::NonNegativeCap;
        const double cap = admissible.cap;
        double best = std::numeric_limits<double>::infinity();
        VectorXd cand;
        auto consider = [&](const VectorXd& t) {
            for (Eigen::Index i = 0; i < k; ++i)
                if (t[i] < -1e-12) return;
            if (capped && t.sum() > cap + 1e-9) return;
            VectorXd clipped = t.cwiseMax(0.0);
            const double val = objective(m, clipped) + reg.lambda * clipped.sum();
            if (val < best) {
                best = val;
                theta = clipped;
            }
        };
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            if (solve_support(m, g_eff, mask, cand)) consider(cand);
            if (capped && mask != 0 && solve_support_capped(m, g_eff, mask, cap, cand))
                consider(cand);
        }
        if (!std::isfinite(best)) throw DomainError("solve_hedge: no feasible candidate");
    }
    return {theta, objective(m, theta)};
}

double kkt_violation(const VectorXd& phi, const MatrixXd& psi, const VectorXd& theta,
                     const Admissible& admissible, const RegularizationSpec& reg) {
    const Moments m = compute_moments(phi, psi);
    if (theta.size() != m.G.cols()) throw DomainError("kkt_violation: theta size mismatch");
    const VectorXd grad = 2.0 * (m.G * theta - m.g);
    const double lambda = reg.lambda;
    double v = 0.0;

    if (admissible.kind == Admissible::Kind::Unconstrained) {
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            if (theta[i] != 0.0)
                v = std::max(v, std::abs(grad[i] + lambda * (theta[i] > 0.0 ? 1.0 : -1.0)));
            else
                v = std::max(v, std::max(0.0, std::abs(grad[i]) - lambda));
        }
        return v;
    }

    // Nonnegative cases: effective gradient includes the (linear) L1 term.
    VectorXd geff = grad.array() + lambda;
    double nu = 0.0;  // multiplier of the budget constraint
    if (admissible.kind == Admissible::Kind::NonNegativeCap &&
        theta.sum() > admissible.cap - 1e-9) {
        double sum = 0.0;
        int cnt = 0;
        for (Eigen::Index i = 0; i < theta.size(); ++i)
            if (theta[i] > 1e-12) { sum += -geff[i]; ++cnt; }
        nu = cnt > 0 ? std::max(0.0, sum / cnt) : 0.0;
    }
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        v = std::max(v, std::max(0.0, -theta[i]));  // primal feasibility
        if (theta[i] > 1e-12)
            v = std::max(v, std::abs(geff[i] + nu));  // stationarity on support
        else
            v = std::max(v, std::max(0.0, -(geff[i] + nu)));  // dual feasibility
    }
    if (admissible.kind == Admissible::Kind::NonNegativeCap)
        v = std::max(v, theta.sum() - admissible.cap);
    return v;
}

double expected_profit_pct(const MatrixXd& psi, const VectorXd& theta, const MarketConfig& mkt) {
    mkt.validate();
    if (theta.size() != psi.cols()) throw DomainError("expected_profit_pct: theta size mismatch");
    return 100.0 * (psi * theta).mean() / (mkt.D * mkt.s0);
}

}  // namespace ffa
