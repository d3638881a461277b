// Acceptance gate: one PASS/FAIL line per criterion, exit code = failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ffa/config.hpp"

using namespace ffa;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GaussianLaw random_law_2d(NormalStream& stream, double cond_cap = 1e4) {
    // Rotated diagonal covariance with eigenvalues in [1e-2, 1e2]
    // (condition bounded by cond_cap) and N(0, 4) means.
    const double l1 = std::pow(10.0, -2.0 + 4.0 * stream.uniform());
    double l2 = std::pow(10.0, -2.0 + 4.0 * stream.uniform());
    if (l1 / l2 > cond_cap) l2 = l1 / cond_cap;
    if (l2 / l1 > cond_cap) l2 = l1 * cond_cap;
    const double a = 3.14159265358979 * stream.uniform();
    MatrixXd r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    MatrixXd c = r * Eigen::Vector2d(l1, l2).asDiagonal() * r.transpose();
    c = 0.5 * (c + c.transpose());
    VectorXd m(2);
    m << 2.0 * stream.normal(), 2.0 * stream.normal();
    return make_law(m, c, {Coord::Level, Coord::Level});
}

// ---------------------------------------------------------------------- 1
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    NormalStream stream(1001);
    double worst_residual = 0.0;
    bool optimal = true;
    for (int trial = 0; trial < 500; ++trial) {
        const int m = 2 + static_cast<int>(stream.uniform() * 9.0) % 9;
        std::vector<GaussianLaw> laws;
        for (int i = 0; i < m; ++i) laws.push_back(random_law_2d(stream));
        const WeightVector w = WeightVector::uniform(m);
        const BarycenterResult res = gaussian_barycenter(laws, w);
        worst_residual = std::max(worst_residual, res.residual);
        for (int i = 0; i < m; ++i)
            if (res.frechet_variance > frechet_variance(laws[i], laws, w) + 1e-10) optimal = false;
        for (int p = 0; p < 100; ++p) {
            GaussianLaw perturbed = res.law;
            MatrixXd d(2, 2);
            for (int k = 0; k < 4; ++k) d(k / 2, k % 2) = 0.03 * stream.normal();
            perturbed.cov += d * d.transpose();
            perturbed.mean[0] += 0.03 * stream.normal();
            perturbed.mean[1] += 0.03 * stream.normal();
            if (res.frechet_variance > frechet_variance(perturbed, laws, w) + 1e-10)
                optimal = false;
        }
    }
    const double elapsed = seconds_since(t0);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "barycenter fixed point on 500 random prior sets (max residual %.2e <= 1e-12, "
                  "optimality %s, %.1fs <= 10s)",
                  worst_residual, optimal ? "certified" : "VIOLATED", elapsed);
    report(1, worst_residual <= 1e-12 && optimal && elapsed <= 10.0, buf);
}

// ---------------------------------------------------------------------- 2
void criterion_2() {
    NormalStream stream(2002);
    bool ok = true;
    double worst = 0.0;

    // 1-D closed form: sigma_B = sum w_i sigma_i.
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + trial % 5;
        std::vector<GaussianLaw> laws;
        std::vector<double> w(m);
        double wsum = 0.0;
        for (int i = 0; i < m; ++i) {
            VectorXd mu(1);
            mu << stream.normal();
            MatrixXd c(1, 1);
            const double s = 0.2 + 3.0 * stream.uniform();
            c << s * s;
            laws.push_back(make_law(mu, c, {Coord::Level}));
            w[i] = 0.1 + stream.uniform();
            wsum += w[i];
        }
        double sigma_b = 0.0;
        for (int i = 0; i < m; ++i) {
            w[i] /= wsum;
            sigma_b += w[i] * std::sqrt(laws[i].cov(0, 0));
        }
        const BarycenterResult res = gaussian_barycenter(laws, WeightVector{w});
        worst = std::max(worst, std::abs(std::sqrt(res.law.cov(0, 0)) - sigma_b));
        if (std::abs(std::sqrt(res.law.cov(0, 0)) - sigma_b) > 1e-12) ok = false;
    }

    // Commuting 2-D: C_B = (sum w_i C_i^{1/2})^2 for diagonal inputs.
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + trial % 4;
        std::vector<GaussianLaw> laws;
        MatrixXd root_sum = MatrixXd::Zero(2, 2);
        const WeightVector w = WeightVector::uniform(m);
        for (int i = 0; i < m; ++i) {
            VectorXd mu = VectorXd::Zero(2);
            MatrixXd c = MatrixXd::Zero(2, 2);
            c(0, 0) = 0.1 + 9.0 * stream.uniform();
            c(1, 1) = 0.1 + 9.0 * stream.uniform();
            laws.push_back(make_law(mu, c, {Coord::Level, Coord::Level}));
            root_sum += w.w[i] * spd_sqrt(c);
        }
        const MatrixXd expected = root_sum * root_sum;
        const BarycenterResult res = gaussian_barycenter(laws, w);
        if ((res.law.cov - expected).norm() > 1e-10) ok = false;
    }

    // Metric axioms on 1000 random triples.
    bool axioms = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const GaussianLaw a = random_law_2d(stream);
        const GaussianLaw b = random_law_2d(stream);
        const GaussianLaw c = random_law_2d(stream);
        const double ab = w2_distance_sq(a, b);
        if (ab < 0.0) axioms = false;
        if (std::abs(ab - w2_distance_sq(b, a)) > 1e-9 * std::max(1.0, ab)) axioms = false;
        if (w2_distance_sq(a, a) > 1e-9 * std::max(1.0, a.cov.trace())) axioms = false;
        if (std::sqrt(w2_distance_sq(a, c)) >
            std::sqrt(ab) + std::sqrt(w2_distance_sq(b, c)) + 1e-9)
            axioms = false;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "closed-form oracles (1-D worst gap %.2e <= 1e-12; commuting 2-D <= 1e-10; "
                  "metric axioms on 1000 triples %s)",
                  worst, axioms ? "hold" : "VIOLATED");
    report(2, ok && axioms, buf);
}

// ---------------------------------------------------------------------- 3
void criterion_3() {
    const int n = 100000;
    const double dt = 1.0 / 252.0;
    const Vector2d state{50.0, 45.0};
    bool ok = true;
    double worst_sigmas = 0.0;
    double worst_family_time = 0.0;
    double worst_systematic = 0.0;  // closed form vs its own step composition, in SE units
    int n_failed_entries = 0, n_failed_cross = 0;
    std::uint64_t seed = 30003;
    for (Family family : {Family::Gbm, Family::Ou, Family::Mixed}) {
        const auto t0 = std::chrono::steady_clock::now();
        const ModelSpec model = true_model(family);
        const AffineGaussianKernel kernel = transition_kernel(model, dt);
        const auto coords = model.coords();
        for (int horizon : {63, 126, 189, 252}) {
            const PathSet paths = simulate_paths(kernel, state, n, horizon, seed++);
            const GaussianLaw target = conditional_law(model, state, horizon * dt);
            const GaussianLaw composed = kernel_law(kernel, state, horizon);
            Eigen::ArrayXd x(n), y(n);
            for (int p = 0; p < n; ++p) {
                const double s = paths.at(p, horizon, 0);
                const double t = paths.at(p, horizon, 1);
                x[p] = coords[0] == Coord::Log ? std::log(s) : s;
                y[p] = coords[1] == Coord::Log ? std::log(t) : t;
            }
            const double mx = x.mean(), my = y.mean();
            const Eigen::ArrayXd cx = x - mx, cy = y - my;
            const double c00 = cx.square().sum() / (n - 1);
            const double c11 = cy.square().sum() / (n - 1);
            const double c01 = (cx * cy).sum() / (n - 1);
            auto sigmas = [&](double est, double truth, double se, bool is_cross) {
                const double z = std::abs(est - truth) / se;
                worst_sigmas = std::max(worst_sigmas, z);
                if (z > 4.0) {
                    ok = false;
                    ++n_failed_entries;
                    if (is_cross) ++n_failed_cross;
                }
            };
            const double se_cross = std::sqrt(
                (target.cov(0, 0) * target.cov(1, 1) + target.cov(0, 1) * target.cov(0, 1)) / n);
            sigmas(mx, target.mean[0], std::sqrt(target.cov(0, 0) / n), false);
            sigmas(my, target.mean[1], std::sqrt(target.cov(1, 1) / n), false);
            sigmas(c00, target.cov(0, 0),
                   std::sqrt(2.0 * target.cov(0, 0) * target.cov(0, 0) / n), false);
            sigmas(c11, target.cov(1, 1),
                   std::sqrt(2.0 * target.cov(1, 1) * target.cov(1, 1) / n), false);
            sigmas(c01, target.cov(0, 1), se_cross, true);
            worst_systematic = std::max(
                worst_systematic, std::abs(composed.cov(0, 1) - target.cov(0, 1)) / se_cross);
        }
        worst_family_time = std::max(worst_family_time, seconds_since(t0));
    }
    char buf[512];
    if (ok) {
        std::snprintf(buf, sizeof buf,
                      "distributional fidelity vs closed-form laws, 3 families x 4 horizons, "
                      "B=100000 (worst deviation %.2f sigma <= 4; slowest family %.1fs <= 60s)",
                      worst_sigmas, worst_family_time);
    } else {
        std::snprintf(buf, sizeof buf,
                      "distributional fidelity vs closed-form laws, 3 families x 4 horizons, "
                      "B=100000: %d of 60 moment checks exceed 4 sigma (worst %.2f), %d of them "
                      "cross-covariances where the closed form deviates from its own one-step "
                      "composition by up to %.2f sigma deterministically -- the printed "
                      "cross-covariance lacks the semigroup property, so simulation and closed "
                      "form cannot both be honoured at long horizons",
                      n_failed_entries, worst_sigmas, n_failed_cross, worst_systematic);
    }
    report(3, ok && worst_family_time <= 60.0, buf);
}

// ---------------------------------------------------------------------- 4
void criterion_4() {
    NormalStream stream(4004);
    bool ok = true;
    std::string why = "";

    // Exact replication.
    {
        MatrixXd psi(50, 2);
        for (int i = 0; i < 50; ++i) {
            psi(i, 0) = std::abs(stream.normal()) + 0.1;
            psi(i, 1) = std::abs(stream.normal()) + 0.1;
        }
        const VectorXd phi = psi.col(1);
        const HedgeSolution sol = solve_hedge(phi, psi, Admissible::nonnegative());
        if (std::abs(sol.theta[0]) > 1e-10 || std::abs(sol.theta[1] - 1.0) > 1e-10 ||
            sol.expected_loss > 1e-18) {
            ok = false;
            why = "; replication fixture failed";
        }
    }

    // KKT at constrained solutions and grid-search oracle on small samples.
    double worst_kkt = 0.0, worst_grid = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4 + trial % 7;  // <= 10 outcomes
        MatrixXd psi(n, 2);
        VectorXd phi(n);
        for (int i = 0; i < n; ++i) {
            psi(i, 0) = std::abs(stream.normal()) + 0.3;
            psi(i, 1) = std::abs(stream.normal()) + 0.3;
            phi[i] = stream.normal();
        }
        const Admissible adm =
            trial % 2 == 0 ? Admissible::nonnegative() : Admissible::budget(2.0);
        HedgeSolution sol;
        try {
            sol = solve_hedge(phi, psi, adm);
        } catch (const IllConditionedError&) {
            continue;
        }
        worst_kkt = std::max(worst_kkt, kkt_violation(phi, psi, sol.theta, adm));

        const MatrixXd g_mat = psi.transpose() * psi / n;
        const VectorXd g_vec = psi.transpose() * phi / n;
        double best = 1e300, bt0 = 0.0, bt1 = 0.0;
        const double hi = 3.0;
        for (double t0 = 0.0; t0 <= hi; t0 += 1e-3)
            for (double t1 = 0.0; t1 <= hi; t1 += 1e-3) {
                if (adm.kind == Admissible::Kind::NonNegativeCap && t0 + t1 > adm.cap) break;
                VectorXd t(2);
                t << t0, t1;
                const double v = t.dot(g_mat * t) - 2.0 * g_vec.dot(t);
                if (v < best) {
                    best = v;
                    bt0 = t0;
                    bt1 = t1;
                }
            }
        worst_grid = std::max(worst_grid, std::max(std::abs(sol.theta[0] - bt0),
                                                   std::abs(sol.theta[1] - bt1)));
    }
    if (worst_kkt > 1e-8) {
        ok = false;
        why += "; KKT violated";
    }
    if (worst_grid > 1e-3 + 1e-9) {
        ok = false;
        why += "; grid oracle mismatch";
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "hedge solver (replication exact; worst KKT violation %.2e <= 1e-8; "
                  "grid-search gap %.2e <= 1e-3%s)",
                  worst_kkt, worst_grid, why.c_str());
    report(4, ok, buf);
}

// ---------------------------------------------------------------------- 5
void criterion_5() {
    const ExperimentConfig cfg = ExperimentConfig::defaults(Family::Ou);
    const ModelSpec truth = cfg.true_params;
    PriorSet copies{std::vector<ModelSpec>(7, truth), WeightVector::uniform(7)};
    const AffineGaussianKernel agg = aggregate_kernel(copies, cfg.dt);
    const AffineGaussianKernel direct = transition_kernel(truth, cfg.dt);

    const int horizon = 63, n = 20000;
    const std::uint64_t seed = 50005;
    const Vector2d init{cfg.mkt.s0, cfg.mkt.s0_tilde};
    const ObligationSpec ob = cfg.obligation.materialize(horizon);
    auto hedge_under = [&](const AffineGaussianKernel& k) {
        const PathSet paths = simulate_paths(k, init, n, horizon, seed);
        const VectorXd phi = obligation_payoff(paths, ob, cfg.mkt);
        MatrixXd psi(n, 2);
        for (int j = 0; j < 2; ++j)
            psi.col(j) = instrument_payoff(paths, cfg.instruments[j].materialize(horizon), cfg.mkt);
        return solve_hedge(phi, psi, cfg.admissible).theta;
    };
    const VectorXd theta_agg = hedge_under(agg);
    const VectorXd theta_true = hedge_under(direct);
    const bool bitwise = (theta_agg.array() == theta_true.array()).all();
    report(5, bitwise,
           bitwise ? "idempotent aggregation: identical-copy prior reproduces the true-model "
                     "hedge bitwise on a shared path sample"
                   : "idempotent aggregation: theta differs from the true-model hedge");
}

// ---------------------------------------------------------------------- 6
struct TrueHedgeTable {
    // theta[horizon_index] per family, horizons {63, 126, 189, 252}.
    std::vector<VectorXd> gbm, ou, mixed;
};

TrueHedgeTable true_hedges(std::uint64_t master_seed) {
    TrueHedgeTable table;
    std::uint64_t purpose = 0;
    for (Family family : {Family::Gbm, Family::Ou, Family::Mixed}) {
        const ExperimentConfig cfg = ExperimentConfig::defaults(family);
        const AffineGaussianKernel kernel = transition_kernel(cfg.true_params, cfg.dt);
        const Vector2d init{cfg.mkt.s0, cfg.mkt.s0_tilde};
        for (int horizon : {63, 126, 189, 252}) {
            const PathSet paths = simulate_paths(kernel, init, 100000, horizon,
                                                 substream_seed(master_seed, purpose++));
            const VectorXd phi =
                obligation_payoff(paths, cfg.obligation.materialize(horizon), cfg.mkt);
            MatrixXd psi(100000, 2);
            for (int j = 0; j < 2; ++j)
                psi.col(j) =
                    instrument_payoff(paths, cfg.instruments[j].materialize(horizon), cfg.mkt);
            const VectorXd theta = solve_hedge(phi, psi, cfg.admissible).theta;
            (family == Family::Gbm ? table.gbm : family == Family::Ou ? table.ou : table.mixed)
                .push_back(theta);
        }
    }
    return table;
}

void criterion_6() {
    const std::vector<std::uint64_t> seeds{6101, 6202, 6303};
    int pass_a = 0, pass_b = 0, pass_c = 0, pass_d = 0;
    double gbm3m_theta2 = 0.0, gbm_theta1_max = 0.0;
    for (std::uint64_t seed : seeds) {
        const TrueHedgeTable t = true_hedges(seed);
        bool a = true;
        for (const auto& th : t.gbm) {
            a = a && th[0] == 0.0;
            gbm_theta1_max = std::max(gbm_theta1_max, th[0]);
        }
        bool b = true;
        for (std::size_t h = 0; h < t.ou.size(); ++h) {
            b = b && t.ou[h][0] > 0.0 && t.ou[h][1] > 0.0;
            if (h > 0) b = b && t.ou[h][1] >= t.ou[h - 1][1];
        }
        const bool c = t.mixed[0][1] == 0.0;
        const bool d = std::abs(100.0 * t.gbm[0][1] - 88.72) <= 10.0;
        gbm3m_theta2 = 100.0 * t.gbm[0][1];
        pass_a += a;
        pass_b += b;
        pass_c += c;
        pass_d += d;
    }
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "structural table reproduction under documented conventions: "
                  "(a) GBM theta1==0 at all horizons %d/3 seeds (max theta1 %.4f) -- "
                  "no convention satisfies (a) together with (b)-(d), see run manifest; "
                  "(b) OU both positive, theta2 weakly increasing %d/3; "
                  "(c) MIXED 3m theta2==0 %d/3; "
                  "(d) GBM 3m theta2 %.2f%% within +-10pp of 88.72 %d/3",
                  pass_a, gbm_theta1_max, pass_b, pass_c, gbm3m_theta2, pass_d);
    report(6, pass_a >= 2 && pass_b >= 2 && pass_c >= 2 && pass_d >= 2, buf);
}

// ---------------------------------------------------------------------- 7
void criterion_7() {
    const ExperimentConfig base = ExperimentConfig::defaults(Family::Gbm);
    const std::uint64_t master = 7777;

    const auto t0 = std::chrono::steady_clock::now();
    const StudyReport first = run_study(base, master);
    const double study_seconds = seconds_since(t0);
    const StudyReport second = run_study(base, master);

    std::ostringstream csv_a, csv_b;
    write_report_csv(first, csv_a);
    write_report_csv(second, csv_b);
    const bool identical = csv_a.str() == csv_b.str();

    bool metrics_ok = first.rows.size() == 36 && first.n_failed == 0;
    for (const auto& row : first.rows) metrics_ok = metrics_ok && row.mae <= row.rmse;

    bool zero_noise_ok = true;
    for (Family family : {Family::Gbm, Family::Ou, Family::Mixed}) {
        ExperimentConfig cfg = ExperimentConfig::defaults(family);
        cfg.n_paths = 20000;
        cfg.halfwidth_override = 0.0;
        const ScenarioRow row = run_scenario(cfg, Homogeneity::HH, 63, 70007);
        zero_noise_ok = zero_noise_ok && !row.failed &&
                        (row.theta - row.theta_true).cwiseAbs().maxCoeff() <= 1e-12;
    }

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "error metrics and determinism (36 rows, MAE<=RMSE %s; zero-noise theta==theta_true "
                  "%s; reruns byte-identical %s; study %.0fs <= 900s)",
                  metrics_ok ? "ok" : "VIOLATED", zero_noise_ok ? "ok" : "VIOLATED",
                  identical ? "yes" : "NO", study_seconds);
    report(7, metrics_ok && zero_noise_ok && identical && study_seconds <= 900.0, buf);
}

// ---------------------------------------------------------------------- 8
void criterion_8() {
    const double dt = 1.0 / 252.0;
    const Vector2d state{50.0, 45.0};
    bool forward_ok = true;
    double worst_fwd = 0.0;
    const SettlementSchedule sched = SettlementSchedule::all(63);

    // Independent conditional-mean recomputation per family.
    for (Family family : {Family::Gbm, Family::Ou, Family::Mixed}) {
        const ModelSpec model = true_model(family);
        for (int coord : {0, 1}) {
            double expected = 0.0;
            for (int t : sched.dates) {
                const double tau = t * dt;
                double m = 0.0;
                switch (family) {
                    case Family::Gbm: {
                        const auto& p = model.as_gbm();
                        m = (coord == 0 ? 50.0 * std::exp(p.mu * tau)
                                        : 45.0 * std::exp(p.mu_tilde * tau));
                        break;
                    }
                    case Family::Ou: {
                        const auto& p = model.as_ou();
                        m = coord == 0
                                ? std::exp(-p.alpha * tau) * 50.0 + p.mu * (1 - std::exp(-p.alpha * tau))
                                : std::exp(-p.alpha_tilde * tau) * 45.0 +
                                      p.mu_tilde * (1 - std::exp(-p.alpha_tilde * tau));
                        break;
                    }
                    case Family::Mixed: {
                        const auto& p = model.as_mixed();
                        m = coord == 0 ? 50.0 * std::exp(p.mu * tau)
                                       : std::exp(-p.alpha_tilde * tau) * 45.0 +
                                             p.mu_tilde * (1 - std::exp(-p.alpha_tilde * tau));
                        break;
                    }
                }
                expected += m;
            }
            expected /= static_cast<double>(sched.dates.size());
            const double got = ffa_forward(model, state, sched, dt, coord);
            worst_fwd = std::max(worst_fwd, std::abs(got - expected));
            if (std::abs(got - expected) > 1e-10) forward_ok = false;
        }
    }

    // Put-call parity on shared samples, all families.
    bool parity_ok = true;
    double worst_parity = 0.0;
    const MarketConfig mkt{0.02, 1.0, 50.0, 45.0};
    std::uint64_t seed = 80008;
    for (Family family : {Family::Gbm, Family::Ou, Family::Mixed}) {
        const ModelSpec model = true_model(family);
        const PathSet paths =
            simulate_paths(transition_kernel(model, dt), state, 50000, 63, seed++);
        for (InstrumentKind kind : {InstrumentKind::EuroOption, InstrumentKind::AvgOption}) {
            const SettlementSchedule s =
                kind == InstrumentKind::EuroOption ? SettlementSchedule::single(63) : sched;
            InstrumentSpec call{kind, PayoffSide::CallForm, 49.5, s};
            InstrumentSpec put{kind, PayoffSide::PutForm, 49.5, s};
            InstrumentSpec fwd{kind == InstrumentKind::EuroOption ? InstrumentKind::EuroForward
                                                                  : InstrumentKind::AvgForward,
                               PayoffSide::PutForm, 49.5, s};
            const McPrice pc = price_option_mc(paths, call, mkt);
            const McPrice pp = price_option_mc(paths, put, mkt);
            const McPrice pf = price_option_mc(paths, fwd, mkt);
            const double se = std::sqrt(pc.std_error * pc.std_error +
                                        pp.std_error * pp.std_error + pf.std_error * pf.std_error);
            const double z = std::abs(pc.price - pp.price - pf.price) / std::max(se, 1e-300);
            worst_parity = std::max(worst_parity, z);
            if (z > 3.0) parity_ok = false;
        }
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "pricing identities (FFA forward worst gap %.2e <= 1e-10; put-call parity worst "
                  "%.2f se <= 3)",
                  worst_fwd, worst_parity);
    report(8, forward_ok && parity_ok, buf);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("%d of 8 criteria passed\n", 8 - g_failures);
    return g_failures;
}
