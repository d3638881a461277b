#include "ffa/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

namespace ffa {

namespace {

using nlohmann::json;

constexpr double kRhoClamp = 0.99;

double clamp_rho(double rho) {
    if (rho > kRhoClamp) return kRhoClamp;
    if (rho < -kRhoClamp) return -kRhoClamp;
    return rho;
}

const char* obligation_kind_name(ObligationKind k) {
    return k == ObligationKind::Terminal ? "terminal" : "average";
}

const char* instrument_kind_name(InstrumentKind k) {
    switch (k) {
        case InstrumentKind::EuroOption: return "euro_option";
        case InstrumentKind::AvgOption: return "avg_option";
        case InstrumentKind::EuroForward: return "euro_forward";
        case InstrumentKind::AvgForward: return "avg_forward";
    }
    return "?";
}

const char* side_name(PayoffSide s) { return s == PayoffSide::PutForm ? "put" : "call"; }

const char* admissible_name(Admissible::Kind k) {
    switch (k) {
        case Admissible::Kind::Unconstrained: return "unconstrained";
        case Admissible::Kind::NonNegative: return "nonnegative";
        case Admissible::Kind::NonNegativeCap: return "nonnegative_cap";
    }
    return "?";
}

bool same_kernel(const AffineGaussianKernel& a, const AffineGaussianKernel& b) {
    return a.dt == b.dt && a.coords == b.coords && (a.A.array() == b.A.array()).all() &&
           (a.b.array() == b.b.array()).all() &&
           (a.noise_cov.array() == b.noise_cov.array()).all();
}

struct Payoffs {
    VectorXd phi;
    MatrixXd psi;
};

Payoffs evaluate_payoffs(const AffineGaussianKernel& kernel, const ExperimentConfig& cfg,
                         const ObligationSpec& ob, const std::vector<InstrumentSpec>& ins,
                         int horizon, std::uint64_t seed, int n_threads) {
    const Vector2d init{cfg.mkt.s0, cfg.mkt.s0_tilde};
    const PathSet paths = simulate_paths(kernel, init, cfg.n_paths, horizon, seed, n_threads);
    Payoffs p;
    p.phi = obligation_payoff(paths, ob, cfg.mkt);
    p.psi.resize(cfg.n_paths, static_cast<Eigen::Index>(ins.size()));
    for (std::size_t j = 0; j < ins.size(); ++j)
        p.psi.col(static_cast<Eigen::Index>(j)) = instrument_payoff(paths, ins[j], cfg.mkt);
    return p;
}

void append_num(std::string& line, double v) {
    char buf[32];
    if (std::isfinite(v))
        std::snprintf(buf, sizeof buf, "%.4f", v);
    else
        std::snprintf(buf, sizeof buf, "nan");
    line += buf;
}

}  // namespace

const char* homogeneity_name(Homogeneity h) {
    switch (h) {
        case Homogeneity::HH: return "HH";
        case Homogeneity::MH: return "MH";
        case Homogeneity::LH: return "LH";
    }
    return "?";
}

double homogeneity_halfwidth(Homogeneity h) {
    switch (h) {
        case Homogeneity::HH: return 0.05;
        case Homogeneity::MH: return 0.15;
        case Homogeneity::LH: return 0.30;
    }
    return 0.0;
}

void PerturbationSpec::validate() const {
    if (relative_halfwidth < 0.0) throw DomainError("PerturbationSpec: negative halfwidth");
    if (m < 1) throw DomainError("PerturbationSpec: m must be >= 1");
}

PerturbationSpec PerturbationSpec::at_level(Homogeneity level, int m, std::uint64_t seed) {
    return {level, homogeneity_halfwidth(level), m, seed};
}

ModelSpec true_model(Family family) {
    switch (family) {
        case Family::Gbm: return ModelSpec::gbm({0.03, 0.01, 0.55, 0.40, 0.75});
        case Family::Ou: return ModelSpec::ou({60.0, 60.0, 0.25, 0.40, 15.0, 10.0, 0.75});
        case Family::Mixed: return ModelSpec::mixed({0.03, 0.55, 60.0, 0.60, 8.0, 0.75});
    }
    throw DomainError("true_model: unknown family");
}

PriorSet generate_prior_set(const ModelSpec& true_params, const PerturbationSpec& pert) {
    true_params.validate();
    pert.validate();
    NormalStream stream(substream_seed(pert.seed, 0));
    const double h = pert.relative_halfwidth;
    auto xi = [&] { return h * (2.0 * stream.uniform() - 1.0); };
    auto scale = [&](double p) { return p * (1.0 + xi()); };

    PriorSet prior;
    for (int i = 0; i < pert.m; ++i) {
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            ModelSpec candidate = true_params;
            switch (true_params.family) {
                case Family::Gbm: {
                    auto p = true_params.as_gbm();
                    p.mu = scale(p.mu);
                    p.mu_tilde = scale(p.mu_tilde);
                    p.sigma = scale(p.sigma);
                    p.sigma_tilde = scale(p.sigma_tilde);
                    p.rho = clamp_rho(p.rho + xi() * std::abs(p.rho));
                    candidate.params = p;
                    break;
                }
                case Family::Ou: {
                    auto p = true_params.as_ou();
                    p.mu = scale(p.mu);
                    p.mu_tilde = scale(p.mu_tilde);
                    p.alpha = scale(p.alpha);
                    p.alpha_tilde = scale(p.alpha_tilde);
                    p.sigma = scale(p.sigma);
                    p.sigma_tilde = scale(p.sigma_tilde);
                    p.rho = clamp_rho(p.rho + xi() * std::abs(p.rho));
                    candidate.params = p;
                    break;
                }
                case Family::Mixed: {
                    auto p = true_params.as_mixed();
                    p.mu = scale(p.mu);
                    p.sigma = scale(p.sigma);
                    p.mu_tilde = scale(p.mu_tilde);
                    p.alpha_tilde = scale(p.alpha_tilde);
                    p.sigma_tilde = scale(p.sigma_tilde);
                    p.rho = clamp_rho(p.rho + xi() * std::abs(p.rho));
                    candidate.params = p;
                    break;
                }
            }
            try {
                candidate.validate();
                prior.models.push_back(candidate);
                ok = true;
            } catch (const DomainError&) {
            }
        }
        if (!ok) throw DomainError("generate_prior_set: could not satisfy family invariants");
    }
    prior.weights = WeightVector::uniform(static_cast<std::size_t>(pert.m));
    return prior;
}

ObligationSpec ObligationTemplate::materialize(int horizon) const {
    ObligationSpec spec;
    spec.kind = kind;
    spec.schedule = window == 0 ? SettlementSchedule::all(horizon)
                                : SettlementSchedule::final_days(horizon, window);
    if (kind == ObligationKind::Terminal) spec.schedule = SettlementSchedule::single(horizon);
    return spec;
}

InstrumentSpec InstrumentTemplate::materialize(int horizon) const {
    InstrumentSpec spec;
    spec.kind = kind;
    spec.side = side;
    spec.strike = strike;
    if (kind == InstrumentKind::EuroOption || kind == InstrumentKind::EuroForward)
        spec.schedule = SettlementSchedule::single(horizon);
    else
        spec.schedule = window == 0 ? SettlementSchedule::all(horizon)
                                    : SettlementSchedule::final_days(horizon, window);
    spec.validate();
    return spec;
}

void ExperimentConfig::validate() const {
    true_params.validate();
    if (true_params.family != family) throw DomainError("ExperimentConfig: family mismatch");
    if (horizons.empty()) throw DomainError("ExperimentConfig: no horizons");
    for (int t : horizons)
        if (t < 1) throw DomainError("ExperimentConfig: horizons must be >= 1 step");
    if (n_paths < 1) throw DomainError("ExperimentConfig: n_paths must be >= 1");
    if (dt <= 0.0) throw DomainError("ExperimentConfig: dt must be positive");
    mkt.validate();
    if (instruments.empty()) throw DomainError("ExperimentConfig: no instruments");
    if (m < 1) throw DomainError("ExperimentConfig: m must be >= 1");
    reg.validate();
    if (weights) {
        weights->validate();
        if (weights->w.size() != static_cast<std::size_t>(m))
            throw DomainError("ExperimentConfig: weights size must equal m");
    }
}

ExperimentConfig ExperimentConfig::defaults(Family family) {
    ExperimentConfig cfg;
    cfg.family = family;
    cfg.true_params = true_model(family);
    cfg.obligation = {ObligationKind::Average, 0};
    cfg.instruments = {
        {InstrumentKind::EuroForward, PayoffSide::PutForm, 0.0, 0},
        {InstrumentKind::AvgForward, PayoffSide::PutForm, 0.0, 0},
    };
    cfg.admissible = Admissible::budget(1.0);
    return cfg;
}

ScenarioRow run_scenario(const ExperimentConfig& cfg, Homogeneity level, int horizon,
                         std::uint64_t row_seed, int n_threads) {
    cfg.validate();
    ScenarioRow row;
    row.family = cfg.family;
    row.level = level;
    row.horizon = horizon;
    row.seed = row_seed;
    try {
        const ObligationSpec ob = cfg.obligation.materialize(horizon);
        std::vector<InstrumentSpec> ins;
        ins.reserve(cfg.instruments.size());
        for (const auto& t : cfg.instruments) ins.push_back(t.materialize(horizon));

        PerturbationSpec pert =
            PerturbationSpec::at_level(level, cfg.m, substream_seed(row_seed, 0));
        if (cfg.halfwidth_override) pert.relative_halfwidth = *cfg.halfwidth_override;
        PriorSet prior = generate_prior_set(cfg.true_params, pert);
        if (cfg.weights) prior.weights = *cfg.weights;
        const AffineGaussianKernel kernel = aggregate_kernel(prior, cfg.dt);
        const AffineGaussianKernel true_kernel = transition_kernel(cfg.true_params, cfg.dt);

        const std::uint64_t solve_seed = substream_seed(row_seed, 1);
        const std::uint64_t eval_seed = substream_seed(row_seed, 2);

        // Hedge under the aggregate model.
        const Payoffs agg = evaluate_payoffs(kernel, cfg, ob, ins, horizon, solve_seed, n_threads);
        const HedgeSolution sol = solve_hedge(agg.phi, agg.psi, cfg.admissible, cfg.reg);
        row.theta = sol.theta;
        row.profit_pct = expected_profit_pct(agg.psi, sol.theta, cfg.mkt);

        // True-model hedge on the same solve substream; identical bit for bit
        // to the aggregate hedge when the prior collapses to the true model.
        const bool reuse = same_kernel(kernel, true_kernel);
        const Payoffs tru =
            reuse ? agg : evaluate_payoffs(true_kernel, cfg, ob, ins, horizon, solve_seed, n_threads);
        const HedgeSolution sol_true = solve_hedge(tru.phi, tru.psi, cfg.admissible, cfg.reg);
        row.theta_true = sol_true.theta;
        row.profit_true_pct = expected_profit_pct(tru.psi, sol_true.theta, cfg.mkt);

        // Score the aggregate strategy on fresh true-model paths.
        const Payoffs ev = evaluate_payoffs(true_kernel, cfg, ob, ins, horizon, eval_seed, n_threads);
        const VectorXd resid = ev.phi - ev.psi * row.theta;
        const double n = static_cast<double>(resid.size());
        row.mae = resid.cwiseAbs().mean() / cfg.mkt.D;
        row.rmse = std::sqrt(resid.squaredNorm() / n) / cfg.mkt.D;
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

StudyReport run_study(const ExperimentConfig& base, std::uint64_t master_seed, int n_threads,
                      std::optional<Family> only_family) {
    static constexpr Family kFamilies[] = {Family::Gbm, Family::Ou, Family::Mixed};
    static constexpr Homogeneity kLevels[] = {Homogeneity::HH, Homogeneity::MH, Homogeneity::LH};

    StudyReport report;
    report.master_seed = master_seed;
    std::uint64_t row_index = 0;
    for (Family family : kFamilies) {
        ExperimentConfig cfg = base;
        cfg.family = family;
        cfg.true_params = true_model(family);
        for (Homogeneity level : kLevels) {
            for (int horizon : cfg.horizons) {
                const std::uint64_t row_seed = substream_seed(master_seed, row_index);
                ++row_index;
                if (only_family && family != *only_family) continue;
                ScenarioRow row = run_scenario(cfg, level, horizon, row_seed, n_threads);
                if (row.failed) ++report.n_failed;
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

int horizon_months(int horizon_steps) { return horizon_steps / 21; }

void write_report_csv(const StudyReport& report, std::ostream& out) {
    out << "family,level,horizon_months,theta1_pct,theta2_pct,profit_pct,"
           "theta1_true_pct,theta2_true_pct,profit_true_pct,mae,rmse,seed\n";
    for (const ScenarioRow& row : report.rows) {
        std::string line;
        line += family_name(row.family);
        line += ',';
        line += homogeneity_name(row.level);
        line += ',';
        line += std::to_string(horizon_months(row.horizon));
        auto pct = [&](const VectorXd& v, int i) {
            line += ',';
            append_num(line, !row.failed && v.size() > i ? 100.0 * v[i]
                                                         : std::numeric_limits<double>::quiet_NaN());
        };
        pct(row.theta, 0);
        pct(row.theta, 1);
        line += ',';
        append_num(line, row.failed ? std::numeric_limits<double>::quiet_NaN() : row.profit_pct);
        pct(row.theta_true, 0);
        pct(row.theta_true, 1);
        line += ',';
        append_num(line,
                   row.failed ? std::numeric_limits<double>::quiet_NaN() : row.profit_true_pct);
        line += ',';
        append_num(line, row.failed ? std::numeric_limits<double>::quiet_NaN() : row.mae);
        line += ',';
        append_num(line, row.failed ? std::numeric_limits<double>::quiet_NaN() : row.rmse);
        line += ',';
        line += std::to_string(row.seed);
        out << line << '\n';
    }
}

std::string run_manifest(const ExperimentConfig& cfg, std::uint64_t master_seed) {
    cfg.validate();
    json j;
    j["master_seed"] = master_seed;
    j["family"] = family_name(cfg.family);
    j["n_paths"] = cfg.n_paths;
    j["dt"] = cfg.dt;
    j["horizons"] = cfg.horizons;
    j["prior_models"] = cfg.m;
    j["homogeneity_halfwidths"] = {{"HH", 0.05}, {"MH", 0.15}, {"LH", 0.30}};
    j["market"] = {{"r", cfg.mkt.r},
                   {"D", cfg.mkt.D},
                   {"s0", cfg.mkt.s0},
                   {"s0_tilde", cfg.mkt.s0_tilde}};
    j["obligation"] = {{"kind", obligation_kind_name(cfg.obligation.kind)},
                       {"window", cfg.obligation.window}};
    json ins = json::array();
    for (const auto& t : cfg.instruments)
        ins.push_back({{"kind", instrument_kind_name(t.kind)},
                       {"side", side_name(t.side)},
                       {"strike", t.strike},
                       {"window", t.window}});
    j["instruments"] = ins;
    j["admissible"] = {{"kind", admissible_name(cfg.admissible.kind)}, {"cap", cfg.admissible.cap}};
    j["lambda"] = cfg.reg.lambda;
    j["barycenter"] = {{"tol", 1e-12}, {"max_iter", 500}};
    j["profit_convention"] = "100 * mean(psi theta) / (D * s0)";
    j["error_convention"] = "hedge residual of theta on true-model paths, per unit D";
    return j.dump(2);
}

}  // namespace ffa
