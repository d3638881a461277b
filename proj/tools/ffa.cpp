// Command-line front end: barycenter | hedge | experiment | price.
// Exit codes: 0 ok, 2 config error, 3 numerical non-convergence, 4 I/O error.

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ffa/config.hpp"

namespace {

using nlohmann::json;
using namespace ffa;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out;
    std::string format;
    bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--seed", o.seed, "override master seed");
    cmd->add_option("--threads", o.threads, "simulation worker count")->check(CLI::Range(1, 256));
    cmd->add_option("--out", o.out, "output file (default stdout)");
    cmd->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--dry-run", o.dry_run, "validate and print the plan, do not compute");
}

RunConfig make_config(const CommonOpts& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.seed) cfg.master_seed = *o.seed;
    if (!o.out.empty()) cfg.out_path = o.out;
    if (!o.format.empty()) cfg.format = o.format;
    return cfg;
}

// Writes to the configured file (or stdout) and fails loudly on I/O errors.
void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open output file '" + cfg.out_path + "'");
    out << text;
    out.flush();
    if (!out) throw std::ios_base::failure("failed writing '" + cfg.out_path + "'");
}

json law_json(const GaussianLaw& law) {
    json j;
    j["mean"] = std::vector<double>(law.mean.data(), law.mean.data() + law.mean.size());
    json cov = json::array();
    for (Eigen::Index i = 0; i < law.cov.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < law.cov.cols(); ++k) row.push_back(law.cov(i, k));
        cov.push_back(row);
    }
    j["cov"] = cov;
    return j;
}

std::string render(const RunConfig& cfg, const json& j) {
    if (cfg.format == "json") return j.dump(2) + "\n";
    // Flat key,value CSV for scalar reports.
    std::ostringstream out;
    out << "key,value\n";
    const std::function<void(const std::string&, const json&)> walk =
        [&](const std::string& prefix, const json& node) {
            if (node.is_object()) {
                for (const auto& [k, v] : node.items())
                    walk(prefix.empty() ? k : prefix + "." + k, v);
            } else if (node.is_array()) {
                for (std::size_t i = 0; i < node.size(); ++i)
                    walk(prefix + "[" + std::to_string(i) + "]", node.at(i));
            } else {
                out << prefix << ',' << node.dump() << '\n';
            }
        };
    walk("", j);
    return out.str();
}

WeightVector effective_weights(const RunConfig& cfg, std::size_t n) {
    if (cfg.weights) {
        if (cfg.weights->w.size() != n)
            throw ConfigError("config: $.weights: size must match the model/law count");
        return *cfg.weights;
    }
    return WeightVector::uniform(n);
}

int cmd_barycenter(const CommonOpts& o) {
    RunConfig cfg = make_config(o);
    if (cfg.laws.empty() && cfg.models.empty())
        throw ConfigError("config: barycenter needs $.laws or $.models");
    json j;
    if (o.dry_run) {
        j["plan"] = "barycenter";
        j["inputs"] = cfg.laws.empty() ? cfg.models.size() : cfg.laws.size();
        emit(cfg, render(cfg, j));
        return 0;
    }
    if (!cfg.laws.empty()) {
        const WeightVector w = effective_weights(cfg, cfg.laws.size());
        const BarycenterResult res = gaussian_barycenter(cfg.laws, w);
        j["law"] = law_json(res.law);
        j["iterations"] = res.iterations;
        j["residual"] = res.residual;
        j["frechet_variance"] = res.frechet_variance;
    } else {
        PriorSet prior{cfg.models, effective_weights(cfg, cfg.models.size())};
        const AffineGaussianKernel kernel = aggregate_kernel(prior, cfg.dt);
        std::vector<GaussianLaw> step_laws;
        std::vector<Coord> cvec{kernel.coords[0], kernel.coords[1]};
        for (const auto& m : prior.models)
            step_laws.push_back(make_law(Vector2d::Zero(), transition_kernel(m, cfg.dt).noise_cov,
                                         cvec));
        const BarycenterResult res = gaussian_barycenter(step_laws, prior.weights);
        j["kernel"]["A"] = {{kernel.A(0, 0), kernel.A(0, 1)}, {kernel.A(1, 0), kernel.A(1, 1)}};
        j["kernel"]["b"] = {kernel.b[0], kernel.b[1]};
        j["kernel"]["noise_cov"] = {{kernel.noise_cov(0, 0), kernel.noise_cov(0, 1)},
                                    {kernel.noise_cov(1, 0), kernel.noise_cov(1, 1)}};
        j["kernel"]["dt"] = kernel.dt;
        j["iterations"] = res.iterations;
        j["residual"] = res.residual;
        j["frechet_variance"] = res.frechet_variance;
    }
    emit(cfg, render(cfg, j));
    return 0;
}

int cmd_hedge(const CommonOpts& o) {
    RunConfig cfg = make_config(o);
    if (cfg.models.empty()) throw ConfigError("config: hedge needs $.models");
    if (cfg.instruments.empty()) throw ConfigError("config: hedge needs $.instruments");
    json j;
    if (o.dry_run) {
        j["plan"] = "hedge";
        j["n_paths"] = cfg.n_paths;
        j["horizon"] = cfg.horizon;
        emit(cfg, render(cfg, j));
        return 0;
    }
    PriorSet prior{cfg.models, effective_weights(cfg, cfg.models.size())};
    const AffineGaussianKernel kernel = aggregate_kernel(prior, cfg.dt);
    const Vector2d init{cfg.mkt.s0, cfg.mkt.s0_tilde};
    const PathSet paths = simulate_paths(kernel, init, cfg.n_paths, cfg.horizon,
                                         substream_seed(cfg.master_seed, 1), o.threads);
    const ObligationSpec ob = cfg.obligation.materialize(cfg.horizon);
    const VectorXd phi = obligation_payoff(paths, ob, cfg.mkt);
    MatrixXd psi(cfg.n_paths, static_cast<Eigen::Index>(cfg.instruments.size()));
    for (std::size_t i = 0; i < cfg.instruments.size(); ++i)
        psi.col(static_cast<Eigen::Index>(i)) =
            instrument_payoff(paths, cfg.instruments[i].materialize(cfg.horizon), cfg.mkt);
    const HedgeSolution sol = solve_hedge(phi, psi, cfg.admissible, cfg.reg);
    for (Eigen::Index i = 0; i < sol.theta.size(); ++i) {
        j["theta"].push_back(sol.theta[i]);
        j["theta_pct"].push_back(100.0 * sol.theta[i]);
    }
    j["expected_loss"] = sol.expected_loss;
    j["expected_profit_pct"] = expected_profit_pct(psi, sol.theta, cfg.mkt);
    j["seed"] = cfg.master_seed;
    emit(cfg, render(cfg, j));
    return 0;
}

int cmd_experiment(const CommonOpts& o, const std::string& family_filter) {
    RunConfig cfg = make_config(o);
    std::optional<Family> only;
    if (!family_filter.empty()) {
        if (family_filter == "gbm")
            only = Family::Gbm;
        else if (family_filter == "ou")
            only = Family::Ou;
        else if (family_filter == "mixed")
            only = Family::Mixed;
        else
            throw ConfigError("--family: expected gbm|ou|mixed");
    }
    const ExperimentConfig base = to_experiment_config(cfg, only.value_or(Family::Gbm));
    const std::string manifest = run_manifest(base, cfg.master_seed);
    if (o.dry_run) {
        const std::size_t families = only ? 1 : 3;
        json j = json::parse(manifest);
        j["plan"] = "experiment";
        j["rows"] = families * 3 * base.horizons.size();
        emit(cfg, j.dump(2) + "\n");
        return 0;
    }
    const StudyReport report = run_study(base, cfg.master_seed, o.threads, only);
    std::ostringstream csv;
    write_report_csv(report, csv);
    emit(cfg, csv.str());
    if (!cfg.out_path.empty()) {
        std::ofstream mf(cfg.out_path + ".manifest.json", std::ios::binary);
        if (!mf) throw std::ios_base::failure("cannot write run manifest");
        mf << manifest << '\n';
    }
    if (report.n_failed > 0) {
        for (const auto& row : report.rows)
            if (row.failed)
                std::cerr << "row failed: " << family_name(row.family) << '/'
                          << homogeneity_name(row.level) << '/' << row.horizon << ": " << row.error
                          << '\n';
    }
    return 0;
}

int cmd_price(const CommonOpts& o, bool parity) {
    RunConfig cfg = make_config(o);
    if (cfg.models.empty()) throw ConfigError("config: price needs $.models (first is used)");
    if (cfg.instruments.empty()) throw ConfigError("config: price needs $.instruments");
    const ModelSpec model = cfg.models.front();
    json j;
    if (o.dry_run) {
        j["plan"] = "price";
        j["n_paths"] = cfg.n_paths;
        emit(cfg, render(cfg, j));
        return 0;
    }
    const Vector2d init{cfg.mkt.s0, cfg.mkt.s0_tilde};
    const SettlementSchedule sched = cfg.obligation.materialize(cfg.horizon).schedule;
    j["ffa_forward_spot"] = ffa_forward(model, init, sched, cfg.dt, 0);
    j["ffa_forward_index"] = ffa_forward(model, init, sched, cfg.dt, 1);
    const PathSet paths =
        simulate_paths(transition_kernel(model, cfg.dt), init, cfg.n_paths, cfg.horizon,
                       substream_seed(cfg.master_seed, 1), o.threads);
    for (std::size_t i = 0; i < cfg.instruments.size(); ++i) {
        InstrumentSpec spec = cfg.instruments[i].materialize(cfg.horizon);
        const McPrice px = price_option_mc(paths, spec, cfg.mkt);
        json row;
        row["price"] = px.price;
        row["std_error"] = px.std_error;
        if (parity && (spec.kind == InstrumentKind::EuroOption ||
                       spec.kind == InstrumentKind::AvgOption)) {
            InstrumentSpec other = spec;
            other.side =
                spec.side == PayoffSide::PutForm ? PayoffSide::CallForm : PayoffSide::PutForm;
            const McPrice px_other = price_option_mc(paths, other, cfg.mkt);
            InstrumentSpec fwd = spec;
            fwd.kind = spec.kind == InstrumentKind::EuroOption ? InstrumentKind::EuroForward
                                                               : InstrumentKind::AvgForward;
            const McPrice px_fwd = price_option_mc(paths, fwd, cfg.mkt);
            const double call = spec.side == PayoffSide::CallForm ? px.price : px_other.price;
            const double put = spec.side == PayoffSide::CallForm ? px_other.price : px.price;
            row["parity"]["call_minus_put"] = call - put;
            row["parity"]["forward"] = px_fwd.price;
            row["parity"]["gap"] = call - put - px_fwd.price;
        }
        j["instruments"].push_back(row);
    }
    j["seed"] = cfg.master_seed;
    emit(cfg, render(cfg, j));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"freight-rate model aggregation and static hedging"};
    app.require_subcommand(1);

    CommonOpts bary_o, hedge_o, exp_o, price_o;
    std::string family_filter;
    bool parity = false;

    CLI::App* bary = app.add_subcommand("barycenter", "aggregate a prior set");
    add_common(bary, bary_o);
    CLI::App* hedge = app.add_subcommand("hedge", "solve one static-hedge problem");
    add_common(hedge, hedge_o);
    CLI::App* experiment = app.add_subcommand("experiment", "run the simulation study");
    add_common(experiment, exp_o);
    experiment->add_option("--family", family_filter, "restrict to one family (gbm|ou|mixed)");
    CLI::App* price = app.add_subcommand("price", "FFA forward and option prices");
    add_common(price, price_o);
    price->add_flag("--parity", parity, "report caplet-floorlet parity on the shared sample");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bary->parsed()) return cmd_barycenter(bary_o);
        if (hedge->parsed()) return cmd_hedge(hedge_o);
        if (experiment->parsed()) return cmd_experiment(exp_o, family_filter);
        if (price->parsed()) return cmd_price(price_o, parity);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (residual " << e.residual() << ")\n";
        return 3;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
