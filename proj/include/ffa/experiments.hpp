#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ffa/hedging.hpp"

namespace ffa {

enum class Homogeneity { HH, MH, LH };

const char* homogeneity_name(Homogeneity h);
double homogeneity_halfwidth(Homogeneity h);  // HH 0.05, MH 0.15, LH 0.30

struct PerturbationSpec {
    Homogeneity level = Homogeneity::HH;
    double relative_halfwidth = 0.05;
    int m = 10;
    std::uint64_t seed = 0;
    void validate() const;

    static PerturbationSpec at_level(Homogeneity level, int m, std::uint64_t seed);
};

/// True-model parameter sets used throughout the simulation study.
ModelSpec true_model(Family family);

/// Each parameter p becomes p*(1 + xi), xi ~ U(-h, h) i.i.d.; rho is perturbed
/// additively by xi*|rho| and clamped to (-0.99, 0.99). Models violating
/// family invariants are resampled (at most 100 retries each).
PriorSet generate_prior_set(const ModelSpec& true_params, const PerturbationSpec& pert);

/// Schedule templates are materialized per horizon: window 0 means the whole
/// horizon, n > 0 the final n trading days. Euro kinds settle on the final day.
struct ObligationTemplate {
    ObligationKind kind = ObligationKind::Average;
    int window = 0;
    ObligationSpec materialize(int horizon) const;
};

struct InstrumentTemplate {
    InstrumentKind kind = InstrumentKind::EuroForward;
    PayoffSide side = PayoffSide::PutForm;
    double strike = 0.0;
    int window = 0;
    InstrumentSpec materialize(int horizon) const;
};

struct ExperimentConfig {
    Family family = Family::Gbm;
    ModelSpec true_params;
    std::vector<int> horizons{63, 126, 189, 252};
    int n_paths = 100000;
    double dt = 1.0 / 252.0;
    MarketConfig mkt{0.0, 1.0, 50.0, 45.0};
    ObligationTemplate obligation;
    std::vector<InstrumentTemplate> instruments;
    Admissible admissible = Admissible::budget(1.0);
    RegularizationSpec reg;
    int m = 10;
    std::optional<WeightVector> weights;  // defaults to uniform over m
    std::optional<double> halfwidth_override;  // replaces the level halfwidth (e.g. 0 = no noise)

    void validate() const;

    /// Study convention: obligation = full-horizon average of the spot;
    /// instruments = terminal and average index exposures; unit budget cap.
    static ExperimentConfig defaults(Family family);
};

struct ScenarioRow {
    Family family = Family::Gbm;
    Homogeneity level = Homogeneity::HH;
    int horizon = 0;         // steps
    VectorXd theta;          // per-unit holdings
    double profit_pct = 0.0;
    VectorXd theta_true;
    double profit_true_pct = 0.0;
    double mae = 0.0;        // per unit D
    double rmse = 0.0;
    std::uint64_t seed = 0;  // row substream seed
    bool failed = false;
    std::string error;
};

/// One table row: build the prior set, aggregate, hedge on aggregate-model
/// paths, then score against the true model on fresh paths. The true-model
/// hedge reuses the solve-path substream so that a zero-noise prior
/// reproduces theta_true exactly.
ScenarioRow run_scenario(const ExperimentConfig& cfg, Homogeneity level, int horizon,
                         std::uint64_t row_seed, int n_threads = 1);

struct StudyReport {
    std::vector<ScenarioRow> rows;
    std::uint64_t master_seed = 0;
    int n_failed = 0;
};

/// Full 3 families x {HH, MH, LH} x horizons cross. Row r derives its RNG
/// substreams from (master_seed, r) only, so any subset is reproducible;
/// a family filter keeps the same per-row seeds as the full study.
StudyReport run_study(const ExperimentConfig& base, std::uint64_t master_seed, int n_threads = 1,
                      std::optional<Family> only_family = std::nullopt);

int horizon_months(int horizon_steps);  // 21 steps per month

/// CSV with the pinned report header; fixed formatting, LF endings.
void write_report_csv(const StudyReport& report, std::ostream& out);

/// JSON manifest recording every convention constant in force for a run.
std::string run_manifest(const ExperimentConfig& cfg, std::uint64_t master_seed);

}  // namespace ffa
