#pragma once

#include <string>

#include "ffa/experiments.hpp"

namespace ffa {

/// Declarative run configuration shared by all CLI subcommands. Parsed from a
/// flat JSON document; unknown keys are rejected with a schema-path message.
struct RunConfig {
    std::uint64_t master_seed = 20240101;
    int n_paths = 100000;
    double dt = 1.0 / 252.0;
    int horizon = 63;                          // steps, single-run subcommands
    std::vector<int> horizons{63, 126, 189, 252};

    MarketConfig mkt{0.0, 1.0, 50.0, 45.0};

    // Parametric models (with optional weights) or raw Gaussian laws; the
    // barycenter subcommand accepts either, the others require models.
    std::vector<ModelSpec> models;
    std::vector<GaussianLaw> laws;
    std::optional<WeightVector> weights;

    ObligationTemplate obligation{ObligationKind::Average, 0};
    std::vector<InstrumentTemplate> instruments;

    int m = 10;  // prior-set size for the experiment subcommand
    Admissible admissible = Admissible::budget(1.0);
    RegularizationSpec reg;

    std::string out_path;      // empty = stdout
    std::string format = "csv";
};

/// Parse and schema-validate a JSON config document.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Experiment view of a RunConfig (family filled per study iteration).
ExperimentConfig to_experiment_config(const RunConfig& cfg, Family family);

}  // namespace ffa
