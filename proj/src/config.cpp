#include "ffa/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ffa {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config: " + path + ": " + msg);
}

void expect_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

double get_num(const json& obj, const std::string& path, const char* key, double fallback,
               bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail(path + "." + key, "missing required key");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::string get_str(const json& obj, const std::string& path, const char* key,
                    const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) fail(path + "." + key, "expected a string");
    return obj.at(key).get<std::string>();
}

Family parse_family(const std::string& s, const std::string& path) {
    if (s == "gbm") return Family::Gbm;
    if (s == "ou") return Family::Ou;
    if (s == "mixed") return Family::Mixed;
    fail(path, "unknown family '" + s + "' (expected gbm|ou|mixed)");
}

ModelSpec parse_model(const json& obj, const std::string& path) {
    expect_keys(obj, path,
                {"family", "mu", "mu_tilde", "alpha", "alpha_tilde", "sigma", "sigma_tilde", "rho"});
    const Family family = parse_family(get_str(obj, path, "family", ""), path + ".family");
    try {
        switch (family) {
            case Family::Gbm:
                return ModelSpec::gbm({get_num(obj, path, "mu", 0, true),
                                       get_num(obj, path, "mu_tilde", 0, true),
                                       get_num(obj, path, "sigma", 0, true),
                                       get_num(obj, path, "sigma_tilde", 0, true),
                                       get_num(obj, path, "rho", 0, true)});
            case Family::Ou:
                return ModelSpec::ou({get_num(obj, path, "mu", 0, true),
                                      get_num(obj, path, "mu_tilde", 0, true),
                                      get_num(obj, path, "alpha", 0, true),
                                      get_num(obj, path, "alpha_tilde", 0, true),
                                      get_num(obj, path, "sigma", 0, true),
                                      get_num(obj, path, "sigma_tilde", 0, true),
                                      get_num(obj, path, "rho", 0, true)});
            case Family::Mixed:
                return ModelSpec::mixed({get_num(obj, path, "mu", 0, true),
                                         get_num(obj, path, "sigma", 0, true),
                                         get_num(obj, path, "mu_tilde", 0, true),
                                         get_num(obj, path, "alpha_tilde", 0, true),
                                         get_num(obj, path, "sigma_tilde", 0, true),
                                         get_num(obj, path, "rho", 0, true)});
        }
    } catch (const DomainError& e) {
        fail(path, e.what());
    }
    fail(path, "unreachable");
}

GaussianLaw parse_law(const json& obj, const std::string& path) {
    expect_keys(obj, path, {"mean", "cov", "coords"});
    if (!obj.contains("mean") || !obj.at("mean").is_array())
        fail(path + ".mean", "expected an array");
    if (!obj.contains("cov") || !obj.at("cov").is_array())
        fail(path + ".cov", "expected an array of rows");
    const auto mean_arr = obj.at("mean");
    const Eigen::Index d = static_cast<Eigen::Index>(mean_arr.size());
    VectorXd mean(d);
    for (Eigen::Index i = 0; i < d; ++i) mean[i] = mean_arr.at(i).get<double>();
    MatrixXd cov(d, d);
    const auto& rows = obj.at("cov");
    if (static_cast<Eigen::Index>(rows.size()) != d) fail(path + ".cov", "row count != dim");
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!rows.at(i).is_array() || static_cast<Eigen::Index>(rows.at(i).size()) != d)
            fail(path + ".cov", "each row must have dim entries");
        for (Eigen::Index j = 0; j < d; ++j) cov(i, j) = rows.at(i).at(j).get<double>();
    }
    std::vector<Coord> coords(static_cast<std::size_t>(d), Coord::Level);
    if (obj.contains("coords")) {
        const auto& c = obj.at("coords");
        if (static_cast<Eigen::Index>(c.size()) != d)
            fail(path + ".coords", "one tag per coordinate required");
        for (Eigen::Index i = 0; i < d; ++i) {
            const std::string tag = c.at(i).get<std::string>();
            if (tag == "log")
                coords[i] = Coord::Log;
            else if (tag == "level")
                coords[i] = Coord::Level;
            else
                fail(path + ".coords", "expected log|level");
        }
    }
    try {
        return make_law(std::move(mean), std::move(cov), std::move(coords));
    } catch (const DomainError& e) {
        fail(path, e.what());
    }
}

ObligationKind parse_obligation_kind(const std::string& s, const std::string& path) {
    if (s == "terminal") return ObligationKind::Terminal;
    if (s == "average") return ObligationKind::Average;
    fail(path, "expected terminal|average");
}

InstrumentKind parse_instrument_kind(const std::string& s, const std::string& path) {
    if (s == "euro_option") return InstrumentKind::EuroOption;
    if (s == "avg_option") return InstrumentKind::AvgOption;
    if (s == "euro_forward") return InstrumentKind::EuroForward;
    if (s == "avg_forward") return InstrumentKind::AvgForward;
    fail(path, "expected euro_option|avg_option|euro_forward|avg_forward");
}

PayoffSide parse_side(const std::string& s, const std::string& path) {
    if (s == "put") return PayoffSide::PutForm;
    if (s == "call") return PayoffSide::CallForm;
    fail(path, "expected put|call");
}

InstrumentTemplate parse_instrument(const json& obj, const std::string& path) {
    expect_keys(obj, path, {"kind", "side", "strike", "window"});
    InstrumentTemplate t;
    t.kind = parse_instrument_kind(get_str(obj, path, "kind", ""), path + ".kind");
    t.side = parse_side(get_str(obj, path, "side", "put"), path + ".side");
    t.strike = get_num(obj, path, "strike", 0.0);
    t.window = static_cast<int>(get_num(obj, path, "window", 0.0));
    if (t.window < 0) fail(path + ".window", "window must be >= 0");
    return t;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    expect_keys(doc, "$",
                {"master_seed", "n_paths", "dt", "horizon", "horizons", "market", "models", "laws",
                 "weights", "obligation", "instruments", "m", "solver", "output"});

    RunConfig cfg;
    cfg.master_seed = static_cast<std::uint64_t>(
        get_num(doc, "$", "master_seed", static_cast<double>(cfg.master_seed)));
    cfg.n_paths = static_cast<int>(get_num(doc, "$", "n_paths", cfg.n_paths));
    cfg.dt = get_num(doc, "$", "dt", cfg.dt);
    cfg.horizon = static_cast<int>(get_num(doc, "$", "horizon", cfg.horizon));
    if (cfg.n_paths < 1) fail("$.n_paths", "must be >= 1");
    if (cfg.dt <= 0.0) fail("$.dt", "must be positive");
    if (cfg.horizon < 1) fail("$.horizon", "must be >= 1");

    if (doc.contains("horizons")) {
        if (!doc.at("horizons").is_array()) fail("$.horizons", "expected an array");
        cfg.horizons.clear();
        for (const auto& h : doc.at("horizons")) {
            cfg.horizons.push_back(h.get<int>());
            if (cfg.horizons.back() < 1) fail("$.horizons", "entries must be >= 1");
        }
        if (cfg.horizons.empty()) fail("$.horizons", "must be nonempty");
    }

    if (doc.contains("market")) {
        const json& mkt = doc.at("market");
        expect_keys(mkt, "$.market", {"r", "D", "s0", "s0_tilde"});
        cfg.mkt.r = get_num(mkt, "$.market", "r", cfg.mkt.r);
        cfg.mkt.D = get_num(mkt, "$.market", "D", cfg.mkt.D);
        cfg.mkt.s0 = get_num(mkt, "$.market", "s0", cfg.mkt.s0);
        cfg.mkt.s0_tilde = get_num(mkt, "$.market", "s0_tilde", cfg.mkt.s0_tilde);
        try {
            cfg.mkt.validate();
        } catch (const DomainError& e) {
            fail("$.market", e.what());
        }
    }

    if (doc.contains("models")) {
        if (!doc.at("models").is_array()) fail("$.models", "expected an array");
        int i = 0;
        for (const auto& m : doc.at("models"))
            cfg.models.push_back(parse_model(m, "$.models[" + std::to_string(i++) + "]"));
    }
    if (doc.contains("laws")) {
        if (!doc.at("laws").is_array()) fail("$.laws", "expected an array");
        int i = 0;
        for (const auto& l : doc.at("laws"))
            cfg.laws.push_back(parse_law(l, "$.laws[" + std::to_string(i++) + "]"));
    }
    if (doc.contains("weights")) {
        if (!doc.at("weights").is_array()) fail("$.weights", "expected an array");
        WeightVector w;
        for (const auto& v : doc.at("weights")) w.w.push_back(v.get<double>());
        try {
            w.validate();
        } catch (const DomainError& e) {
            fail("$.weights", e.what());
        }
        cfg.weights = std::move(w);
    }

    if (doc.contains("obligation")) {
        const json& ob = doc.at("obligation");
        expect_keys(ob, "$.obligation", {"kind", "window"});
        cfg.obligation.kind =
            parse_obligation_kind(get_str(ob, "$.obligation", "kind", "average"), "$.obligation.kind");
        cfg.obligation.window = static_cast<int>(get_num(ob, "$.obligation", "window", 0.0));
        if (cfg.obligation.window < 0) fail("$.obligation.window", "window must be >= 0");
    }
    if (doc.contains("instruments")) {
        if (!doc.at("instruments").is_array()) fail("$.instruments", "expected an array");
        cfg.instruments.clear();
        int i = 0;
        for (const auto& t : doc.at("instruments"))
            cfg.instruments.push_back(
                parse_instrument(t, "$.instruments[" + std::to_string(i++) + "]"));
    }

    cfg.m = static_cast<int>(get_num(doc, "$", "m", cfg.m));
    if (cfg.m < 1) fail("$.m", "must be >= 1");

    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        expect_keys(s, "$.solver", {"admissible", "cap", "lambda"});
        const std::string kind = get_str(s, "$.solver", "admissible", "nonnegative_cap");
        if (kind == "unconstrained")
            cfg.admissible = Admissible::unconstrained();
        else if (kind == "nonnegative")
            cfg.admissible = Admissible::nonnegative();
        else if (kind == "nonnegative_cap")
            cfg.admissible = Admissible::budget(get_num(s, "$.solver", "cap", 1.0));
        else
            fail("$.solver.admissible", "expected unconstrained|nonnegative|nonnegative_cap");
        cfg.reg.lambda = get_num(s, "$.solver", "lambda", 0.0);
        if (cfg.reg.lambda < 0.0) fail("$.solver.lambda", "must be >= 0");
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        expect_keys(o, "$.output", {"path", "format"});
        cfg.out_path = get_str(o, "$.output", "path", "");
        cfg.format = get_str(o, "$.output", "format", "csv");
        if (cfg.format != "csv" && cfg.format != "json")
            fail("$.output.format", "expected csv|json");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

ExperimentConfig to_experiment_config(const RunConfig& cfg, Family family) {
    ExperimentConfig ex = ExperimentConfig::defaults(family);
    ex.horizons = cfg.horizons;
    ex.n_paths = cfg.n_paths;
    ex.dt = cfg.dt;
    ex.mkt = cfg.mkt;
    ex.obligation = cfg.obligation;
    if (!cfg.instruments.empty()) ex.instruments = cfg.instruments;
    ex.admissible = cfg.admissible;
    ex.reg = cfg.reg;
    ex.m = cfg.m;
    ex.weights = cfg.weights;
    ex.validate();
    return ex;
}

}  // namespace ffa
