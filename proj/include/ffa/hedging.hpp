#pragma once

#include <vector>

#include "ffa/barycenter.hpp"

namespace ffa {

struct MarketConfig {
    double r = 0.0;        // risk-free rate, per year
    double D = 1.0;        // cargo size (scale factor)
    double s0 = 0.0;       // initial spot price, USD
    double s0_tilde = 0.0; // initial index price, USD
    void validate() const;
};

/// Strictly increasing settlement step indices T_1 < ... < T_N (>= 1).
struct SettlementSchedule {
    std::vector<int> dates;

    int horizon() const { return dates.back(); }
    void validate() const;

    static SettlementSchedule single(int t);
    static SettlementSchedule final_days(int t, int n);  // t-n+1 .. t
    static SettlementSchedule all(int t);                // 1 .. t
};

enum class ObligationKind { Terminal, Average };

struct ObligationSpec {
    ObligationKind kind = ObligationKind::Average;
    SettlementSchedule schedule;
    void validate() const;
};

/// Option payoffs are one-sided; forward kinds are linear exposures
/// (strike 0 gives the bare terminal or average index value).
enum class InstrumentKind { EuroOption, AvgOption, EuroForward, AvgForward };
enum class PayoffSide { PutForm, CallForm };

struct InstrumentSpec {
    InstrumentKind kind = InstrumentKind::EuroOption;
    PayoffSide side = PayoffSide::PutForm;  // (K - X)^+ by default
    double strike = 0.0;
    SettlementSchedule schedule;
    void validate() const;
};

/// Obligation is on the spot coordinate (0), instruments on the index (1).
VectorXd obligation_payoff(const PathSet& paths, const ObligationSpec& spec,
                           const MarketConfig& mkt);
VectorXd instrument_payoff(const PathSet& paths, const InstrumentSpec& spec,
                           const MarketConfig& mkt);

/// Closed-form FFA forward: average of conditional means over the schedule.
/// coord selects the underlying (0 = spot by default, 1 = index).
double ffa_forward(const ModelSpec& model, const Vector2d& state_level,
                   const SettlementSchedule& schedule, double dt, int coord = 0);
double ffa_forward(const AffineGaussianKernel& kernel, const Vector2d& state_level,
                   const SettlementSchedule& schedule, int coord = 0);

struct McPrice {
    double price = 0.0;
    double std_error = 0.0;
};

/// Discounted Monte Carlo price e^{-r T dt} mean(payoff) with SE of the mean.
McPrice price_option_mc(const PathSet& paths, const InstrumentSpec& spec,
                        const MarketConfig& mkt);

struct Admissible {
    enum class Kind { Unconstrained, NonNegative, NonNegativeCap };
    Kind kind = Kind::NonNegative;
    double cap = 1.0;  // used by NonNegativeCap: theta >= 0, sum(theta) <= cap

    static Admissible unconstrained() { return {Kind::Unconstrained, 0.0}; }
    static Admissible nonnegative() { return {Kind::NonNegative, 0.0}; }
    static Admissible budget(double cap);
};

struct RegularizationSpec {
    double lambda = 0.0;  // LASSO strength
    void validate() const;
};

struct HedgeSolution {
    VectorXd theta;
    double expected_loss = 0.0;  // mean (phi - psi theta)^2 on the sample
};

/// Minimize mean (phi - psi theta)^2 + lambda ||theta||_1 over the admissible
/// set. Constrained cases are solved by active-set enumeration (exact for the
/// small instrument counts used here); unconstrained LASSO by coordinate
/// descent.
HedgeSolution solve_hedge(const VectorXd& phi, const MatrixXd& psi, const Admissible& admissible,
                          const RegularizationSpec& reg = {});

/// Max KKT violation of a candidate theta for the given problem; used by the
/// solver's self-check and the test suite.
double kkt_violation(const VectorXd& phi, const MatrixXd& psi, const VectorXd& theta,
                     const Admissible& admissible, const RegularizationSpec& reg = {});

/// Portfolio payout as a share of the t=0 obligation scale:
/// 100 * mean(psi theta) / (D * s0).
double expected_profit_pct(const MatrixXd& psi, const VectorXd& theta, const MarketConfig& mkt);

}  // namespace ffa
