#pragma once

#include <cstddef>
#include <functional>
#include <variant>

namespace epiassim {

/// Epidemiological parameters of the seasonal SIR model. Rates are per year.
struct ModelParams {
    double n_pop = 90000.0;   ///< population size (individuals)
    double b0 = 1800.0;       ///< average transmission
    double b1 = 0.08;         ///< seasonal amplitude (dimensionless modulation)
    double lambda = 100.0;    ///< recovery rate
    double m = 0.02;          ///< birth/death rate
    double rho = 0.7;         ///< reporting probability

    /// Throws DomainError naming the first violated bound.
    void validate() const;
};

/// (S, I) plus the cumulative-incidence accumulator C.
///
/// `incidence_tracked` is set by reset_incidence() and carried through
/// integrate(); incidence observations refuse states where it is unset.
struct EpidemicState {
    double s = 0.0;
    double i = 0.0;
    double c = 0.0;
    bool incidence_tracked = false;

    double recovered(double n_pop) const { return n_pop - s - i; }
};

/// b0 * (1 + b1 * cos(2 pi t)), t in years.
double transmission_rate(double t, double b0, double b1);

struct SeasonalBeta {
    double b0;
    double b1;
};

/// Transmission held fixed over an integration interval (parameter tracking).
struct ConstantBeta {
    double beta;
};

using BetaSource = std::variant<SeasonalBeta, ConstantBeta>;

double beta_at(const BetaSource& source, double t);

struct StateRate {
    double ds = 0.0;
    double di = 0.0;
    double dc = 0.0;
};

StateRate sir_rhs(double t, const EpidemicState& state, const ModelParams& params,
                  const BetaSource& beta);

struct Tolerances {
    double rel = 1e-6;
    double abs = 1e-8;
    double min_step = 1e-12;          ///< years
    std::size_t max_steps = 2'000'000;
};

/// Called after every accepted step with the step end time and state.
using StepObserver = std::function<void(double t, const EpidemicState&)>;

/// Adaptive Dormand-Prince 5(4) integration of the SIR system from t0 to t1.
///
/// Trial steps that drive S or I negative, or decrease C, are rejected and the
/// step halved. Once the step is at `min_step`, negative values no smaller than
/// -abs are clamped to zero; anything worse raises StepSizeUnderflow, as does a
/// step that cannot meet the tolerance above `min_step`.
EpidemicState integrate(const EpidemicState& state, const ModelParams& params, double t0, double t1,
                        const BetaSource& beta, const Tolerances& tol = {},
                        const StepObserver& observer = {});

/// Zeroes C and arms the accumulator for the interval that starts now.
EpidemicState reset_incidence(EpidemicState state);

struct BurnInOptions {
    double init_fraction_s = 0.95;
    double init_fraction_i = 0.02;
    int max_years = 200;
    double threshold = 1e-4;     ///< relative change of annual means
    int max_period = 4;          ///< longest periodic attractor (years) recognised
    int samples_per_year = 120;  ///< grid used for the annual means
    Tolerances tol{};
};

struct BurnInResult {
    EpidemicState state;     ///< state at the end of the last simulated year, C reset
    int years = 0;           ///< number of years simulated
    int period = 0;          ///< detected period of the attractor in years
    double last_change = 0;  ///< relative change of annual means at the matched lag
};

/// Integrates the seasonal model year by year from the given initial fractions
/// until the annual means of S and I repeat (to `threshold`) at some lag of
/// 1..max_period years. Year 0's reference means are the initial values.
/// Throws NonConvergence after `max_years`.
BurnInResult burn_in(const ModelParams& params, const BurnInOptions& options = {});

}  // namespace epiassim
