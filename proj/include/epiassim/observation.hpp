#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "epiassim/dynamics.hpp"
#include "epiassim/random.hpp"

namespace epiassim {

/// The four observation operators, numbered as Cases 1-4.
enum class ObservationCase {
    Prevalence = 1,               ///< I(t_j)
    UnderReportedPrevalence = 2,  ///< rho * I(t_j)
    Incidence = 3,                ///< new infections over (t_{j-1}, t_j]
    UnderReportedIncidence = 4,   ///< rho * new infections over (t_{j-1}, t_j]
};

inline constexpr ObservationCase all_cases[] = {
    ObservationCase::Prevalence, ObservationCase::UnderReportedPrevalence,
    ObservationCase::Incidence, ObservationCase::UnderReportedIncidence};

int case_number(ObservationCase c);
std::string_view case_name(ObservationCase c);

/// Accepts "1".."4", "case1".."case4" or the snake_case names.
ObservationCase parse_observation_case(std::string_view text);

bool reads_incidence(ObservationCase c);
bool is_under_reported(ObservationCase c);

/// Expected datum for `state` at the end of an observation interval.
/// Incidence cases read the accumulator and throw AccumulatorUnset when it was
/// never armed.
double observe(ObservationCase c, const EpidemicState& state, const ModelParams& params);

struct AdditiveNoise {
    double sigma = 0.1;
};

/// value * exp(e), e ~ N(0, sigma_log^2).
struct MultiplicativeNoise {
    double sigma_log = 0.1;
};

using NoiseModel = std::variant<AdditiveNoise, MultiplicativeNoise>;

void validate(const NoiseModel& noise);

/// Draws one noisy datum around `value`. Additive output may be negative and
/// is returned unclipped.
double corrupt(double value, const NoiseModel& noise, RandomStream& rng);

}  // namespace epiassim
