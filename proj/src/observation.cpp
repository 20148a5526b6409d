#include "epiassim/observation.hpp"

#include <cmath>
#include <string>

#include "epiassim/errors.hpp"

namespace epiassim {

int case_number(ObservationCase c) { return static_cast<int>(c); }

std::string_view case_name(ObservationCase c)
{
    switch (c) {
    case ObservationCase::Prevalence: return "prevalence";
    case ObservationCase::UnderReportedPrevalence: return "under_reported_prevalence";
    case ObservationCase::Incidence: return "incidence";
    case ObservationCase::UnderReportedIncidence: return "under_reported_incidence";
    }
    throw DomainError("unknown observation case");
}

ObservationCase parse_observation_case(std::string_view text)
{
    for (const ObservationCase c : all_cases) {
        const std::string number = std::to_string(case_number(c));
        if (text == number || text == "case" + number || text == case_name(c)) return c;
    }
    throw DomainError("unknown observation case '" + std::string(text) + "'");
}

bool reads_incidence(ObservationCase c)
{
    return c == ObservationCase::Incidence || c == ObservationCase::UnderReportedIncidence;
}

bool is_under_reported(ObservationCase c)
{
    return c == ObservationCase::UnderReportedPrevalence ||
           c == ObservationCase::UnderReportedIncidence;
}

double observe(ObservationCase c, const EpidemicState& state, const ModelParams& params)
{
    double base = state.i;
    if (reads_incidence(c)) {
        if (!state.incidence_tracked) {
            throw AccumulatorUnset("incidence observation on a state whose accumulator was never reset");
        }
        base = state.c;
    }
    return is_under_reported(c) ? params.rho * base : base;
}

void validate(const NoiseModel& noise)
{
    if (const auto* add = std::get_if<AdditiveNoise>(&noise)) {
        if (!(add->sigma >= 0)) throw DomainError("additive noise sigma must be >= 0");
    } else if (!(std::get<MultiplicativeNoise>(noise).sigma_log >= 0)) {
        throw DomainError("multiplicative noise sigma_log must be >= 0");
    }
}

double corrupt(double value, const NoiseModel& noise, RandomStream& rng)
{
    validate(noise);
    if (const auto* add = std::get_if<AdditiveNoise>(&noise)) {
        return value + rng.normal(0.0, add->sigma);
    }
    if (!(value > 0)) throw DomainError("multiplicative noise needs a positive expected value");
    return value * std::exp(rng.normal(0.0, std::get<MultiplicativeNoise>(noise).sigma_log));
}

}  // namespace epiassim
