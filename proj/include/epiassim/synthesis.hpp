#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "epiassim/dynamics.hpp"
#include "epiassim/observation.hpp"

namespace epiassim {

struct TruthSample {
    double t = 0.0;
    double s = 0.0;
    double i = 0.0;
};

/// Synthetic ground truth plus the noisy monthly data derived from it.
struct SyntheticDataset {
    std::vector<double> times;                ///< observation times t_1..t_M (years)
    std::vector<double> observations;         ///< noisy data y_1..y_M
    std::vector<TruthSample> truth_states;    ///< dense samples from t = 0, incl. every t_j
    std::vector<double> truth_monthly_cases;  ///< new infections over (t_{j-1}, t_j]
    ObservationCase gen_case = ObservationCase::UnderReportedIncidence;
    NoiseModel noise = AdditiveNoise{0.1};
    ModelParams params;
    std::uint64_t seed = 0;

    std::size_t size() const { return times.size(); }
    /// Dense samples per observation interval.
    std::size_t samples_per_interval() const;
    /// Truth at t = 0 (start of data collection), accumulator armed.
    EpidemicState initial_state() const;
    /// Truth S and I at the observation times t_1..t_M.
    std::vector<double> truth_s_at_observations() const;
    std::vector<double> truth_i_at_observations() const;
    /// True beta(t_j) from the seasonal form.
    std::vector<double> truth_beta_at_observations() const;
};

struct DatasetSpec {
    ModelParams params{};
    ObservationCase gen_case = ObservationCase::UnderReportedIncidence;
    NoiseModel noise = AdditiveNoise{0.1};
    int horizon_years = 10;
    std::uint64_t seed = 2021;
    int samples_per_month = 10;
    BurnInOptions burn_in{};
    Tolerances tol{};
};

/// Burns the model in from the 95%/2% start, restarts the clock at t = 0 and
/// records one corrupted observation per month over the horizon.
SyntheticDataset generate_dataset(const DatasetSpec& spec);
/// Same recording protocol from an explicit t = 0 state, skipping the burn-in.
SyntheticDataset generate_dataset_from(const EpidemicState& start, const DatasetSpec& spec);

void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);
void to_json(nlohmann::json& j, const NoiseModel& noise);
void from_json(const nlohmann::json& j, NoiseModel& noise);
void to_json(nlohmann::json& j, const SyntheticDataset& d);
void from_json(const nlohmann::json& j, SyntheticDataset& d);

void write_dataset_json(const SyntheticDataset& d, const std::filesystem::path& path);
SyntheticDataset read_dataset_json(const std::filesystem::path& path);
/// `time,observation` rows, 17 significant digits.
void write_observations_csv(const SyntheticDataset& d, std::ostream& out);

}  // namespace epiassim
