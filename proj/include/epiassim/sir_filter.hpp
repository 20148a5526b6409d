#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "epiassim/diagnostics.hpp"
#include "epiassim/dynamics.hpp"
#include "epiassim/enkf.hpp"
#include "epiassim/observation.hpp"
#include "epiassim/synthesis.hpp"

namespace epiassim {

/// State estimation with known parameters, joint estimation of the constant
/// seasonal parameters (b0, b1), or random-walk tracking of beta itself.
enum class FilterMode { State, ConstantParams, Tracking };

std::string_view mode_name(FilterMode mode);
FilterMode parse_filter_mode(std::string_view text);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Uniform priors of the initial ensemble. S and I bounds are factors of the
/// true initial state; parameter bounds are absolute.
struct FilterPriors {
    Interval s_factor{0.8, 1.6};
    Interval i_factor{0.5, 2.0};
    Interval b0{1200.0, 2600.0};
    Interval b1{0.01, 0.20};
    Interval beta{1200.0, 2600.0};
};

/// Filter noise variances: process noise C = c_state * I on (S, I), observation
/// variance D = d_obs, and parameter drift E = e_drift (tracking only).
struct NoiseSpec {
    double c_state = 0.04;
    double d_obs = 1.0;
    double e_drift = 2025.0;

    static NoiseSpec from_std(double sigma_c, double sigma_d, double sigma_e)
    {
        return {sigma_c * sigma_c, sigma_d * sigma_d, sigma_e * sigma_e};
    }
};

struct FilterOptions {
    FilterMode mode = FilterMode::State;
    ObservationCase obs_case = ObservationCase::UnderReportedIncidence;
    std::size_t n_ensemble = 100;
    NoiseSpec noise{};
    FilterPriors priors{};
    std::uint64_t seed = 1;
    unsigned workers = 1;
    Tolerances tol{};
    /// Overrides the mode's estimated parameter set ("b0", "b1" in constant mode,
    /// "beta" in tracking mode). An empty list runs the augmented filter with an
    /// empty parameter block.
    std::optional<std::vector<std::string>> estimated;
};

/// Posterior summary after assimilating one datum.
struct StepRecord {
    double time = 0.0;
    double datum = 0.0;
    Eigen::VectorXd mean;         ///< posterior ensemble mean, layout order
    Eigen::MatrixXd covariance;   ///< posterior ensemble covariance
    double forecast_obs_mean = 0.0;
    InnovationRecord innovation;  ///< nu, phi_yy (forecast variance), d_obs
    double obs_estimate_mean = 0.0;  ///< observation operator applied to the posterior members
    double obs_estimate_sd = 0.0;
};

struct FilterResult {
    std::vector<Component> layout;
    FilterMode mode = FilterMode::State;
    ObservationCase obs_case = ObservationCase::UnderReportedIncidence;
    std::uint64_t seed = 0;
    std::size_t n_ensemble = 0;
    Eigen::VectorXd initial_mean;
    Eigen::MatrixXd initial_covariance;
    std::vector<StepRecord> steps;

    bool has(const std::string& component) const;
    /// Posterior mean / standard deviation of a component at every step;
    /// throws MissingSeries for unknown names.
    std::vector<double> mean_series(const std::string& component) const;
    std::vector<double> sd_series(const std::string& component) const;
    std::vector<double> obs_estimate_series() const;
    std::vector<InnovationRecord> innovations() const;
};

/// Component names used by run_filter.
namespace component {
inline const std::string susceptible = "S";
inline const std::string infectious = "I";
inline const std::string incidence = "C";
inline const std::string b0 = "b0";
inline const std::string b1 = "b1";
inline const std::string beta = "beta";
}  // namespace component

/// Runs the chosen EnKF variant over every datum of `data`, with
/// `known` supplying all parameters that are not estimated.
FilterResult run_filter(const SyntheticDataset& data, const ModelParams& known,
                        const FilterOptions& options);

}  // namespace epiassim
