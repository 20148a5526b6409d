#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "epiassim/sir_filter.hpp"

namespace epiassim {

/// One experiment: where the data come from and how the filter is set up.
/// Worker count is a runtime option and deliberately not part of the config,
/// so it never affects hashes or outputs.
struct ScenarioConfig {
    std::optional<std::filesystem::path> dataset_path;  ///< load instead of generating
    DatasetSpec dataset{};
    FilterMode mode = FilterMode::State;
    ObservationCase obs_case = ObservationCase::UnderReportedIncidence;
    std::size_t n_ensemble = 100;
    double sigma_c = 0.2;
    double sigma_d = 1.0;
    double sigma_e = 45.0;
    FilterPriors priors{};
    std::uint64_t seed = 1;
    std::size_t replicates = 1;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parses a config object; absent fields keep their defaults, unknown fields
/// and bad values raise ConfigError with the field path.
ScenarioConfig scenario_from_json(const nlohmann::json& j, ScenarioConfig base = {});
nlohmann::json scenario_to_json(const ScenarioConfig& config);
ScenarioConfig load_scenario(const std::filesystem::path& path, ScenarioConfig base = {});

/// 64-bit FNV-1a of the canonical config JSON, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);
std::uint64_t fnv1a64(std::string_view bytes);

/// Filter seed of replicate r, derived from the base seed.
std::uint64_t replicate_seed(std::uint64_t base, std::size_t replicate);

SyntheticDataset resolve_dataset(const ScenarioConfig& config);
FilterOptions filter_options(const ScenarioConfig& config, std::uint64_t seed, unsigned workers = 1);

struct Band {
    std::vector<double> mean;
    std::vector<double> sd;
};

/// Per-step output of one filter run, reduced to what scoring and plots need.
struct ReplicateRun {
    std::uint64_t seed = 0;
    std::vector<std::string> components;
    std::vector<double> times;
    std::vector<double> data;
    std::map<std::string, Band> series;
    Band obs_estimate;
    std::vector<InnovationRecord> innovations;

    const Band& band(const std::string& component) const;  ///< MissingSeries if absent
};

ReplicateRun record_run(const FilterResult& result, const SyntheticDataset& data);

struct Scores {
    std::uint64_t seed = 0;
    double mse_s = 0.0;
    double mse_i = 0.0;
    std::optional<double> mse_cases;       ///< Cases 3 and 4 only
    std::map<std::string, double> rel_error;  ///< final estimates of constant parameters
    std::optional<double> beta_coverage;   ///< tracking: share of steps with truth inside mean +- 2 sd
    std::optional<double> mse_beta;
    double gamma = 0.0;
    std::size_t gamma_excluded = 0;
};

/// Scores against the dataset's truth; which parameter scores appear follows
/// from the components the run estimated.
Scores score_run(const ReplicateRun& run, const SyntheticDataset& data, ObservationCase obs_case);

struct RunArtifact {
    ScenarioConfig config;
    SyntheticDataset dataset;
    std::vector<ReplicateRun> runs;
};

/// Runs every replicate of `config` on `data`. Replicates are independent and
/// spread over `workers` threads; results do not depend on the worker count.
RunArtifact run_scenario(const ScenarioConfig& config, const SyntheticDataset& data, unsigned workers = 1);
RunArtifact run_scenario(const ScenarioConfig& config, unsigned workers = 1);

std::vector<Scores> score_artifact(const RunArtifact& artifact);

struct Stats {
    double mean = 0.0;
    double sd = 0.0;  ///< sample standard deviation, 0 for a single value
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
};

Stats describe(std::span<const double> values);

/// Config echo, hash, per-replicate scores and their aggregate.
nlohmann::json summary_json(const RunArtifact& artifact);

nlohmann::json artifact_to_json(const RunArtifact& artifact);
RunArtifact artifact_from_json(const nlohmann::json& j);
void write_artifact(const RunArtifact& artifact, const std::filesystem::path& path);
RunArtifact read_artifact(const std::filesystem::path& path);

/// Writes series_r<k>.csv per replicate, summary.json and artifact.json into `dir`.
void write_run_outputs(const RunArtifact& artifact, const std::filesystem::path& dir);

/// One run per case on a single shared dataset.
std::vector<RunArtifact> compare_cases(const ScenarioConfig& base, std::span<const ObservationCase> cases,
                                       unsigned workers = 1);

struct SweepOptions {
    std::vector<double> sigma_d{1, 5, 10, 15, 20, 25};
    std::vector<ObservationCase> cases{ObservationCase::UnderReportedIncidence, ObservationCase::Incidence,
                                       ObservationCase::UnderReportedPrevalence,
                                       ObservationCase::Prevalence};
    std::size_t mse_replicates = 10;
    std::size_t gamma_replicates = 5;
};

struct SweepCell {
    ObservationCase obs_case = ObservationCase::UnderReportedIncidence;
    double sigma_d = 0.0;
    std::vector<Scores> runs;
    double mean_mse_s = 0.0;  ///< over the first mse_replicates runs
    double mean_mse_i = 0.0;
    double mean_gamma = 0.0;  ///< over the first gamma_replicates runs
};

struct SweepResult {
    ScenarioConfig base;
    SweepOptions options;
    std::vector<SweepCell> cells;

    const SweepCell& cell(ObservationCase obs_case, double sigma_d) const;
};

SweepResult sweep_sigma_d(const ScenarioConfig& base, const SweepOptions& options, unsigned workers = 1);
nlohmann::json sweep_json(const SweepResult& sweep);

struct ConsistencyResult {
    ScenarioConfig config;
    std::vector<ConsistencyReport> runs;
    double mean_gamma = 0.0;
};

ConsistencyResult consistency_check(const ScenarioConfig& config, unsigned workers = 1);

/// Header plus rows of numbers.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Comma separated, header row, 17 significant digits.
void write_csv(const CsvTable& table, std::ostream& out);
void write_csv(const CsvTable& table, const std::filesystem::path& path);

/// Per-step series of one replicate: time, datum, truth, component means and
/// sds, observation estimate and innovation statistics.
CsvTable series_table(const ReplicateRun& run, const SyntheticDataset& data);

/// Figure identifiers with the scenarios behind them.
enum class FigureKind { Dataset, NoiseModels, Run, Sweep };

struct FigureSpec {
    std::string id;
    FigureKind kind = FigureKind::Run;
    FilterMode mode = FilterMode::State;
    std::vector<ObservationCase> cases;
    double sigma_d = 1.0;
    std::vector<std::string> components;  ///< panels per case
};

/// fig3, figA1, fig4 .. fig11, figB1. Throws ConfigError for unknown ids.
FigureSpec figure_spec(std::string_view id);
std::vector<std::string> figure_ids();

using PanelSet = std::map<std::string, CsvTable>;

/// Panels (time, truth, mean, lo2sd, hi2sd[, data]) for the named components
/// of one replicate; MissingSeries if the run lacks one of them.
PanelSet run_panels(const RunArtifact& artifact, std::span<const std::string> components,
                    std::size_t replicate = 0);
/// Panels of a run figure from an existing artifact, named "<case>_<component>".
PanelSet emit_plot_data(const RunArtifact& artifact, std::string_view figure);
PanelSet emit_plot_data(const SweepResult& sweep, std::string_view figure);
PanelSet emit_plot_data(const SyntheticDataset& data, std::string_view figure);
/// Generates whatever the figure needs from `base` and emits its panels.
PanelSet generate_figure(std::string_view figure, const ScenarioConfig& base, std::size_t replicates,
                         unsigned workers = 1);

/// Minimal static line chart of every non-time column against the first one.
void write_svg(const CsvTable& table, const std::string& title, std::ostream& out);

}  // namespace epiassim
