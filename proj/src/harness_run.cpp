#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "epiassim/errors.hpp"
#include "epiassim/harness.hpp"
#include "epiassim/parallel.hpp"

namespace epiassim {

using nlohmann::json;

const Band& ReplicateRun::band(const std::string& component) const
{
    const auto it = series.find(component);
    if (it == series.end()) throw MissingSeries(component);
    return it->second;
}

ReplicateRun record_run(const FilterResult& result, const SyntheticDataset& data)
{
    ReplicateRun run;
    run.seed = result.seed;
    run.times = data.times;
    run.data = data.observations;
    for (const Component& c : result.layout) {
        run.components.push_back(c.name);
        run.series[c.name] = {result.mean_series(c.name), result.sd_series(c.name)};
    }
    for (const StepRecord& s : result.steps) {
        run.obs_estimate.mean.push_back(s.obs_estimate_mean);
        run.obs_estimate.sd.push_back(s.obs_estimate_sd);
    }
    run.innovations = result.innovations();
    return run;
}

Scores score_run(const ReplicateRun& run, const SyntheticDataset& data, ObservationCase obs_case)
{
    Scores s;
    s.seed = run.seed;
    s.mse_s = mse(data.truth_s_at_observations(), run.band(component::susceptible).mean);
    s.mse_i = mse(data.truth_i_at_observations(), run.band(component::infectious).mean);
    if (reads_incidence(obs_case)) {
        s.mse_cases = mse(data.truth_monthly_cases, run.band(component::incidence).mean);
    }
    const std::pair<const std::string*, double> constants[] = {{&component::b0, data.params.b0},
                                                               {&component::b1, data.params.b1}};
    for (const auto& [name, truth] : constants) {
        if (run.series.contains(*name)) {
            s.rel_error[*name] = relative_error(truth, run.band(*name).mean.back());
        }
    }
    if (run.series.contains(component::beta)) {
        const Band& b = run.band(component::beta);
        const std::vector<double> truth = data.truth_beta_at_observations();
        std::size_t covered = 0;
        for (std::size_t k = 0; k < truth.size(); ++k) {
            if (std::abs(truth[k] - b.mean[k]) <= 2.0 * b.sd[k]) ++covered;
        }
        s.beta_coverage = static_cast<double>(covered) / static_cast<double>(truth.size());
        s.mse_beta = mse(truth, b.mean);
    }
    const ConsistencyReport report = consistency_gamma(run.innovations);
    s.gamma = report.gamma;
    s.gamma_excluded = report.excluded;
    return s;
}

RunArtifact run_scenario(const ScenarioConfig& config, const SyntheticDataset& data, unsigned workers)
{
    config.validate();
    RunArtifact artifact{config, data, std::vector<ReplicateRun>(config.replicates)};
    parallel_for(config.replicates, workers, [&](std::size_t r) {
        const FilterOptions options = filter_options(config, replicate_seed(config.seed, r));
        artifact.runs[r] = record_run(run_filter(data, data.params, options), data);
    });
    return artifact;
}

RunArtifact run_scenario(const ScenarioConfig& config, unsigned workers)
{
    return run_scenario(config, resolve_dataset(config), workers);
}

std::vector<Scores> score_artifact(const RunArtifact& artifact)
{
    std::vector<Scores> out;
    out.reserve(artifact.runs.size());
    for (const ReplicateRun& run : artifact.runs) {
        out.push_back(score_run(run, artifact.dataset, artifact.config.obs_case));
    }
    return out;
}

Stats describe(std::span<const double> values)
{
    if (values.empty()) throw DomainError("describe: no values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    Stats st;
    st.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (const double v : sorted) ss += (v - st.mean) * (v - st.mean);
        st.sd = std::sqrt(ss / static_cast<double>(n - 1));
    }
    st.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    st.min = sorted.front();
    st.max = sorted.back();
    return st;
}

namespace {

json stats_json(const Stats& s)
{
    return {{"mean", s.mean}, {"sd", s.sd}, {"median", s.median}, {"min", s.min}, {"max", s.max}};
}

json scores_json(const Scores& s)
{
    json j = {{"seed", s.seed},
              {"mse_s", s.mse_s},
              {"mse_i", s.mse_i},
              {"gamma", s.gamma},
              {"gamma_excluded", s.gamma_excluded}};
    if (s.mse_cases) j["mse_cases"] = *s.mse_cases;
    if (!s.rel_error.empty()) j["rel_error"] = s.rel_error;
    if (s.beta_coverage) j["beta_coverage"] = *s.beta_coverage;
    if (s.mse_beta) j["mse_beta"] = *s.mse_beta;
    return j;
}

template <typename Get>
json aggregate(const std::vector<Scores>& scores, Get get)
{
    std::vector<double> v;
    for (const Scores& s : scores) v.push_back(get(s));
    return stats_json(describe(v));
}

json band_json(const Band& b) { return {{"mean", b.mean}, {"sd", b.sd}}; }

Band band_from_json(const json& j) { return {j.at("mean").get<std::vector<double>>(), j.at("sd").get<std::vector<double>>()}; }

}  // namespace

json summary_json(const RunArtifact& artifact)
{
    const std::vector<Scores> scores = score_artifact(artifact);
    json runs = json::array();
    for (const Scores& s : scores) runs.push_back(scores_json(s));

    json agg = {{"mse_s", aggregate(scores, [](const Scores& s) { return s.mse_s; })},
                {"mse_i", aggregate(scores, [](const Scores& s) { return s.mse_i; })},
                {"gamma", aggregate(scores, [](const Scores& s) { return s.gamma; })}};
    if (scores.front().mse_cases) {
        agg["mse_cases"] = aggregate(scores, [](const Scores& s) { return *s.mse_cases; });
    }
    for (const auto& [name, value] : scores.front().rel_error) {
        agg["rel_error_" + name] = aggregate(scores, [&](const Scores& s) { return s.rel_error.at(name); });
    }
    if (scores.front().beta_coverage) {
        agg["beta_coverage"] = aggregate(scores, [](const Scores& s) { return *s.beta_coverage; });
        agg["mse_beta"] = aggregate(scores, [](const Scores& s) { return *s.mse_beta; });
    }
    return {{"config", scenario_to_json(artifact.config)},
            {"config_hash", config_hash(artifact.config)},
            {"seed", artifact.config.seed},
            {"dataset_seed", artifact.dataset.seed},
            {"replicates", runs},
            {"aggregate", agg}};
}

json artifact_to_json(const RunArtifact& artifact)
{
    json runs = json::array();
    for (const ReplicateRun& r : artifact.runs) {
        json series = json::object();
        for (const auto& [name, band] : r.series) series[name] = band_json(band);
        json nu = json::array(), phi = json::array(), d = json::array();
        for (const InnovationRecord& in : r.innovations) {
            nu.push_back(in.nu);
            phi.push_back(in.phi_yy);
            d.push_back(in.d_obs);
        }
        runs.push_back({{"seed", r.seed},
                        {"components", r.components},
                        {"times", r.times},
                        {"data", r.data},
                        {"series", series},
                        {"obs_estimate", band_json(r.obs_estimate)},
                        {"innovations", {{"nu", nu}, {"phi_yy", phi}, {"d_obs", d}}}});
    }
    return {{"config", scenario_to_json(artifact.config)},
            {"config_hash", config_hash(artifact.config)},
            {"dataset", artifact.dataset},
            {"runs", runs}};
}

RunArtifact artifact_from_json(const json& j)
{
    RunArtifact a;
    try {
        a.config = scenario_from_json(j.at("config"));
        if (j.at("config_hash").get<std::string>() != config_hash(a.config)) {
            throw ConfigError("config_hash: does not match the embedded config");
        }
        a.dataset = j.at("dataset").get<SyntheticDataset>();
        for (const json& r : j.at("runs")) {
            ReplicateRun run;
            run.seed = r.at("seed").get<std::uint64_t>();
            run.components = r.at("components").get<std::vector<std::string>>();
            run.times = r.at("times").get<std::vector<double>>();
            run.data = r.at("data").get<std::vector<double>>();
            for (const auto& [name, band] : r.at("series").items()) run.series[name] = band_from_json(band);
            run.obs_estimate = band_from_json(r.at("obs_estimate"));
            const json& in = r.at("innovations");
            const auto nu = in.at("nu").get<std::vector<double>>();
            const auto phi = in.at("phi_yy").get<std::vector<double>>();
            const auto d = in.at("d_obs").get<std::vector<double>>();
            if (phi.size() != nu.size() || d.size() != nu.size()) {
                throw ConfigError("runs.innovations: arrays differ in length");
            }
            for (std::size_t k = 0; k < nu.size(); ++k) run.innovations.push_back({nu[k], phi[k], d[k]});
            a.runs.push_back(std::move(run));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("artifact: ") + e.what());
    }
    if (a.runs.empty()) throw ConfigError("artifact: no runs");
    return a;
}

void write_artifact(const RunArtifact& artifact, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("output: cannot write " + path.string());
    out << artifact_to_json(artifact).dump() << '\n';
}

RunArtifact read_artifact(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("artifact: cannot open " + path.string());
    try {
        return artifact_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError("artifact: " + path.string() + ": " + e.what());
    }
}

void write_run_outputs(const RunArtifact& artifact, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    for (std::size_t r = 0; r < artifact.runs.size(); ++r) {
        write_csv(series_table(artifact.runs[r], artifact.dataset), dir / ("series_r" + std::to_string(r) + ".csv"));
    }
    std::ofstream summary(dir / "summary.json");
    if (!summary) throw ConfigError("output: cannot write " + (dir / "summary.json").string());
    summary << summary_json(artifact).dump(2) << '\n';
    write_artifact(artifact, dir / "artifact.json");
}

std::vector<RunArtifact> compare_cases(const ScenarioConfig& base, std::span<const ObservationCase> cases,
                                       unsigned workers)
{
    const SyntheticDataset data = resolve_dataset(base);
    std::vector<RunArtifact> out;
    for (const ObservationCase c : cases) {
        ScenarioConfig config = base;
        config.obs_case = c;
        out.push_back(run_scenario(config, data, workers));
    }
    return out;
}

const SweepCell& SweepResult::cell(ObservationCase obs_case, double sigma_d) const
{
    for (const SweepCell& c : cells) {
        if (c.obs_case == obs_case && c.sigma_d == sigma_d) return c;
    }
    throw MissingSeries("case " + std::to_string(case_number(obs_case)) + " sigma_d " + std::to_string(sigma_d));
}

SweepResult sweep_sigma_d(const ScenarioConfig& base, const SweepOptions& options, unsigned workers)
{
    if (options.sigma_d.empty()) throw ConfigError("sigma_d: sweep needs at least one value");
    for (const double v : options.sigma_d) {
        if (!(v > 0) || !std::isfinite(v)) throw ConfigError("sigma_d: sweep values must be positive");
    }
    if (options.cases.empty()) throw ConfigError("cases: sweep needs at least one case");
    if (options.mse_replicates < 1 || options.gamma_replicates < 1) {
        throw ConfigError("replicates: must be >= 1");
    }
    const SyntheticDataset data = resolve_dataset(base);
    SweepResult result{base, options, {}};
    const std::size_t reps = std::max(options.mse_replicates, options.gamma_replicates);
    for (const ObservationCase c : options.cases) {
        for (const double v : options.sigma_d) {
            ScenarioConfig config = base;
            config.obs_case = c;
            config.sigma_d = v;
            config.replicates = reps;
            SweepCell cell{c, v, score_artifact(run_scenario(config, data, workers))};
            for (std::size_t r = 0; r < options.mse_replicates; ++r) {
                cell.mean_mse_s += cell.runs[r].mse_s / static_cast<double>(options.mse_replicates);
                cell.mean_mse_i += cell.runs[r].mse_i / static_cast<double>(options.mse_replicates);
            }
            for (std::size_t r = 0; r < options.gamma_replicates; ++r) {
                cell.mean_gamma += cell.runs[r].gamma / static_cast<double>(options.gamma_replicates);
            }
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

json sweep_json(const SweepResult& sweep)
{
    json cells = json::array();
    for (const SweepCell& c : sweep.cells) {
        json runs = json::array();
        for (const Scores& s : c.runs) runs.push_back(scores_json(s));
        cells.push_back({{"case", std::string(case_name(c.obs_case))},
                         {"sigma_d", c.sigma_d},
                         {"mean_mse_s", c.mean_mse_s},
                         {"mean_mse_i", c.mean_mse_i},
                         {"mean_gamma", c.mean_gamma},
                         {"runs", runs}});
    }
    return {{"config", scenario_to_json(sweep.base)},
            {"config_hash", config_hash(sweep.base)},
            {"seed", sweep.base.seed},
            {"sigma_d", sweep.options.sigma_d},
            {"mse_replicates", sweep.options.mse_replicates},
            {"gamma_replicates", sweep.options.gamma_replicates},
            {"cells", cells}};
}

ConsistencyResult consistency_check(const ScenarioConfig& config, unsigned workers)
{
    const RunArtifact artifact = run_scenario(config, workers);
    ConsistencyResult result{config, {}, 0.0};
    for (const ReplicateRun& run : artifact.runs) {
        result.runs.push_back(consistency_gamma(run.innovations));
        result.mean_gamma += result.runs.back().gamma / static_cast<double>(artifact.runs.size());
    }
    return result;
}

}  // namespace epiassim
