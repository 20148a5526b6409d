#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "epiassim/errors.hpp"
#include "epiassim/harness.hpp"

using namespace epiassim;
using nlohmann::json;

namespace {

ScenarioConfig small_config()
{
    ScenarioConfig c;
    c.dataset.horizon_years = 3;
    c.n_ensemble = 40;
    c.replicates = 3;
    return c;
}

std::string config_error(const json& j)
{
    try {
        scenario_from_json(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("epiassim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(ScenarioConfig, DefaultsAndOverrides)
{
    const ScenarioConfig c = scenario_from_json(json::object());
    EXPECT_EQ(c.n_ensemble, 100u);
    EXPECT_EQ(c.sigma_d, 1.0);
    EXPECT_EQ(c.sigma_e, 45.0);
    EXPECT_EQ(c.dataset.seed, 2021u);

    const ScenarioConfig d = scenario_from_json(
        {{"mode", "tracking"}, {"case", 3}, {"sigma_d", 5}, {"priors", {{"beta", {1000, 3000}}}},
         {"dataset", {{"noise", {{"kind", "multiplicative"}, {"sigma", 0.25}}}, {"horizon_years", 4}}}});
    EXPECT_EQ(d.mode, FilterMode::Tracking);
    EXPECT_EQ(d.obs_case, ObservationCase::Incidence);
    EXPECT_EQ(d.sigma_d, 5.0);
    EXPECT_EQ(d.priors.beta.hi, 3000.0);
    EXPECT_EQ(d.priors.b0.lo, 1200.0);
    EXPECT_EQ(std::get<MultiplicativeNoise>(d.dataset.noise).sigma_log, 0.25);
    EXPECT_EQ(d.dataset.horizon_years, 4);
}

TEST(ScenarioConfig, ErrorsNameTheField)
{
    EXPECT_EQ(config_error({{"sigmad", 1}}), "sigmad: unknown field");
    EXPECT_EQ(config_error({{"sigma_d", 0}}), "sigma_d: must be > 0");
    EXPECT_EQ(config_error({{"priors", {{"b0", {2600, 1200}}}}}), "priors.b0: need finite lo <= hi");
    EXPECT_EQ(config_error({{"n_ensemble", -4}}), "n_ensemble: expected a non-negative integer");
    EXPECT_EQ(config_error({{"dataset", {{"params", {{"rho", "high"}}}}}}),
              "dataset.params.rho: expected a finite number");
    EXPECT_EQ(config_error({{"dataset", {{"noise", {{"kind", "poisson"}}}}}}),
              "dataset.noise.kind: expected \"additive\" or \"multiplicative\"");
    EXPECT_EQ(config_error({{"priors", {{"b1", {0.1}}}}}), "priors.b1: expected [lo, hi]");
    EXPECT_EQ(config_error({{"mode", "smoother"}}).rfind("mode: ", 0), 0u);
    EXPECT_EQ(config_error({{"case", 7}}).rfind("case: ", 0), 0u);
}

TEST(ScenarioConfig, JsonRoundTripAndHash)
{
    ScenarioConfig c = small_config();
    c.mode = FilterMode::ConstantParams;
    c.sigma_c = 0.3;
    const ScenarioConfig back = scenario_from_json(scenario_to_json(c));
    EXPECT_EQ(scenario_to_json(back).dump(), scenario_to_json(c).dump());
    EXPECT_EQ(config_hash(back), config_hash(c));
    EXPECT_EQ(config_hash(c).size(), 16u);
    ScenarioConfig other = c;
    other.sigma_d = 2.0;
    EXPECT_NE(config_hash(other), config_hash(c));
}

TEST(ScenarioConfig, LoadFromFile)
{
    const auto dir = scratch("load");
    std::ofstream(dir / "good.json") << R"({"sigma_e": 30, "seed": 9})";
    std::ofstream(dir / "bad.json") << "{ not json";
    const ScenarioConfig c = load_scenario(dir / "good.json");
    EXPECT_EQ(c.sigma_e, 30.0);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_THROW(load_scenario(dir / "bad.json"), ConfigError);
    EXPECT_THROW(load_scenario(dir / "missing.json"), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST(Fnv1a, KnownVectors)
{
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(ReplicateSeed, DistinctAndStable)
{
    std::set<std::uint64_t> seeds;
    for (std::size_t r = 0; r < 100; ++r) seeds.insert(replicate_seed(1, r));
    EXPECT_EQ(seeds.size(), 100u);
    EXPECT_EQ(replicate_seed(1, 3), replicate_seed(1, 3));
    EXPECT_NE(replicate_seed(1, 3), replicate_seed(2, 3));
}

TEST(RunScenario, ReplicatesUseDerivedSeeds)
{
    const ScenarioConfig c = small_config();
    const RunArtifact a = run_scenario(c);
    ASSERT_EQ(a.runs.size(), 3u);
    for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(a.runs[r].seed, replicate_seed(c.seed, r));
    EXPECT_NE(a.runs[0].band("S").mean, a.runs[1].band("S").mean);
    EXPECT_THROW(a.runs[0].band("beta"), MissingSeries);

    const json summary = summary_json(a);
    EXPECT_EQ(summary.at("replicates").size(), 3u);
    EXPECT_EQ(summary.at("config_hash"), config_hash(c));
    EXPECT_TRUE(summary.at("aggregate").contains("mse_cases"));
}

TEST(RunScenario, WorkerCountDoesNotChangeOutputs)
{
    const ScenarioConfig c = small_config();
    EXPECT_EQ(summary_json(run_scenario(c, 1)).dump(), summary_json(run_scenario(c, 3)).dump());
}

TEST(RunScenario, ArtifactRoundTripAndRerun)
{
    ScenarioConfig c = small_config();
    c.mode = FilterMode::Tracking;
    const RunArtifact a = run_scenario(c);
    const auto dir = scratch("artifact");
    write_artifact(a, dir / "artifact.json");
    const RunArtifact back = read_artifact(dir / "artifact.json");
    EXPECT_EQ(summary_json(back).dump(), summary_json(a).dump());

    // The embedded config alone reproduces the run.
    const RunArtifact rerun = run_scenario(back.config);
    EXPECT_EQ(summary_json(rerun).dump(), summary_json(a).dump());
    std::filesystem::remove_all(dir);
}

TEST(RunScenario, TamperedArtifactIsRejected)
{
    json j = artifact_to_json(run_scenario(small_config()));
    j["config"]["sigma_d"] = 3.0;
    EXPECT_THROW(artifact_from_json(j), ConfigError);
}

TEST(RunScenario, WritesRunOutputs)
{
    const auto dir = scratch("outputs");
    write_run_outputs(run_scenario(small_config()), dir);
    for (const char* f : {"series_r0.csv", "series_r1.csv", "series_r2.csv", "summary.json", "artifact.json"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    std::ifstream in(dir / "series_r0.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header,
              "time,datum,truth_S,truth_I,truth_cases,truth_beta,S_mean,S_sd,I_mean,I_sd,C_mean,C_sd,"
              "obs_estimate_mean,obs_estimate_sd,nu,phi_yy,d_obs");
    std::filesystem::remove_all(dir);
}

TEST(Scores, FollowTheEstimatedComponents)
{
    ScenarioConfig c = small_config();
    c.replicates = 1;
    c.mode = FilterMode::ConstantParams;
    c.obs_case = ObservationCase::Prevalence;
    const RunArtifact constant = run_scenario(c);
    const Scores s = score_run(constant.runs[0], constant.dataset, c.obs_case);
    EXPECT_FALSE(s.mse_cases);
    EXPECT_EQ(s.rel_error.count("b0"), 1u);
    EXPECT_EQ(s.rel_error.count("b1"), 1u);
    EXPECT_FALSE(s.beta_coverage);
    EXPECT_DOUBLE_EQ(s.rel_error.at("b0"),
                     relative_error(1800.0, constant.runs[0].band("b0").mean.back()));

    c.mode = FilterMode::Tracking;
    const RunArtifact tracking = run_scenario(c);
    const Scores t = score_run(tracking.runs[0], tracking.dataset, c.obs_case);
    ASSERT_TRUE(t.beta_coverage);
    EXPECT_GE(*t.beta_coverage, 0.0);
    EXPECT_LE(*t.beta_coverage, 1.0);
    EXPECT_TRUE(t.mse_beta);
}

TEST(Describe, Statistics)
{
    const std::vector<double> v{4, 1, 3, 2};
    const Stats s = describe(v);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.median, 2.5);
    EXPECT_DOUBLE_EQ(s.min, 1);
    EXPECT_DOUBLE_EQ(s.max, 4);
    EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-15);
    const std::vector<double> one{7};
    EXPECT_EQ(describe(one).sd, 0.0);
}

TEST(CompareCases, SharesOneDataset)
{
    ScenarioConfig c = small_config();
    c.replicates = 1;
    const std::vector<ObservationCase> cases{ObservationCase::UnderReportedIncidence, ObservationCase::Prevalence};
    const auto artifacts = compare_cases(c, cases);
    ASSERT_EQ(artifacts.size(), 2u);
    EXPECT_EQ(artifacts[0].dataset.observations, artifacts[1].dataset.observations);
    EXPECT_EQ(artifacts[0].config.obs_case, ObservationCase::UnderReportedIncidence);
    EXPECT_EQ(artifacts[1].config.obs_case, ObservationCase::Prevalence);
}

TEST(Sweep, CellsAndPanels)
{
    ScenarioConfig c = small_config();
    SweepOptions o;
    o.sigma_d = {1, 10};
    o.cases = {ObservationCase::UnderReportedIncidence, ObservationCase::Incidence,
               ObservationCase::UnderReportedPrevalence};
    o.mse_replicates = 2;
    o.gamma_replicates = 1;
    const SweepResult s = sweep_sigma_d(c, o);
    ASSERT_EQ(s.cells.size(), 6u);
    const SweepCell& cell = s.cell(ObservationCase::Incidence, 10);
    EXPECT_EQ(cell.runs.size(), 2u);
    EXPECT_DOUBLE_EQ(cell.mean_mse_s, (cell.runs[0].mse_s + cell.runs[1].mse_s) / 2);
    EXPECT_DOUBLE_EQ(cell.mean_gamma, cell.runs[0].gamma);

    const PanelSet mse = emit_plot_data(s, "fig9");
    ASSERT_EQ(mse.size(), 3u);
    EXPECT_EQ(mse.at("case3_mse").header, (std::vector<std::string>{"sigma_d", "mse_s", "mse_i"}));
    EXPECT_EQ(mse.at("case3_mse").rows.size(), 2u);
    EXPECT_EQ(sweep_json(s).at("cells").size(), 6u);
    // the gamma figure also needs Case 1, which this sweep did not run
    EXPECT_THROW(emit_plot_data(s, "figB1"), MissingSeries);
}

TEST(PlotData, RunPanels)
{
    ScenarioConfig c = small_config();
    c.replicates = 1;
    const RunArtifact state = run_scenario(c);
    const PanelSet panels = emit_plot_data(state, "fig4");
    ASSERT_EQ(panels.size(), 3u);
    const CsvTable& cases = panels.at("case4_C");
    EXPECT_EQ(cases.header, (std::vector<std::string>{"time", "truth", "mean", "lo2sd", "hi2sd", "data"}));
    EXPECT_EQ(cases.rows.size(), state.dataset.size());
    for (const auto& row : panels.at("case4_S").rows) {
        EXPECT_LE(row[3], row[2]);
        EXPECT_GE(row[4], row[2]);
    }
    try {
        emit_plot_data(state, "fig7");
        FAIL() << "expected MissingSeries";
    } catch (const MissingSeries& e) {
        EXPECT_EQ(e.series(), "beta");
    }
}

TEST(PlotData, DatasetAndNoisePanels)
{
    const SyntheticDataset d = resolve_dataset(small_config());
    const PanelSet fig3 = emit_plot_data(d, "fig3");
    EXPECT_EQ(fig3.size(), 3u);
    EXPECT_EQ(fig3.at("cases").rows.size(), d.size());
    EXPECT_THROW(emit_plot_data(d, "figA1"), ConfigError);
    const PanelSet a1 = generate_figure("figA1", small_config(), 1);
    for (const char* name : {"sigma_0.01", "sigma_0.1", "sigma_0.25"}) EXPECT_EQ(a1.count(name), 1u) << name;
}

TEST(PlotData, FigureIds)
{
    EXPECT_EQ(figure_ids().size(), 11u);
    for (const auto& id : figure_ids()) EXPECT_EQ(figure_spec(id).id, id);
    EXPECT_THROW(figure_spec("fig12"), ConfigError);
    EXPECT_EQ(figure_spec("fig10").sigma_d, 10.0);
    EXPECT_EQ(figure_spec("fig7").mode, FilterMode::Tracking);
}

TEST(Csv, SeventeenSignificantDigits)
{
    std::ostringstream out;
    write_csv({{"a", "b"}, {{0.1, 1.0 / 3.0}, {1e-300, -2.5}}}, out);
    EXPECT_EQ(out.str(), "a,b\n0.10000000000000001,0.33333333333333331\n1e-300,-2.5\n");
}

TEST(Svg, DrawsEverySeries)
{
    std::ostringstream out;
    write_svg({{"time", "truth", "data"}, {{0, 1, 1.5}, {1, 2, 2.5}, {2, 1, 0.5}}}, "demo", out);
    const std::string svg = out.str();
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_NE(svg.find("<circle"), std::string::npos);
    EXPECT_NE(svg.find("demo"), std::string::npos);
}
